// Copyright 2026 The asrkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Word-level Levenshtein alignment and WER accounting.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "asrkit/error.hpp"

namespace asrkit {

using Words = std::vector<std::string>;

enum class OpKind { Match, Substitute, Insert, Delete };

struct AlignmentOp {
  OpKind kind = OpKind::Match;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;

  bool operator==(const AlignmentOp &) const = default;
};

struct Alignment {
  std::vector<AlignmentOp> ops;
  std::size_t n_ref = 0;
  std::size_t n_hyp = 0;

  bool operator==(const Alignment &) const = default;
};

struct WerStats {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t matches = 0;
  std::size_t n_ref = 0;
  double wer = 0.0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

/// Lowercases ASCII letters, splits on whitespace and strips punctuation from
/// token edges. Internal punctuation ("it's") is kept; tokens that were pure
/// punctuation disappear. Non-ASCII bytes pass through untouched.
inline Words normalize_words(std::string_view text) {
  auto is_edge_punct = [](unsigned char c) { return c < 128 && std::ispunct(c); };
  Words out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::size_t b = i, e = j;
    while (b < e && is_edge_punct(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && is_edge_punct(static_cast<unsigned char>(text[e - 1]))) --e;
    if (b < e) {
      std::string w(text.substr(b, e - b));
      for (auto &c : w)
        if (static_cast<unsigned char>(c) < 128) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      out.push_back(std::move(w));
    }
    i = j;
  }
  return out;
}

/// Minimum edit distance alignment with unit costs. The backtrace is
/// deterministic: at every cell the first admissible move in the order
/// match, substitute, delete, insert is taken.
inline Alignment align_words(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  const std::size_t w = m + 1;
  std::vector<std::size_t> cost((n + 1) * w);
  for (std::size_t i = 0; i <= n; ++i) cost[i * w] = i;
  for (std::size_t j = 0; j <= m; ++j) cost[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = cost[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::size_t del = cost[(i - 1) * w + j] + 1;
      const std::size_t ins = cost[i * w + j - 1] + 1;
      cost[i * w + j] = std::min({diag, del, ins});
    }
  }

  Alignment a;
  a.n_ref = n;
  a.n_hyp = m;
  a.ops.reserve(n + m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = cost[i * w + j];
    if (i > 0 && j > 0) {
      const std::size_t diag = cost[(i - 1) * w + j - 1];
      if (ref[i - 1] == hyp[j - 1] && diag == here) {
        a.ops.push_back({OpKind::Match, i - 1, j - 1});
        --i, --j;
        continue;
      }
      if (ref[i - 1] != hyp[j - 1] && diag + 1 == here) {
        a.ops.push_back({OpKind::Substitute, i - 1, j - 1});
        --i, --j;
        continue;
      }
    }
    if (i > 0 && cost[(i - 1) * w + j] + 1 == here) {
      a.ops.push_back({OpKind::Delete, i - 1, std::nullopt});
      --i;
      continue;
    }
    a.ops.push_back({OpKind::Insert, std::nullopt, j - 1});
    --j;
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

inline Alignment align_words(const Words &ref, const Words &hyp) {
  return align_words(std::span<const std::string>(ref), std::span<const std::string>(hyp));
}

/// With an empty reference and a non-empty hypothesis the rate is +inf; the
/// counts stay meaningful.
inline WerStats wer(const Alignment &a) {
  WerStats s;
  for (const auto &op : a.ops) {
    switch (op.kind) {
      case OpKind::Match: ++s.matches; break;
      case OpKind::Substitute: ++s.substitutions; break;
      case OpKind::Insert: ++s.insertions; break;
      case OpKind::Delete: ++s.deletions; break;
    }
  }
  s.n_ref = a.n_ref;
  if (s.n_ref > 0)
    s.wer = static_cast<double>(s.errors()) / static_cast<double>(s.n_ref);
  else
    s.wer = s.insertions > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return s;
}

/// Micro average: error counts and reference lengths are pooled before
/// dividing.
inline WerStats corpus_wer(std::span<const std::pair<Words, Words>> pairs) {
  WerStats total;
  for (const auto &[ref, hyp] : pairs) {
    const WerStats s = wer(align_words(ref, hyp));
    total.substitutions += s.substitutions;
    total.deletions += s.deletions;
    total.insertions += s.insertions;
    total.matches += s.matches;
    total.n_ref += s.n_ref;
  }
  if (total.n_ref == 0) throw Error(Errc::AllEmptyReferences, "no reference words in corpus");
  total.wer = static_cast<double>(total.errors()) / static_cast<double>(total.n_ref);
  return total;
}

/// Unweighted mean of per-set WERs.
inline double macro_average(std::span<const double> set_wers) {
  if (set_wers.empty()) throw Error(Errc::EmptyInput, "macro average of nothing");
  return std::accumulate(set_wers.begin(), set_wers.end(), 0.0) / static_cast<double>(set_wers.size());
}

}  // namespace asrkit
