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

// Consecutive-error run metrics: fabrication (insert/substitute runs),
// omission (delete runs) and hallucination (any error) rates per hour.

#pragma once

#include <algorithm>
#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asrkit/alignment.hpp"
#include "asrkit/error.hpp"

namespace asrkit {

enum class RunKind { Fabrication, Omission, AnyError };

struct ErrorRun {
  RunKind kind = RunKind::AnyError;
  std::size_t length = 0;
  std::size_t start_op_index = 0;

  bool operator==(const ErrorRun &) const = default;
};

/// An alignment paired with the duration of the audio it came from.
struct TimedAlignment {
  Alignment alignment;
  double audio_hours = 0.0;
};

struct HallucReport {
  std::size_t n = 0;
  double fr_per_hour = 0.0;
  double or_per_hour = 0.0;
  double hr_per_hour = 0.0;
  double total_hours = 0.0;
};

struct AmbientStats {
  double non_blank_rate = 0.0;
  double mean_chars = 0.0;
  double median_chars = 0.0;
  double frac_ge_10_chars = 0.0;
};

inline bool qualifies(OpKind op, RunKind kind) {
  switch (kind) {
    case RunKind::Fabrication: return op == OpKind::Insert || op == OpKind::Substitute;
    case RunKind::Omission: return op == OpKind::Delete;
    case RunKind::AnyError: return op != OpKind::Match;
  }
  return false;
}

/// Maximal runs of qualifying ops, in op order.
inline std::vector<ErrorRun> extract_runs(const Alignment &a, RunKind kind) {
  std::vector<ErrorRun> runs;
  std::size_t i = 0;
  const std::size_t n = a.ops.size();
  while (i < n) {
    if (!qualifies(a.ops[i].kind, kind)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && qualifies(a.ops[j].kind, kind)) ++j;
    runs.push_back({kind, j - i, i});
    i = j;
  }
  return runs;
}

inline std::size_t count_runs_at_least(const Alignment &a, std::size_t n, RunKind kind) {
  const auto runs = extract_runs(a, kind);
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [n](const ErrorRun &r) { return r.length >= n; }));
}

/// Occurrences per hour of maximal runs of length >= n. A run counts once no
/// matter how far it exceeds n.
inline double consecutive_error_rate(std::span<const TimedAlignment> corpus, std::size_t n, RunKind kind) {
  if (n < 1) throw Error(Errc::InvalidArgument, "run threshold must be >= 1");
  double hours = 0.0;
  std::size_t count = 0;
  for (const auto &item : corpus) {
    hours += item.audio_hours;
    count += count_runs_at_least(item.alignment, n, kind);
  }
  if (!(hours > 0.0)) throw Error(Errc::ZeroDuration, "corpus has no audio duration");
  return static_cast<double>(count) / hours;
}

inline HallucReport halluc_report(std::span<const TimedAlignment> corpus, std::size_t n) {
  HallucReport r;
  r.n = n;
  r.fr_per_hour = consecutive_error_rate(corpus, n, RunKind::Fabrication);
  r.or_per_hour = consecutive_error_rate(corpus, n, RunKind::Omission);
  r.hr_per_hour = consecutive_error_rate(corpus, n, RunKind::AnyError);
  for (const auto &item : corpus) r.total_hours += item.audio_hours;
  return r;
}

/// Percent reduction of `ours` relative to `theirs`.
inline double relative_reduction(double rate_ours, double rate_theirs) {
  if (!(rate_theirs > 0.0)) throw Error(Errc::BaselineZero, "baseline rate must be positive");
  return 100.0 * (rate_theirs - rate_ours) / rate_theirs;
}

/// Number of Unicode code points in a UTF-8 string (continuation bytes are
/// not counted).
inline std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0u) != 0x80u; }));
}

inline AmbientStats ambient_stats(std::span<const std::string> hypotheses) {
  if (hypotheses.empty()) throw Error(Errc::EmptyInput, "no hypotheses");
  std::vector<std::size_t> lengths;
  std::size_t ge10 = 0;
  for (const auto &h : hypotheses) {
    const bool blank = std::all_of(h.begin(), h.end(), [](unsigned char c) { return std::isspace(c); });
    if (blank) continue;
    const std::size_t len = utf8_length(h);
    lengths.push_back(len);
    if (len >= 10) ++ge10;
  }
  AmbientStats s;
  const double total = static_cast<double>(hypotheses.size());
  s.non_blank_rate = static_cast<double>(lengths.size()) / total;
  s.frac_ge_10_chars = static_cast<double>(ge10) / total;
  if (!lengths.empty()) {
    double sum = 0.0;
    for (auto l : lengths) sum += static_cast<double>(l);
    s.mean_chars = sum / static_cast<double>(lengths.size());
    std::sort(lengths.begin(), lengths.end());
    s.median_chars = static_cast<double>(lengths[(lengths.size() - 1) / 2]);
  }
  return s;
}

}  // namespace asrkit
