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

// Word timestamp accuracy: per-word deltas over matched words, accuracy vs
// tolerance curves and median bias estimation.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asrkit/alignment.hpp"
#include "asrkit/error.hpp"

namespace asrkit {

struct TimedWord {
  std::string text;
  double start_s = 0.0;

  bool operator==(const TimedWord &) const = default;
};

struct TsEvalResult {
  std::vector<double> deltas_s;  // predicted - reference
  std::size_t matched = 0;
  std::size_t total_ref = 0;
  double median_bias_s = 0.0;
};

/// Lower median.
inline double estimate_bias(std::span<const double> deltas) {
  if (deltas.empty()) throw Error(Errc::EmptyDeltas, "no deltas");
  std::vector<double> v(deltas.begin(), deltas.end());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

inline TsEvalResult timestamp_deltas(std::span<const TimedWord> ref, std::span<const TimedWord> hyp) {
  Words ref_words, hyp_words;
  ref_words.reserve(ref.size());
  hyp_words.reserve(hyp.size());
  for (const auto &w : ref) ref_words.push_back(w.text);
  for (const auto &w : hyp) hyp_words.push_back(w.text);

  TsEvalResult r;
  r.total_ref = ref.size();
  for (const auto &op : align_words(ref_words, hyp_words).ops) {
    if (op.kind != OpKind::Match) continue;
    r.deltas_s.push_back(hyp[*op.hyp_index].start_s - ref[*op.ref_index].start_s);
  }
  r.matched = r.deltas_s.size();
  if (!r.deltas_s.empty()) r.median_bias_s = estimate_bias(r.deltas_s);
  return r;
}

/// Fraction of |delta| <= t for each tolerance t.
inline std::vector<std::pair<double, double>> accuracy_curve(std::span<const double> deltas,
                                                             std::span<const double> tolerances) {
  if (deltas.empty()) throw Error(Errc::EmptyDeltas, "no deltas");
  if (!std::is_sorted(tolerances.begin(), tolerances.end()))
    throw Error(Errc::InvalidArgument, "tolerances must be sorted ascending");
  std::vector<double> mags;
  mags.reserve(deltas.size());
  for (double d : deltas) mags.push_back(std::abs(d));
  std::sort(mags.begin(), mags.end());
  std::vector<std::pair<double, double>> curve;
  curve.reserve(tolerances.size());
  for (double t : tolerances) {
    if (!(t > 0.0)) throw Error(Errc::InvalidArgument, "tolerances must be positive");
    const auto within = std::upper_bound(mags.begin(), mags.end(), t) - mags.begin();
    curve.emplace_back(t, static_cast<double>(within) / static_cast<double>(mags.size()));
  }
  return curve;
}

inline std::vector<TimedWord> apply_bias(std::span<const TimedWord> words, double offset_s) {
  std::vector<TimedWord> out(words.begin(), words.end());
  for (auto &w : out) w.start_s = std::max(0.0, w.start_s + offset_s);
  return out;
}

}  // namespace asrkit
