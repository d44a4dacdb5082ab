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

// Shared fixtures and independent reference implementations for the tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "asrkit/asrkit.hpp"

namespace asrkit::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("asrkit_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Words random_words(std::mt19937_64 &rng, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> pick(0, alphabet - 1);
  Words w(len(rng));
  for (auto &s : w) s = std::string(1, static_cast<char>('a' + pick(rng)));
  return w;
}

/// Plain recursive edit distance with memoization; no shared code with the
/// library aligner.
inline std::size_t edit_distance_recursive(const Words &a, const Words &b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  auto rec = [&](auto &&self, std::size_t i, std::size_t j) -> long {
    if (i == a.size()) return static_cast<long>(b.size() - j);
    if (j == b.size()) return static_cast<long>(a.size() - i);
    long &m = memo[i][j];
    if (m >= 0) return m;
    const long sub = self(self, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    const long del = self(self, i + 1, j) + 1;
    const long ins = self(self, i, j + 1) + 1;
    return m = std::min({sub, del, ins});
  };
  return static_cast<std::size_t>(rec(rec, 0, 0));
}

/// Alignment built directly from an op-kind list, for hand-written fixtures.
inline Alignment alignment_from_ops(const std::vector<OpKind> &kinds) {
  Alignment a;
  std::size_t r = 0, h = 0;
  for (OpKind k : kinds) {
    AlignmentOp op{k, std::nullopt, std::nullopt};
    if (k != OpKind::Insert) op.ref_index = r++;
    if (k != OpKind::Delete) op.hyp_index = h++;
    a.ops.push_back(op);
  }
  a.n_ref = r;
  a.n_hyp = h;
  return a;
}

/// Long-form fixture: alternating tone bursts and silences. Silences are
/// either short (below the 0.1 s cut threshold) or long enough to qualify.
struct LongFormFixture {
  AudioBuffer audio;
  std::vector<SynthSegment> segments;
};

inline LongFormFixture random_long_form(std::mt19937_64 &rng, int sample_rate_hz = 8000) {
  std::uniform_real_distribution<double> total_dist(40.0, 150.0), tone_dur(0.5, 20.0), long_sil(0.15, 2.0),
      short_sil(0.02, 0.06), freq(200.0, 1500.0), amp(0.2, 0.9);
  std::bernoulli_distribution short_gap(0.3), continuous(0.1);
  const double target = total_dist(rng);
  LongFormFixture f;
  double t = 0.0;
  bool start_silent = std::bernoulli_distribution(0.3)(rng);
  if (start_silent) {
    f.segments.push_back(SynthSegment::silence(long_sil(rng)));
    t += f.segments.back().dur_s;
  }
  const bool no_gaps = continuous(rng);
  while (t < target) {
    const double d = no_gaps ? target - t + 0.5 : tone_dur(rng);
    f.segments.push_back(SynthSegment::tone(freq(rng), d, amp(rng)));
    t += d;
    if (t >= target) break;
    const double s = short_gap(rng) ? short_sil(rng) : long_sil(rng);
    f.segments.push_back(SynthSegment::silence(s));
    t += s;
  }
  f.audio = synth_audio(f.segments, sample_rate_hz);
  return f;
}

/// Chunk-local transducer: prediction network identically zero and only the
/// onset feature drives token 1, so every decode depends on the current frame
/// alone.
inline ToyTransducerModel onset_model() {
  auto m = ToyTransducerModel::zeros(2, 3, 1);
  m.joiner_weight(1, 1) = 10.0;
  m.joiner_bias[1] = -5.0;
  return m;
}

inline CsPool uniform_pool(const std::string &language, std::size_t n, double duration_s) {
  CsPool p{language, {}};
  for (std::size_t i = 0; i < n; ++i)
    p.entries.push_back({language + "_" + std::to_string(i) + ".wav", language + " word" + std::to_string(i),
                         duration_s});
  return p;
}

inline CsPool varied_pool(const std::string &language, std::size_t n, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> dur(3.0, 20.0);
  CsPool p{language, {}};
  for (std::size_t i = 0; i < n; ++i)
    p.entries.push_back({language + "_" + std::to_string(i) + ".wav", language + " utt " + std::to_string(i), dur(rng)});
  return p;
}

}  // namespace asrkit::testing
