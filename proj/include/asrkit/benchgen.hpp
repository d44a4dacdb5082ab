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

// Synthetic code-switching test sets and real-time-factor measurement.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "asrkit/audio_io.hpp"
#include "asrkit/error.hpp"
#include "json.hpp"

namespace asrkit {

struct PoolEntry {
  std::string audio_path;
  std::string transcript;
  double duration_s = 0.0;

  bool operator==(const PoolEntry &) const = default;
};

struct CsPool {
  std::string language;
  std::vector<PoolEntry> entries;

  void validate() const {
    if (entries.empty()) throw Error(Errc::InvalidArgument, "pool '" + language + "' is empty");
    for (const auto &e : entries)
      if (!(e.duration_s > 0.0)) throw Error(Errc::InvalidArgument, "pool entry " + e.audio_path + " has no duration");
  }
};

struct CsPart {
  std::string language;
  PoolEntry entry;

  bool operator==(const CsPart &) const = default;
};

struct CsSample {
  std::vector<CsPart> parts;
  double target_s = 0.0;
  double total_s = 0.0;

  std::string transcript() const {
    std::string out;
    for (const auto &p : parts) {
      if (p.entry.transcript.empty()) continue;
      if (!out.empty()) out += ' ';
      out += p.entry.transcript;
    }
    return out;
  }

  bool operator==(const CsSample &) const = default;
};

inline constexpr double kMinTargetS = 30.0;
inline constexpr double kMaxTargetS = 180.0;

/// Draws a target duration in [30, 180] s, picks the first pool by a fair
/// coin and then alternates pools, drawing entries uniformly with
/// replacement, until the running total exceeds the target.
inline CsSample build_cs_sample(const CsPool &pool_a, const CsPool &pool_b, std::mt19937_64 &rng) {
  pool_a.validate();
  pool_b.validate();
  CsSample s;
  s.target_s = std::uniform_real_distribution<double>(kMinTargetS, kMaxTargetS)(rng);
  const CsPool *pools[2] = {&pool_a, &pool_b};
  std::size_t which = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
  while (s.total_s <= s.target_s) {
    const CsPool &pool = *pools[which];
    std::uniform_int_distribution<std::size_t> pick(0, pool.entries.size() - 1);
    const PoolEntry &e = pool.entries[pick(rng)];
    s.parts.push_back({pool.language, e});
    s.total_s += e.duration_s;
    which ^= 1u;
  }
  return s;
}

/// Sample i uses its own generator seeded with seed + i.
inline std::vector<CsSample> build_cs_set(const CsPool &pool_a, const CsPool &pool_b, std::size_t count,
                                          std::uint64_t seed) {
  std::vector<CsSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(seed + i);
    out.push_back(build_cs_sample(pool_a, pool_b, rng));
  }
  return out;
}

inline nlohmann::json cs_sample_to_json(const CsSample &s) {
  nlohmann::json parts = nlohmann::json::array();
  double offset = 0.0;
  for (const auto &p : s.parts) {
    parts.push_back({{"language", p.language},
                     {"audio_path", p.entry.audio_path},
                     {"text", p.entry.transcript},
                     {"duration_s", p.entry.duration_s},
                     {"start_s", offset}});
    offset += p.entry.duration_s;
  }
  return {{"target_s", s.target_s}, {"total_s", s.total_s}, {"text", s.transcript()}, {"parts", parts}};
}

struct ConcatenatedAudio {
  AudioBuffer audio;
  std::vector<std::size_t> part_offsets;  // first sample of each part
};

/// `reader` maps a part's audio_path to its samples.
inline ConcatenatedAudio concat_sample_audio(const CsSample &sample,
                                             const std::function<AudioBuffer(const std::string &)> &reader) {
  ConcatenatedAudio out;
  bool first = true;
  for (const auto &part : sample.parts) {
    AudioBuffer piece = reader(part.entry.audio_path);
    if (first) {
      out.audio.sample_rate_hz = piece.sample_rate_hz;
      first = false;
    } else if (piece.sample_rate_hz != out.audio.sample_rate_hz) {
      throw Error(Errc::SampleRateMismatch, part.entry.audio_path + " is at " +
                                                std::to_string(piece.sample_rate_hz) + " Hz, expected " +
                                                std::to_string(out.audio.sample_rate_hz));
    }
    out.part_offsets.push_back(out.audio.samples.size());
    out.audio.samples.insert(out.audio.samples.end(), piece.samples.begin(), piece.samples.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Real-time factor.

inline double rtf(double wall_s, double audio_s) {
  if (!(audio_s > 0.0)) throw Error(Errc::ZeroAudio, "audio duration must be positive");
  if (wall_s < 0.0) throw Error(Errc::InvalidArgument, "wall time must be nonnegative");
  return wall_s / audio_s;
}

struct StageTiming {
  std::string name;
  double wall_s = 0.0;
  double rtf = 0.0;
};

struct RtfReport {
  double wall_s_total = 0.0;
  double audio_s_total = 0.0;
  double rtf = 0.0;
  std::vector<StageTiming> stages;
};

struct RtfStage {
  std::string name;
  std::function<void(const ManifestEntry &)> run;
};

/// Raised when a stage throws; carries the timings gathered so far.
class WorkloadError : public Error {
 public:
  WorkloadError(const std::string &what, RtfReport partial)
      : Error(Errc::WorkloadFailure, what), partial_(std::move(partial)) {}
  const RtfReport &partial() const { return partial_; }

 private:
  RtfReport partial_;
};

/// Runs every stage on every manifest entry, in order and on this thread,
/// timing each call with a monotonic clock.
inline RtfReport rtf_bench(std::span<const RtfStage> stages, std::span<const ManifestEntry> manifest) {
  using clock = std::chrono::steady_clock;
  RtfReport report;
  for (const auto &st : stages) report.stages.push_back({st.name, 0.0, 0.0});
  for (const auto &e : manifest) report.audio_s_total += e.duration_s;
  if (!(report.audio_s_total > 0.0)) throw Error(Errc::ZeroAudio, "manifest has no audio");

  auto finish = [&] {
    report.wall_s_total = 0.0;
    for (auto &st : report.stages) {
      report.wall_s_total += st.wall_s;
      st.rtf = st.wall_s / report.audio_s_total;
    }
    report.rtf = report.wall_s_total / report.audio_s_total;
  };

  for (const auto &entry : manifest) {
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const auto t0 = clock::now();
      try {
        stages[i].run(entry);
      } catch (const std::exception &ex) {
        report.stages[i].wall_s += std::chrono::duration<double>(clock::now() - t0).count();
        finish();
        throw WorkloadError("stage '" + stages[i].name + "' failed on " + entry.audio_path + ": " + ex.what(),
                            report);
      }
      report.stages[i].wall_s += std::chrono::duration<double>(clock::now() - t0).count();
    }
  }
  finish();
  return report;
}

}  // namespace asrkit
