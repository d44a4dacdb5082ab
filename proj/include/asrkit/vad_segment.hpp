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

// Energy VAD, silence-aware long-form chunking, chunk output merging and the
// corpus filtering heuristics built on top of them.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asrkit/alignment.hpp"
#include "asrkit/audio_io.hpp"
#include "asrkit/error.hpp"
#include "asrkit/ts_eval.hpp"

namespace asrkit {

struct VadConfig {
  int frame_ms = 30;
  double energy_threshold_dbfs = -40.0;
  int hangover_frames = 2;
  double min_silence_s = 0.1;
  double min_chunk_s = 15.0;
  double max_chunk_s = 32.0;

  void validate() const {
    if (frame_ms < 10 || frame_ms > 50) throw Error(Errc::InvalidArgument, "frame_ms must lie in [10, 50]");
    if (hangover_frames < 0) throw Error(Errc::InvalidArgument, "hangover_frames must be >= 0");
    if (!std::isfinite(energy_threshold_dbfs)) throw Error(Errc::InvalidArgument, "energy threshold must be finite");
    if (!(0.0 < min_silence_s && min_silence_s < min_chunk_s && min_chunk_s < max_chunk_s) ||
        !std::isfinite(max_chunk_s))
      throw Error(Errc::InvalidArgument, "need 0 < min_silence_s < min_chunk_s < max_chunk_s");
  }
};

struct SpeechRegion {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }
  bool operator==(const SpeechRegion &) const = default;
};

struct ChunkSpec {
  double start_s = 0.0;
  double end_s = 0.0;
  double padded_len_s = 0.0;

  double duration_s() const { return end_s - start_s; }
  bool operator==(const ChunkSpec &) const = default;
};

enum class FilterReason { Ok, LowSpeechRatio, TooShort, TooLong, PseudoLabelDisagreement };

inline std::string_view reason_name(FilterReason r) {
  switch (r) {
    case FilterReason::Ok: return "ok";
    case FilterReason::LowSpeechRatio: return "low_speech_ratio";
    case FilterReason::TooShort: return "too_short";
    case FilterReason::TooLong: return "too_long";
    case FilterReason::PseudoLabelDisagreement: return "pseudo_label_disagreement";
  }
  return "unknown";
}

struct FilterVerdict {
  bool keep = true;
  FilterReason reason = FilterReason::Ok;

  bool operator==(const FilterVerdict &) const = default;
};

// Thresholds of the unsupervised and pseudo-label corpus filters.
inline constexpr double kMinSpeechRatio = 0.70;
inline constexpr double kMinDurationS = 8.0;
inline constexpr double kMaxDurationS = 64.0;
inline constexpr double kMaxPseudoLabelWer = 0.20;

/// Frame RMS in dBFS (full scale = 1.0). Silence maps to -inf.
inline std::vector<double> frame_energies_dbfs(const AudioBuffer &audio, int frame_ms) {
  const auto frame_len = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(audio.sample_rate_hz * frame_ms / 1000.0)));
  const std::size_t n = audio.samples.size();
  std::vector<double> out;
  out.reserve((n + frame_len - 1) / frame_len);
  for (std::size_t begin = 0; begin < n; begin += frame_len) {
    const std::size_t end = std::min(n, begin + frame_len);
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += audio.samples[i] * audio.samples[i];
    const double rms = std::sqrt(sum / static_cast<double>(end - begin));
    out.push_back(rms > 0.0 ? 20.0 * std::log10(rms) : -std::numeric_limits<double>::infinity());
  }
  return out;
}

/// A frame is speech iff its RMS reaches the threshold. Each run of speech
/// frames is extended by `hangover_frames`, and regions separated by less
/// than `min_silence_s` are joined.
inline std::vector<SpeechRegion> detect_speech(const AudioBuffer &audio, const VadConfig &cfg) {
  if (audio.samples.empty()) throw Error(Errc::EmptyAudio, "cannot run VAD on empty audio");
  cfg.validate();
  const auto energies = frame_energies_dbfs(audio, cfg.frame_ms);
  const std::size_t frames = energies.size();
  const auto frame_len = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(audio.sample_rate_hz * cfg.frame_ms / 1000.0)));

  std::vector<bool> speech(frames, false);
  for (std::size_t f = 0; f < frames; ++f) {
    if (energies[f] < cfg.energy_threshold_dbfs) continue;
    speech[f] = true;
  }
  // Hangover: frames trailing a speech run.
  std::vector<bool> extended = speech;
  for (std::size_t f = 0; f < frames; ++f) {
    if (speech[f] && (f + 1 == frames || !speech[f + 1])) {
      for (std::size_t k = 1; k <= static_cast<std::size_t>(cfg.hangover_frames) && f + k < frames; ++k)
        extended[f + k] = true;
    }
  }

  const double sr = audio.sample_rate_hz;
  const std::size_t n = audio.samples.size();
  std::vector<SpeechRegion> regions;
  for (std::size_t f = 0; f < frames;) {
    if (!extended[f]) {
      ++f;
      continue;
    }
    std::size_t g = f;
    while (g < frames && extended[g]) ++g;
    const double start = static_cast<double>(f * frame_len) / sr;
    const double end = static_cast<double>(std::min(n, g * frame_len)) / sr;
    if (!regions.empty() && start - regions.back().end_s < cfg.min_silence_s)
      regions.back().end_s = end;
    else
      regions.push_back({start, end});
    f = g;
  }
  return regions;
}

inline double speech_existence_ratio(std::span<const SpeechRegion> regions, double duration_s) {
  if (!(duration_s > 0.0)) throw Error(Errc::InvalidArgument, "duration must be positive");
  double speech = 0.0;
  for (const auto &r : regions) speech += r.duration_s();
  return std::clamp(speech / duration_s, 0.0, 1.0);
}

/// Speech ratio is checked first, then the duration window [8, 64] s.
inline FilterVerdict filter_unsupervised(double duration_s, double speech_ratio) {
  if (!std::isfinite(duration_s) || !std::isfinite(speech_ratio) || duration_s < 0.0 || speech_ratio < 0.0)
    throw Error(Errc::InvalidArgument, "filter inputs must be finite and nonnegative");
  if (speech_ratio < kMinSpeechRatio) return {false, FilterReason::LowSpeechRatio};
  if (duration_s < kMinDurationS) return {false, FilterReason::TooShort};
  if (duration_s > kMaxDurationS) return {false, FilterReason::TooLong};
  return {true, FilterReason::Ok};
}

/// `hyp_a` acts as the reference. Discards only when WER strictly exceeds 20%.
inline FilterVerdict filter_pseudolabel(const Words &hyp_a, const Words &hyp_b) {
  const WerStats s = wer(align_words(hyp_a, hyp_b));
  if (s.wer > kMaxPseudoLabelWer) return {false, FilterReason::PseudoLabelDisagreement};
  return {true, FilterReason::Ok};
}

/// Complement of the speech regions inside [0, duration].
inline std::vector<SpeechRegion> silence_gaps(std::span<const SpeechRegion> regions, double duration_s) {
  std::vector<SpeechRegion> gaps;
  double cursor = 0.0;
  for (const auto &r : regions) {
    if (r.start_s > cursor) gaps.push_back({cursor, r.start_s});
    cursor = std::max(cursor, r.end_s);
  }
  if (duration_s > cursor) gaps.push_back({cursor, duration_s});
  return gaps;
}

/// Splits [0, duration] into chunks of at most max_chunk_s. Once a running
/// chunk is longer than min_chunk_s, it ends in the middle of the first
/// silence of at least min_silence_s (restricted to the part of the silence
/// that lies inside the admissible window). Without such a silence the chunk
/// is cut hard at max_chunk_s. A trailing silence is not split off when the
/// rest of the audio already fits in one chunk.
inline std::vector<ChunkSpec> chunk_audio(const AudioBuffer &audio, std::span<const SpeechRegion> regions,
                                          const VadConfig &cfg) {
  cfg.validate();
  const double duration = audio.duration_s();
  const auto gaps = silence_gaps(regions, duration);
  constexpr double kEps = 1e-9;

  std::vector<ChunkSpec> chunks;
  double start = 0.0;
  while (duration - start > kEps) {
    const double lo = start + cfg.min_chunk_s;
    const double hi = start + cfg.max_chunk_s;
    const bool rest_fits = duration - start <= cfg.max_chunk_s;
    std::optional<double> cut;
    for (const auto &g : gaps) {
      if (g.start_s >= hi) break;
      if (g.duration_s() < cfg.min_silence_s) continue;
      const double a = std::max(g.start_s, lo);
      const double b = std::min(g.end_s, hi);
      if (b - a <= kEps) continue;
      if (rest_fits && g.end_s >= duration - kEps) continue;
      cut = 0.5 * (a + b);
      break;
    }
    if (!cut) {
      if (rest_fits) {
        chunks.push_back({start, duration, cfg.max_chunk_s});
        break;
      }
      cut = hi;
    }
    chunks.push_back({start, *cut, cfg.max_chunk_s});
    start = *cut;
  }
  return chunks;
}

/// Words of one chunk with timestamps relative to the chunk start.
struct ChunkOutput {
  ChunkSpec chunk;
  std::vector<TimedWord> words;
};

struct MergedTranscript {
  std::vector<TimedWord> words;
  std::string text;
};

inline constexpr double kDefaultTimestampBiasS = -0.065;

/// Shifts local timestamps to the global time scale, applies the bias
/// correction, clamps at zero and keeps timestamps nondecreasing.
inline MergedTranscript merge_chunks(std::span<const ChunkOutput> outputs,
                                     double bias_offset_s = kDefaultTimestampBiasS) {
  MergedTranscript merged;
  for (std::size_t i = 1; i < outputs.size(); ++i)
    if (outputs[i].chunk.start_s < outputs[i - 1].chunk.start_s)
      throw Error(Errc::UnsortedChunks, "chunk " + std::to_string(i) + " starts before its predecessor");

  double last = 0.0;
  for (const auto &out : outputs) {
    for (const auto &w : out.words) {
      double ts = std::max(0.0, w.start_s + out.chunk.start_s + bias_offset_s);
      ts = std::max(ts, last);
      last = ts;
      if (!merged.text.empty()) merged.text += ' ';
      merged.text += w.text;
      merged.words.push_back({w.text, ts});
    }
  }
  return merged;
}

}  // namespace asrkit
