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

// Long-form inference: segment -> batched greedy decode -> merge.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "asrkit/audio_io.hpp"
#include "asrkit/transducer.hpp"
#include "asrkit/vad_segment.hpp"

namespace asrkit {

/// Toy acoustic front-end standing in for an encoder. One row per frame of
/// `frame_s` seconds:
///   [0] loudness, (dBFS + 60) / 60 clipped to [0, 1]
///   [1] onset, 1 when the frame is loud and the previous one was not
///   [2] zero-crossing rate
/// Remaining columns are zero; with dim < 3 the trailing features are dropped.
inline Matrix frame_features(std::span<const double> samples, int sample_rate_hz, double frame_s,
                             std::size_t dim, double loud_threshold_dbfs = -40.0) {
  const auto frame_len = static_cast<std::size_t>(std::max<long long>(1, std::llround(frame_s * sample_rate_hz)));
  const std::size_t frames = (samples.size() + frame_len - 1) / frame_len;
  Matrix out(frames, dim);
  bool prev_loud = false;
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t begin = f * frame_len, end = std::min(samples.size(), begin + frame_len);
    double energy = 0.0;
    std::size_t crossings = 0;
    for (std::size_t i = begin; i < end; ++i) {
      energy += samples[i] * samples[i];
      if (i > begin && (samples[i] >= 0.0) != (samples[i - 1] >= 0.0)) ++crossings;
    }
    const double rms = std::sqrt(energy / static_cast<double>(end - begin));
    const double db = rms > 0.0 ? 20.0 * std::log10(rms) : -120.0;
    const bool loud = db >= loud_threshold_dbfs;
    const double feats[3] = {std::clamp((db + 60.0) / 60.0, 0.0, 1.0), loud && !prev_loud ? 1.0 : 0.0,
                             end - begin > 1 ? static_cast<double>(crossings) / static_cast<double>(end - begin - 1) : 0.0};
    for (std::size_t c = 0; c < std::min<std::size_t>(dim, 3); ++c) out(f, c) = feats[c];
    prev_loud = loud;
  }
  return out;
}

inline std::string token_text(int token, const std::vector<std::string> &vocab) {
  if (token >= 0 && static_cast<std::size_t>(token) < vocab.size()) return vocab[static_cast<std::size_t>(token)];
  return "t" + std::to_string(token);
}

struct PipelineConfig {
  VadConfig vad;
  DecodeOptions decode;
  double bias_offset_s = kDefaultTimestampBiasS;
  double frontend_threshold_dbfs = -40.0;
  std::vector<std::string> vocab;  // optional token spellings
};

struct PipelineResult {
  std::vector<ChunkSpec> chunks;
  std::vector<DecodeResult> chunk_decodes;
  MergedTranscript transcript;
};

/// Chunks the audio at silences, decodes every chunk as one padded batch with
/// `model` (its encoder_out is replaced by front-end features) and merges the
/// per-chunk outputs onto the global time scale. Audio without detected speech
/// yields an empty transcript.
inline PipelineResult run_pipeline(const AudioBuffer &audio, const ToyTransducerModel &model,
                                   const PipelineConfig &cfg) {
  cfg.vad.validate();
  if (!(cfg.decode.frame_duration_s > 0.0)) throw Error(Errc::InvalidArgument, "frame duration must be positive");
  PipelineResult result;
  if (audio.samples.empty()) return result;

  const auto regions = detect_speech(audio, cfg.vad);
  result.chunks = chunk_audio(audio, regions, cfg.vad);
  if (regions.empty()) {
    result.chunk_decodes.resize(result.chunks.size());
    return result;
  }

  const double sr = audio.sample_rate_hz;
  const auto padded_frames = static_cast<std::size_t>(std::ceil(cfg.vad.max_chunk_s / cfg.decode.frame_duration_s - 1e-9));
  std::vector<Matrix> batch;
  std::vector<std::size_t> lengths;
  for (const auto &c : result.chunks) {
    const auto b = static_cast<std::size_t>(std::llround(c.start_s * sr));
    const auto e = std::min(audio.samples.size(), static_cast<std::size_t>(std::llround(c.end_s * sr)));
    const std::span<const double> slice(audio.samples.data() + b, e > b ? e - b : 0);
    Matrix feats = frame_features(slice, audio.sample_rate_hz, cfg.decode.frame_duration_s, model.hidden_dim,
                                  cfg.frontend_threshold_dbfs);
    const std::size_t rows = std::max(padded_frames, feats.rows());
    Matrix padded(rows, model.hidden_dim);
    for (std::size_t r = 0; r < feats.rows(); ++r) std::copy(feats.row(r).begin(), feats.row(r).end(), padded.row(r).begin());
    lengths.push_back(feats.rows());
    batch.push_back(std::move(padded));
  }
  result.chunk_decodes = batched_greedy_decode(model, batch, lengths, cfg.decode);

  std::vector<ChunkOutput> outputs;
  for (std::size_t i = 0; i < result.chunks.size(); ++i) {
    ChunkOutput out{result.chunks[i], {}};
    const auto &dec = result.chunk_decodes[i];
    for (std::size_t k = 0; k < dec.tokens.size(); ++k)
      out.words.push_back({token_text(dec.tokens[k], cfg.vocab), dec.timestamps_s[k]});
    outputs.push_back(std::move(out));
  }
  result.transcript = merge_chunks(outputs, cfg.bias_offset_s);
  return result;
}

}  // namespace asrkit
