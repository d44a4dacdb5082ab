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

// Flat binary matrices.
//
// feats.bin:   int32 n, int32 D, int32 reserved (0), then n*D float32 values,
//              row-major.
// targets.bin: int32 Q, int32 M, int32 V_cb, then M int32 masked frame
//              indices, then Q*M int32 labels (head-major).
// All little-endian.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "asrkit/error.hpp"
#include "asrkit/io_util.hpp"
#include "asrkit/matrix.hpp"

namespace asrkit {

inline std::vector<std::uint8_t> encode_feature_matrix(const Matrix &m) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + m.size() * 4);
  le::append<std::int32_t>(out, static_cast<std::int32_t>(m.rows()));
  le::append<std::int32_t>(out, static_cast<std::int32_t>(m.cols()));
  le::append<std::int32_t>(out, 0);
  for (double x : m.data()) le::append<float>(out, static_cast<float>(x));
  return out;
}

inline Matrix decode_feature_matrix(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw Error(Errc::Truncated, "feature header needs 12 bytes");
  const auto n = le::load<std::int32_t>(bytes, 0);
  const auto dim = le::load<std::int32_t>(bytes, 4);
  if (n < 0 || dim < 1) throw Error(Errc::ParseError, "implausible feature header");
  const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(dim);
  if (bytes.size() - 12 < count * 4) throw Error(Errc::Truncated, "feature body shorter than header implies");
  Matrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
  auto data = m.data();
  for (std::size_t i = 0; i < count; ++i) {
    const float v = le::load<float>(bytes, 12 + 4 * i);
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, "non-finite feature value");
    data[i] = v;
  }
  return m;
}

inline std::vector<std::uint8_t> encode_targets(std::span<const std::size_t> masked_frames,
                                                const std::vector<std::vector<std::size_t>> &labels,
                                                std::size_t codebook_size) {
  std::vector<std::uint8_t> out;
  le::append<std::int32_t>(out, static_cast<std::int32_t>(labels.size()));
  le::append<std::int32_t>(out, static_cast<std::int32_t>(masked_frames.size()));
  le::append<std::int32_t>(out, static_cast<std::int32_t>(codebook_size));
  for (auto f : masked_frames) le::append<std::int32_t>(out, static_cast<std::int32_t>(f));
  for (const auto &head : labels)
    for (auto l : head) le::append<std::int32_t>(out, static_cast<std::int32_t>(l));
  return out;
}

}  // namespace asrkit
