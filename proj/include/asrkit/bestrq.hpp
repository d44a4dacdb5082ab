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

// BEST-RQ style masked pre-training targets: a static-shape span masking
// scheme, Gaussian mask filling and labels from a frozen random-projection
// quantizer.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "asrkit/error.hpp"
#include "asrkit/matrix.hpp"

namespace asrkit {

struct MaskConfig {
  double p_mask = 0.01;
  std::size_t n_span = 10;
  double sigma = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(p_mask > 0.0 && p_mask < 1.0)) throw Error(Errc::InvalidArgument, "p_mask must lie in (0, 1)");
    if (n_span < 1) throw Error(Errc::InvalidArgument, "n_span must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(Errc::InvalidArgument, "sigma must be positive");
  }
};

struct MaskPlan {
  std::vector<std::size_t> starts;
  std::vector<std::size_t> masked;  // sorted, unique
};

/// Number of span starts for a sequence of n frames. The product is floored
/// so the count is a static function of n.
inline std::size_t mask_start_count(std::size_t n, double p_mask) {
  // The epsilon absorbs products like 3200 * 0.01 landing a hair below 32.
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * p_mask + 1e-9));
}

inline MaskPlan sample_masks(std::size_t n, const MaskConfig &cfg, std::mt19937_64 &rng) {
  cfg.validate();
  if (n < 1) throw Error(Errc::InvalidArgument, "sequence must have at least one frame");
  MaskPlan plan;
  const std::size_t count = mask_start_count(n, cfg.p_mask);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  plan.starts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) plan.starts.push_back(pick(rng));

  std::vector<char> hit(n, 0);
  for (std::size_t s : plan.starts)
    for (std::size_t f = s; f < std::min(n, s + cfg.n_span); ++f) hit[f] = 1;
  for (std::size_t f = 0; f < n; ++f)
    if (hit[f]) plan.masked.push_back(f);
  return plan;
}

/// Masked rows are replaced by N(0, sigma^2) draws (sigma is the standard
/// deviation); every other row is copied unchanged.
inline Matrix apply_mask(const Matrix &features, const MaskPlan &plan, double sigma, std::mt19937_64 &rng) {
  for (std::size_t f : plan.masked)
    if (f >= features.rows()) throw Error(Errc::IndexOutOfRange, "masked frame beyond sequence");
  Matrix out = features;
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t f : plan.masked)
    for (auto &x : out.row(f)) x = noise(rng);
  return out;
}

/// Frozen random projection (D x k) shared by all heads plus one codebook
/// (V_cb x k, unit-norm rows) per head.
struct QuantizerBank {
  Matrix projection;
  std::vector<Matrix> codebooks;
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return projection.rows(); }
  std::size_t code_dim() const { return projection.cols(); }
  std::size_t heads() const { return codebooks.size(); }
  std::size_t codebook_size() const { return codebooks.empty() ? 0 : codebooks.front().rows(); }
};

inline constexpr std::size_t kDefaultCodebookSize = 8192;
inline constexpr std::size_t kDefaultCodeDim = 16;
inline constexpr std::size_t kDefaultHeads = 8;

inline QuantizerBank make_quantizer_bank(std::size_t input_dim, std::uint64_t seed,
                                         std::size_t heads = kDefaultHeads,
                                         std::size_t code_dim = kDefaultCodeDim,
                                         std::size_t codebook_size = kDefaultCodebookSize) {
  if (input_dim < 1 || heads < 1 || code_dim < 1 || codebook_size < 1)
    throw Error(Errc::InvalidArgument, "quantizer dimensions must be positive");
  QuantizerBank bank;
  bank.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bank.projection = Matrix(input_dim, code_dim);
  for (auto &x : bank.projection.data()) x = gauss(rng);
  for (std::size_t q = 0; q < heads; ++q) {
    Matrix cb(codebook_size, code_dim);
    for (std::size_t r = 0; r < codebook_size; ++r) {
      auto row = cb.row(r);
      double norm = 0.0;
      do {
        norm = 0.0;
        for (auto &x : row) {
          x = gauss(rng);
          norm += x * x;
        }
      } while (norm == 0.0);
      norm = std::sqrt(norm);
      for (auto &x : row) x /= norm;
    }
    bank.codebooks.push_back(std::move(cb));
  }
  return bank;
}

/// Labels for the masked frames: heads x |masked|.
///
/// Nearest unit-norm codeword to the normalized projection equals the
/// codeword with the largest dot product with the raw projection, so the
/// normalization is skipped. Ties go to the lowest row.
inline std::vector<std::vector<std::size_t>> quantize_targets(const Matrix &features, const MaskPlan &plan,
                                                              const QuantizerBank &bank) {
  if (features.cols() != bank.input_dim())
    throw Error(Errc::DimensionMismatch, "feature dimension does not match the projection");
  const std::size_t k = bank.code_dim();
  std::vector<std::vector<std::size_t>> labels(bank.heads(), std::vector<std::size_t>(plan.masked.size()));
  std::vector<double> proj(k);
  for (std::size_t i = 0; i < plan.masked.size(); ++i) {
    const std::size_t f = plan.masked[i];
    if (f >= features.rows()) throw Error(Errc::IndexOutOfRange, "masked frame beyond sequence");
    std::fill(proj.begin(), proj.end(), 0.0);
    const auto x = features.row(f);
    for (std::size_t j = 0; j < features.cols(); ++j) {
      const auto a = bank.projection.row(j);
      for (std::size_t c = 0; c < k; ++c) proj[c] += x[j] * a[c];
    }
    for (std::size_t q = 0; q < bank.heads(); ++q) {
      const Matrix &cb = bank.codebooks[q];
      std::size_t best = 0;
      double best_dot = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < cb.rows(); ++r) {
        const auto row = cb.row(r);
        double dot = 0.0;
        for (std::size_t c = 0; c < k; ++c) dot += row[c] * proj[c];
        if (dot > best_dot) {
          best_dot = dot;
          best = r;
        }
      }
      labels[q][i] = best;
    }
  }
  return labels;
}

/// Mean cross-entropy over heads and masked frames. head_logits[q] is
/// |masked| x V_cb.
inline double masked_prediction_loss(std::span<const Matrix> head_logits,
                                     const std::vector<std::vector<std::size_t>> &targets) {
  if (head_logits.size() != targets.size()) throw Error(Errc::ShapeMismatch, "head count differs");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t q = 0; q < head_logits.size(); ++q) {
    const Matrix &z = head_logits[q];
    if (z.rows() != targets[q].size()) throw Error(Errc::ShapeMismatch, "masked frame count differs");
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const auto row = z.row(i);
      const std::size_t target = targets[q][i];
      if (target >= row.size()) throw Error(Errc::ShapeMismatch, "target outside codebook");
      const double mx = *std::max_element(row.begin(), row.end());
      double sum = 0.0;
      for (double v : row) sum += std::exp(v - mx);
      total += mx + std::log(sum) - row[target];
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

}  // namespace asrkit
