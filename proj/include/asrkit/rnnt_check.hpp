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

// Randomized cross-checks of the three loss routes and of the analytic
// gradients against central finite differences.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "asrkit/transducer.hpp"

namespace asrkit {

struct RnntCheckConfig {
  std::size_t trials = 200;
  std::size_t max_t = 20;
  std::size_t max_u = 10;
  std::size_t max_v = 16;
  std::size_t max_d = 8;
  std::size_t enum_trials = 50;
  std::size_t enum_max_t_plus_u = 12;
  std::size_t grad_trials = 20;
  double fd_step = 1e-4;
  std::uint64_t seed = 0;

  double loss_rel_tol = 1e-6;
  double enum_abs_tol = 1e-9;
  double grad_rel_tol = 1e-4;
};

struct RnntCheckReport {
  std::size_t trials = 0;
  double max_loss_rel_err = 0.0;
  std::size_t enum_trials = 0;
  double max_enum_abs_err = 0.0;
  std::size_t grad_trials = 0;
  std::size_t grad_entries = 0;
  double max_grad_rel_err = 0.0;
  bool passed = false;
};

struct RnntInstance {
  ToyTransducerModel model;
  std::vector<int> labels;
};

inline RnntInstance make_rnnt_instance(std::mt19937_64 &rng, std::size_t frames, std::size_t label_count,
                                       std::size_t vocab, std::size_t dim, double scale = 1.0) {
  RnntInstance inst{random_model(vocab, dim, frames, rng, scale), {}};
  std::uniform_int_distribution<int> label(1, static_cast<int>(vocab) - 1);
  for (std::size_t u = 0; u < label_count; ++u) inst.labels.push_back(label(rng));
  return inst;
}

/// T in [1, max_t], U in [0, max_u], V in [2, max_v], d in [1, max_d].
inline RnntInstance random_rnnt_instance(std::mt19937_64 &rng, std::size_t max_t, std::size_t max_u,
                                         std::size_t max_v, std::size_t max_d, double scale = 1.0) {
  auto draw = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  const std::size_t T = draw(1, std::max<std::size_t>(1, max_t));
  const std::size_t U = draw(0, max_u);
  const std::size_t V = draw(2, std::max<std::size_t>(2, max_v));
  const std::size_t d = draw(1, std::max<std::size_t>(1, max_d));
  return make_rnnt_instance(rng, T, U, V, d, scale);
}

/// |a - b| / max(|a|, |b|, floor). The floor keeps gradients that are zero
/// up to rounding from dominating the relative measure.
inline double gradient_rel_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline RnntCheckReport run_rnnt_check(const RnntCheckConfig &cfg) {
  RnntCheckReport rep;
  std::mt19937_64 rng(cfg.seed);

  for (std::size_t i = 0; i < cfg.trials; ++i) {
    auto inst = random_rnnt_instance(rng, cfg.max_t, cfg.max_u, cfg.max_v, cfg.max_d);
    const double oracle = rnnt_loss_oracle(full_lattice(inst.model, inst.labels), inst.labels);
    const double seq = rnnt_loss_sequential(inst.model, inst.labels).loss;
    rep.max_loss_rel_err = std::max(rep.max_loss_rel_err, std::abs(seq - oracle) / std::max(oracle, 1e-12));
    ++rep.trials;
  }

  for (std::size_t i = 0; i < cfg.enum_trials; ++i) {
    const std::size_t budget = std::max<std::size_t>(2, cfg.enum_max_t_plus_u);
    const std::size_t T = std::uniform_int_distribution<std::size_t>(1, budget - 1)(rng);
    const std::size_t U = std::uniform_int_distribution<std::size_t>(0, budget - T)(rng);
    const std::size_t V = std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, cfg.max_v))(rng);
    const std::size_t d = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, cfg.max_d))(rng);
    const auto inst = make_rnnt_instance(rng, T, U, V, d);

    const Lattice lat = full_lattice(inst.model, inst.labels);
    const double dp = rnnt_loss_oracle(lat, inst.labels);
    const double brute = enumerate_alignments_loss(lat, inst.labels);
    const double seq = rnnt_loss_sequential(inst.model, inst.labels).loss;
    rep.max_enum_abs_err = std::max({rep.max_enum_abs_err, std::abs(dp - brute), std::abs(seq - brute)});
    ++rep.enum_trials;
  }

  for (std::size_t i = 0; i < cfg.grad_trials; ++i) {
    auto inst = random_rnnt_instance(rng, 6, 4, 6, 4);
    const auto analytic = rnnt_loss_sequential(inst.model, inst.labels).grads.all_values();
    auto probe = inst.model;
    std::size_t flat = 0;
    probe.for_each_field_mut([&](std::span<double> field) {
      for (auto &x : field) {
        const double saved = x;
        x = saved + cfg.fd_step;
        const double up = rnnt_loss_oracle(full_lattice(probe, inst.labels), inst.labels);
        x = saved - cfg.fd_step;
        const double down = rnnt_loss_oracle(full_lattice(probe, inst.labels), inst.labels);
        x = saved;
        const double numeric = (up - down) / (2.0 * cfg.fd_step);
        rep.max_grad_rel_err = std::max(rep.max_grad_rel_err, gradient_rel_error(analytic[flat], numeric));
        ++flat;
      }
    });
    rep.grad_entries += flat;
    ++rep.grad_trials;
  }

  rep.passed = rep.max_loss_rel_err <= cfg.loss_rel_tol && rep.max_enum_abs_err <= cfg.enum_abs_tol &&
               rep.max_grad_rel_err <= cfg.grad_rel_tol;
  return rep;
}

}  // namespace asrkit
