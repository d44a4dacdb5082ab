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

// RNN-T loss and greedy decoding over a small, fully differentiable toy
// transducer:
//
//   prediction network   p_0 = s0,  p_u = tanh(W_pred p_{u-1} + emb[y_u])
//   joiner               z(t,u) = W_out tanh(E_t + p_u) + b_out
//   lattice              lp(t,u,:) = log_softmax(z(t,u))
//
// Three routes compute the same negative log-likelihood:
//   rnnt_loss_oracle          forward algorithm over the materialized lattice
//   enumerate_alignments_loss brute force over every monotonic path
//   rnnt_loss_sequential      time scan carrying alpha_t, plus an explicit
//                             reverse scan (beta_t) that backpropagates into
//                             every parameter without ever building the
//                             T x (U+1) x V lattice.
//
// Index 0 of the vocabulary is the blank symbol.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "asrkit/error.hpp"
#include "asrkit/io_util.hpp"
#include "asrkit/matrix.hpp"

namespace asrkit {

inline constexpr int kBlank = 0;

/// Log-domain zero. A finite sentinel keeps `-inf - -inf` from producing NaN.
inline constexpr double kLogZero = -1e30;

inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b <= 0.5 * kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

struct ToyTransducerModel {
  std::size_t vocab_size = 0;
  std::size_t hidden_dim = 0;
  Matrix encoder_out;              // T x d
  Matrix token_embeddings;         // V x d
  Matrix pred_recurrence;          // d x d
  std::vector<double> pred_init;   // d
  Matrix joiner_weight;            // V x d
  std::vector<double> joiner_bias; // V

  std::size_t frames() const { return encoder_out.rows(); }

  /// Zero-valued model (and gradient accumulator) of the given shape.
  static ToyTransducerModel zeros(std::size_t vocab, std::size_t dim, std::size_t frames) {
    ToyTransducerModel m;
    m.vocab_size = vocab;
    m.hidden_dim = dim;
    m.encoder_out = Matrix(frames, dim);
    m.token_embeddings = Matrix(vocab, dim);
    m.pred_recurrence = Matrix(dim, dim);
    m.pred_init.assign(dim, 0.0);
    m.joiner_weight = Matrix(vocab, dim);
    m.joiner_bias.assign(vocab, 0.0);
    return m;
  }

  void validate() const {
    const std::size_t V = vocab_size, d = hidden_dim;
    if (V < 2 || d < 1) throw Error(Errc::InvalidArgument, "model needs V >= 2 and d >= 1");
    auto shape = [](const Matrix &m, std::size_t r, std::size_t c) { return m.rows() == r && m.cols() == c; };
    if (encoder_out.cols() != d || !shape(token_embeddings, V, d) || !shape(pred_recurrence, d, d) ||
        pred_init.size() != d || !shape(joiner_weight, V, d) || joiner_bias.size() != V)
      throw Error(Errc::ShapeMismatch, "model fields disagree with V/d");
    for (double x : all_values()) {
      if (!std::isfinite(x)) throw Error(Errc::NonFinite, "model contains a non-finite value");
    }
  }

  /// Every scalar in declared field order.
  std::vector<double> all_values() const {
    std::vector<double> out;
    for_each_field([&](std::span<const double> f) { out.insert(out.end(), f.begin(), f.end()); });
    return out;
  }

  template <typename Fn>
  void for_each_field(Fn &&fn) const {
    fn(encoder_out.data());
    fn(token_embeddings.data());
    fn(pred_recurrence.data());
    fn(std::span<const double>(pred_init));
    fn(joiner_weight.data());
    fn(std::span<const double>(joiner_bias));
  }

  template <typename Fn>
  void for_each_field_mut(Fn &&fn) {
    fn(encoder_out.data());
    fn(token_embeddings.data());
    fn(pred_recurrence.data());
    fn(std::span<double>(pred_init));
    fn(joiner_weight.data());
    fn(std::span<double>(joiner_bias));
  }
};

inline const char *const kModelFieldNames[] = {"encoder_out", "token_embeddings", "pred_recurrence",
                                               "pred_init",   "joiner_weight",    "joiner_bias"};

/// Model with i.i.d. uniform(-scale, scale) entries.
inline ToyTransducerModel random_model(std::size_t vocab, std::size_t dim, std::size_t frames,
                                       std::mt19937_64 &rng, double scale = 1.0) {
  auto m = ToyTransducerModel::zeros(vocab, dim, frames);
  std::uniform_real_distribution<double> dist(-scale, scale);
  m.for_each_field_mut([&](std::span<double> f) {
    for (auto &x : f) x = dist(rng);
  });
  return m;
}

namespace rnnt_detail {

inline void check_labels(const ToyTransducerModel &m, std::span<const int> labels) {
  for (int y : labels)
    if (y <= kBlank || static_cast<std::size_t>(y) >= m.vocab_size)
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(y) + " not in [1, V)");
}

/// next = tanh(W_pred prev + emb[token])
inline void advance_state(const ToyTransducerModel &m, std::span<const double> prev, int token,
                          std::span<double> next) {
  const std::size_t d = m.hidden_dim;
  const auto emb = m.token_embeddings.row(static_cast<std::size_t>(token));
  for (std::size_t i = 0; i < d; ++i) {
    double acc = emb[i];
    const auto w = m.pred_recurrence.row(i);
    for (std::size_t j = 0; j < d; ++j) acc += w[j] * prev[j];
    next[i] = std::tanh(acc);
  }
}

/// h = tanh(enc + pred); z = W_out h + b_out
inline void joiner_logits(const ToyTransducerModel &m, std::span<const double> enc,
                          std::span<const double> pred, std::span<double> hidden, std::span<double> logits) {
  const std::size_t d = m.hidden_dim;
  for (std::size_t i = 0; i < d; ++i) hidden[i] = std::tanh(enc[i] + pred[i]);
  for (std::size_t k = 0; k < m.vocab_size; ++k) {
    const auto w = m.joiner_weight.row(k);
    double acc = m.joiner_bias[k];
    for (std::size_t i = 0; i < d; ++i) acc += w[i] * hidden[i];
    logits[k] = acc;
  }
}

inline void log_softmax_inplace(std::span<double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  for (auto &v : z) v -= lse;
}

/// Lowest index wins ties.
inline int argmax(std::span<const double> z) {
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

}  // namespace rnnt_detail

/// (U+1) x d matrix of prediction network states.
inline Matrix prediction_states(const ToyTransducerModel &m, std::span<const int> labels) {
  rnnt_detail::check_labels(m, labels);
  const std::size_t d = m.hidden_dim;
  Matrix p(labels.size() + 1, d);
  std::copy(m.pred_init.begin(), m.pred_init.end(), p.row(0).begin());
  for (std::size_t u = 1; u <= labels.size(); ++u)
    rnnt_detail::advance_state(m, p.row(u - 1), labels[u - 1], p.row(u));
  return p;
}

/// Fully materialized T x (U+1) x V log-probability lattice.
class Lattice {
 public:
  Lattice() = default;
  Lattice(std::size_t frames, std::size_t label_positions, std::size_t vocab)
      : frames_(frames), positions_(label_positions), vocab_(vocab),
        data_(frames * label_positions * vocab, 0.0) {}

  std::size_t frames() const { return frames_; }
  std::size_t positions() const { return positions_; }  // U + 1
  std::size_t vocab() const { return vocab_; }

  std::span<double> slice(std::size_t t, std::size_t u) {
    return {data_.data() + (t * positions_ + u) * vocab_, vocab_};
  }
  std::span<const double> slice(std::size_t t, std::size_t u) const {
    return {data_.data() + (t * positions_ + u) * vocab_, vocab_};
  }
  double operator()(std::size_t t, std::size_t u, std::size_t k) const {
    return data_[(t * positions_ + u) * vocab_ + k];
  }

 private:
  std::size_t frames_ = 0, positions_ = 0, vocab_ = 0;
  std::vector<double> data_;
};

inline Lattice full_lattice(const ToyTransducerModel &m, std::span<const int> labels) {
  m.validate();
  const Matrix pred = prediction_states(m, labels);
  Lattice lat(m.frames(), labels.size() + 1, m.vocab_size);
  std::vector<double> hidden(m.hidden_dim);
  for (std::size_t t = 0; t < m.frames(); ++t) {
    for (std::size_t u = 0; u <= labels.size(); ++u) {
      auto z = lat.slice(t, u);
      rnnt_detail::joiner_logits(m, m.encoder_out.row(t), pred.row(u), hidden, z);
      rnnt_detail::log_softmax_inplace(z);
    }
  }
  return lat;
}

/// Forward algorithm over a materialized lattice.
inline double rnnt_loss_oracle(const Lattice &lat, std::span<const int> labels) {
  const std::size_t T = lat.frames(), U = labels.size();
  if (lat.positions() != U + 1) throw Error(Errc::ShapeMismatch, "lattice does not match label count");
  if (T == 0) throw Error(Errc::InvalidArgument, "lattice has no frames");
  Matrix alpha(T, U + 1, kLogZero);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      if (t == 0 && u == 0) {
        alpha(0, 0) = 0.0;
        continue;
      }
      double from_blank = kLogZero, from_label = kLogZero;
      if (t > 0) from_blank = alpha(t - 1, u) + lat(t - 1, u, kBlank);
      if (u > 0) from_label = alpha(t, u - 1) + lat(t, u - 1, static_cast<std::size_t>(labels[u - 1]));
      alpha(t, u) = log_add_exp(from_blank, from_label);
    }
  }
  return -(alpha(T - 1, U) + lat(T - 1, U, kBlank));
}

/// Sums the probability of every monotonic path explicitly. Exponential in
/// T + U, hence the size guard.
inline double enumerate_alignments_loss(const Lattice &lat, std::span<const int> labels) {
  const std::size_t T = lat.frames(), U = labels.size();
  if (lat.positions() != U + 1) throw Error(Errc::ShapeMismatch, "lattice does not match label count");
  if (T == 0) throw Error(Errc::InvalidArgument, "lattice has no frames");
  if (T + U > 14) throw Error(Errc::TooLarge, "enumeration limited to T + U <= 14");

  std::vector<double> path_log_probs;
  auto walk = [&](auto &&self, std::size_t t, std::size_t u, double acc) -> void {
    if (t == T - 1 && u == U) {
      path_log_probs.push_back(acc + lat(t, u, kBlank));
      return;
    }
    if (u < U) self(self, t, u + 1, acc + lat(t, u, static_cast<std::size_t>(labels[u])));
    if (t < T - 1) self(self, t + 1, u, acc + lat(t, u, kBlank));
  };
  walk(walk, 0, 0, 0.0);

  const double mx = *std::max_element(path_log_probs.begin(), path_log_probs.end());
  double sum = 0.0;
  for (double lp : path_log_probs) sum += std::exp(lp - mx);
  return -(mx + std::log(sum));
}

struct LossResult {
  double loss = 0.0;
  ToyTransducerModel grads;  // same shapes as the model
};

struct SequentialLossOptions {
  /// Number of time steps whose joiner outputs are computed together before
  /// the alpha recursion consumes them. Results are identical for any value.
  std::size_t unroll = 1;
};

/// Time-scan RNN-T loss with an explicit reverse scan for the gradients.
///
/// Forward: for each t, joiner log-probabilities are computed for all u and
/// reduced to the blank/label entries the recursion needs; alpha_t is carried
/// to the next step and kept as the only per-step residual (T x (U+1)).
/// Backward: t runs from T-1 down to 0, carrying beta_{t+1}. Each step
/// recomputes the joiner at t, forms the occupation-weighted gradient of the
/// log-softmax and pushes it into W_out, b_out, E_t and the prediction state
/// accumulators. A final reverse pass over u backpropagates through the
/// prediction recurrence.
inline LossResult rnnt_loss_sequential(const ToyTransducerModel &m, std::span<const int> labels,
                                       SequentialLossOptions opts = {}) {
  using namespace rnnt_detail;
  m.validate();
  const std::size_t T = m.frames(), U = labels.size(), V = m.vocab_size, d = m.hidden_dim;
  if (T == 0) throw Error(Errc::InvalidArgument, "model has no encoder frames");
  const std::size_t unroll = std::max<std::size_t>(1, opts.unroll);

  const Matrix pred = prediction_states(m, labels);
  std::vector<double> hidden(d), logits(V);

  // ---- forward scan ----
  Matrix alpha(T, U + 1, kLogZero);
  std::vector<double> blank_block(unroll * (U + 1)), label_block(unroll * (U + 1), kLogZero);
  std::vector<double> prev_blank(U + 1, kLogZero);
  for (std::size_t t0 = 0; t0 < T; t0 += unroll) {
    const std::size_t t1 = std::min(T, t0 + unroll);
    for (std::size_t t = t0; t < t1; ++t) {
      const std::size_t k = t - t0;
      for (std::size_t u = 0; u <= U; ++u) {
        joiner_logits(m, m.encoder_out.row(t), pred.row(u), hidden, logits);
        log_softmax_inplace(logits);
        blank_block[k * (U + 1) + u] = logits[kBlank];
        label_block[k * (U + 1) + u] = u < U ? logits[static_cast<std::size_t>(labels[u])] : kLogZero;
      }
    }
    for (std::size_t t = t0; t < t1; ++t) {
      const std::size_t k = t - t0;
      for (std::size_t u = 0; u <= U; ++u) {
        if (t == 0 && u == 0) {
          alpha(0, 0) = 0.0;
          continue;
        }
        const double from_blank = t > 0 ? alpha(t - 1, u) + prev_blank[u] : kLogZero;
        const double from_label = u > 0 ? alpha(t, u - 1) + label_block[k * (U + 1) + u - 1] : kLogZero;
        alpha(t, u) = log_add_exp(from_blank, from_label);
      }
      std::copy_n(blank_block.begin() + static_cast<std::ptrdiff_t>(k * (U + 1)), U + 1, prev_blank.begin());
    }
  }
  const double log_likelihood = alpha(T - 1, U) + prev_blank[U];

  LossResult result;
  result.loss = -log_likelihood;
  result.grads = ToyTransducerModel::zeros(V, d, T);
  auto &g = result.grads;

  // ---- reverse scan (sequential BPTT) ----
  Matrix grad_pred(U + 1, d);
  Matrix step_lp(U + 1, V);  // joiner log-probs at the current t
  Matrix step_hidden(U + 1, d);
  std::vector<double> beta_next(U + 1, kLogZero), beta(U + 1, kLogZero);
  std::vector<double> dz(V), dh(d);
  for (std::size_t t = T; t-- > 0;) {
    for (std::size_t u = 0; u <= U; ++u) {
      auto z = step_lp.row(u);
      joiner_logits(m, m.encoder_out.row(t), pred.row(u), step_hidden.row(u), z);
      log_softmax_inplace(z);
    }
    // beta(t, u): log-prob of finishing from (t, u).
    for (std::size_t u = U + 1; u-- > 0;) {
      const double blank_lp = step_lp(u, kBlank);
      double via_blank;
      if (t == T - 1)
        via_blank = u == U ? blank_lp : kLogZero;
      else
        via_blank = beta_next[u] + blank_lp;
      const double via_label =
          u < U ? beta[u + 1] + step_lp(u, static_cast<std::size_t>(labels[u])) : kLogZero;
      beta[u] = log_add_exp(via_blank, via_label);
    }

    for (std::size_t u = 0; u <= U; ++u) {
      const auto lp = step_lp.row(u);
      const double a = alpha(t, u);
      const double next_blank = t == T - 1 ? (u == U ? 0.0 : kLogZero) : beta_next[u];
      const double c_blank = -std::exp(std::min(0.0, a + lp[kBlank] + next_blank - log_likelihood));
      double c_label = 0.0;
      std::size_t label = 0;
      if (u < U) {
        label = static_cast<std::size_t>(labels[u]);
        c_label = -std::exp(std::min(0.0, a + lp[label] + beta[u + 1] - log_likelihood));
      }
      if (c_blank == 0.0 && c_label == 0.0) continue;

      // d loss / d logits of log_softmax
      const double c_sum = c_blank + c_label;
      for (std::size_t k = 0; k < V; ++k) dz[k] = -std::exp(lp[k]) * c_sum;
      dz[kBlank] += c_blank;
      if (u < U) dz[label] += c_label;

      const auto h = step_hidden.row(u);
      std::fill(dh.begin(), dh.end(), 0.0);
      for (std::size_t k = 0; k < V; ++k) {
        g.joiner_bias[k] += dz[k];
        auto gw = g.joiner_weight.row(k);
        const auto w = m.joiner_weight.row(k);
        for (std::size_t i = 0; i < d; ++i) {
          gw[i] += dz[k] * h[i];
          dh[i] += dz[k] * w[i];
        }
      }
      auto ge = g.encoder_out.row(t);
      auto gp = grad_pred.row(u);
      for (std::size_t i = 0; i < d; ++i) {
        const double da = dh[i] * (1.0 - h[i] * h[i]);
        ge[i] += da;
        gp[i] += da;
      }
    }
    std::swap(beta, beta_next);
  }

  // ---- prediction network BPTT over u ----
  std::vector<double> carry(d);
  for (std::size_t u = U; u >= 1; --u) {
    const auto p = pred.row(u);
    const auto prev = pred.row(u - 1);
    auto gp = grad_pred.row(u);
    auto emb_grad = g.token_embeddings.row(static_cast<std::size_t>(labels[u - 1]));
    std::fill(carry.begin(), carry.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double pre = gp[i] * (1.0 - p[i] * p[i]);
      emb_grad[i] += pre;
      auto gw = g.pred_recurrence.row(i);
      const auto w = m.pred_recurrence.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        gw[j] += pre * prev[j];
        carry[j] += pre * w[j];
      }
    }
    auto gprev = grad_pred.row(u - 1);
    for (std::size_t j = 0; j < d; ++j) gprev[j] += carry[j];
  }
  for (std::size_t i = 0; i < d; ++i) g.pred_init[i] = grad_pred(0, i);

  if (!std::isfinite(result.loss)) throw Error(Errc::NonFinite, "loss is not finite");
  for (double x : g.all_values())
    if (!std::isfinite(x)) throw Error(Errc::NonFinite, "gradient is not finite");
  return result;
}

// ---------------------------------------------------------------------------
// Lattice memory model.

namespace rnnt_detail {
inline std::uint64_t checked_product(std::initializer_list<std::uint64_t> factors) {
  std::uint64_t acc = 1;
  for (auto f : factors) {
    if (f == 0) throw Error(Errc::InvalidArgument, "memory model factors must be positive");
    if (__builtin_mul_overflow(acc, f, &acc)) throw Error(Errc::Overflow, "byte count exceeds 64 bits");
  }
  return acc;
}
}  // namespace rnnt_detail

/// Bytes for a materialized B x T x U x V lattice.
inline std::uint64_t lattice_memory_bytes(std::uint64_t batch, std::uint64_t frames, std::uint64_t labels,
                                          std::uint64_t vocab, std::uint64_t bytes_per_element) {
  return rnnt_detail::checked_product({batch, frames, labels, vocab, bytes_per_element});
}

/// Bytes for one time step of the scan: B x U x V.
inline std::uint64_t sequential_memory_bytes(std::uint64_t batch, std::uint64_t labels, std::uint64_t vocab,
                                             std::uint64_t bytes_per_element) {
  return rnnt_detail::checked_product({batch, labels, vocab, bytes_per_element});
}

// ---------------------------------------------------------------------------
// Greedy decoding.

struct DecodeOptions {
  double frame_duration_s = 0.04;
  std::size_t max_tokens_per_frame = 5;
};

struct DecodeResult {
  std::vector<int> tokens;
  std::vector<std::size_t> frame_indices;
  std::vector<double> timestamps_s;

  bool operator==(const DecodeResult &) const = default;
};

/// Greedy RNN-T search over the model's own encoder frames.
inline DecodeResult greedy_decode(const ToyTransducerModel &m, DecodeOptions opts = {}) {
  using namespace rnnt_detail;
  m.validate();
  DecodeResult r;
  std::vector<double> state(m.pred_init), next(m.hidden_dim), hidden(m.hidden_dim), logits(m.vocab_size);
  for (std::size_t t = 0; t < m.frames(); ++t) {
    for (std::size_t emitted = 0; emitted < opts.max_tokens_per_frame; ++emitted) {
      joiner_logits(m, m.encoder_out.row(t), state, hidden, logits);
      const int best = argmax(logits);
      if (best == kBlank) break;
      r.tokens.push_back(best);
      r.frame_indices.push_back(t);
      r.timestamps_s.push_back(static_cast<double>(t) * opts.frame_duration_s);
      advance_state(m, state, best, next);
      state.swap(next);
    }
  }
  return r;
}

/// Decodes a batch of padded encoder outputs in lockstep over time. `params`
/// supplies every field except the encoder output (its encoder_out is
/// ignored). Frames at or beyond lengths[b] never emit.
inline std::vector<DecodeResult> batched_greedy_decode(const ToyTransducerModel &params,
                                                       std::span<const Matrix> padded_frames,
                                                       std::span<const std::size_t> lengths,
                                                       DecodeOptions opts = {}) {
  using namespace rnnt_detail;
  if (padded_frames.size() != lengths.size())
    throw Error(Errc::ShapeMismatch, "one length per batch item required");
  const std::size_t B = padded_frames.size(), d = params.hidden_dim, V = params.vocab_size;
  std::size_t max_t = 0;
  for (std::size_t b = 0; b < B; ++b) {
    if (padded_frames[b].cols() != d) throw Error(Errc::ShapeMismatch, "frame dimension differs from model");
    if (lengths[b] > padded_frames[b].rows()) throw Error(Errc::ShapeMismatch, "length exceeds padded frames");
    max_t = std::max(max_t, padded_frames[b].rows());
  }

  Matrix states(B, d), next(1, d), hidden(1, d), logits(1, V);
  for (std::size_t b = 0; b < B; ++b) std::copy(params.pred_init.begin(), params.pred_init.end(), states.row(b).begin());
  std::vector<DecodeResult> results(B);
  std::vector<char> active(B);
  std::vector<std::size_t> emitted(B);

  for (std::size_t t = 0; t < max_t; ++t) {
    std::size_t n_active = 0;
    for (std::size_t b = 0; b < B; ++b) {
      active[b] = t < lengths[b] && opts.max_tokens_per_frame > 0;
      emitted[b] = 0;
      n_active += active[b];
    }
    while (n_active > 0) {
      for (std::size_t b = 0; b < B; ++b) {
        if (!active[b]) continue;
        joiner_logits(params, padded_frames[b].row(t), states.row(b), hidden.row(0), logits.row(0));
        const int best = argmax(logits.row(0));
        if (best == kBlank) {
          active[b] = 0;
          --n_active;
          continue;
        }
        results[b].tokens.push_back(best);
        results[b].frame_indices.push_back(t);
        results[b].timestamps_s.push_back(static_cast<double>(t) * opts.frame_duration_s);
        advance_state(params, states.row(b), best, next.row(0));
        std::copy(next.row(0).begin(), next.row(0).end(), states.row(b).begin());
        if (++emitted[b] == opts.max_tokens_per_frame) {
          active[b] = 0;
          --n_active;
        }
      }
    }
  }
  return results;
}

// ---------------------------------------------------------------------------
// model.bin: int32 V, d, T; then float64 row-major fields in declared order
// (encoder_out, token_embeddings, pred_recurrence, pred_init, joiner_weight,
// joiner_bias). Little-endian throughout.

inline std::vector<std::uint8_t> serialize_model(const ToyTransducerModel &m) {
  m.validate();
  std::vector<std::uint8_t> out;
  le::append<std::int32_t>(out, static_cast<std::int32_t>(m.vocab_size));
  le::append<std::int32_t>(out, static_cast<std::int32_t>(m.hidden_dim));
  le::append<std::int32_t>(out, static_cast<std::int32_t>(m.frames()));
  for (double x : m.all_values()) le::append<double>(out, x);
  return out;
}

inline ToyTransducerModel deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw Error(Errc::Truncated, "model header needs 12 bytes");
  const auto V = le::load<std::int32_t>(bytes, 0);
  const auto d = le::load<std::int32_t>(bytes, 4);
  const auto T = le::load<std::int32_t>(bytes, 8);
  if (V < 2 || d < 1 || T < 0 || V > (1 << 20) || d > (1 << 16) || T > (1 << 24))
    throw Error(Errc::ParseError, "implausible model header");
  auto m = ToyTransducerModel::zeros(static_cast<std::size_t>(V), static_cast<std::size_t>(d),
                                     static_cast<std::size_t>(T));
  const std::size_t expected = 12 + m.all_values().size() * sizeof(double);
  if (bytes.size() < expected) throw Error(Errc::Truncated, "model body shorter than header implies");
  if (bytes.size() > expected) throw Error(Errc::ParseError, "trailing bytes after model body");
  std::size_t offset = 12;
  m.for_each_field_mut([&](std::span<double> f) {
    for (auto &x : f) {
      x = le::load<double>(bytes, offset);
      offset += sizeof(double);
    }
  });
  m.validate();
  return m;
}

}  // namespace asrkit
