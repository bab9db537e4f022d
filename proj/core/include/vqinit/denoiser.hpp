// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Conditional residual MLP that predicts the noise added to a parameter
// vector, with a hand-written backward pass.
//
//   h0  = W_in x + b_in + W_t pe(t) + b_t + W_c2 e + b_c2
//   e   = silu(W_c1 c + b_c1), or the learned null embedding
//   h_k+1 = h_k + W2_k silu(W1_k h_k + b1_k) + b2_k      (k < blocks)
//   y   = W_out silu(h_blocks) + b_out
//
// All weights live in one flat vector; matrices are row-major (out x in).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vqinit/tasks.hpp"

namespace vqinit {

struct DenoiserArch {
  int input_dim = 8;
  int hidden = 128;
  int blocks = 4;
  int time_dim = 32;
  int cond_dim = 32;
  /// Largest timestep the embedding accepts.
  int timesteps = 100;

  void validate() const;
  [[nodiscard]] std::size_t param_count() const;

  friend bool operator==(const DenoiserArch&, const DenoiserArch&) = default;
};

/// Offsets of every tensor inside the flat parameter vector.
struct DenoiserLayout {
  explicit DenoiserLayout(const DenoiserArch& arch);

  std::size_t w_in, b_in, w_t, b_t, w_c1, b_c1, null_emb, w_c2, b_c2;
  std::vector<std::size_t> w1, b1, w2, b2;
  std::size_t w_out, b_out;
  std::size_t total;
};

/// (sin(t w_k), cos(t w_k)) pairs with w_k = 10000^(-2k/dim).
[[nodiscard]] std::vector<double> sinusoidal_embed(int t, int dim, int max_t);

[[nodiscard]] double silu(double x);
[[nodiscard]] double silu_grad(double x);

/// Anything that predicts noise for a noisy vector. `cond == nullptr`
/// selects the unconditional (null) path.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;
  [[nodiscard]] virtual std::vector<double> predict(std::span<const double> x_t, int t,
                                                    const ConditioningFeatures* cond) const = 0;
};

class Denoiser final : public NoisePredictor {
 public:
  Denoiser(DenoiserArch arch, std::vector<double> params);

  /// He-normal hidden weights, zero biases, zero output projection and a
  /// N(0, 1/cond_dim) null embedding.
  [[nodiscard]] static Denoiser init(const DenoiserArch& arch, std::uint64_t seed);

  [[nodiscard]] const DenoiserArch& arch() const { return arch_; }
  [[nodiscard]] const DenoiserLayout& layout() const { return layout_; }
  [[nodiscard]] std::span<const double> params() const { return params_; }
  [[nodiscard]] std::span<double> mutable_params() { return params_; }

  [[nodiscard]] std::vector<double> forward(std::span<const double> x_t, int t,
                                            const ConditioningFeatures* cond) const;

  [[nodiscard]] std::vector<double> predict(std::span<const double> x_t, int t,
                                            const ConditioningFeatures* cond) const override {
    return forward(x_t, t, cond);
  }

  /// Gradient of <upstream, forward(...)> with respect to the parameters.
  [[nodiscard]] std::vector<double> backward(std::span<const double> x_t, int t,
                                             const ConditioningFeatures* cond,
                                             std::span<const double> upstream) const;

  /// Same as backward but adds into `grad` (length param_count()).
  void backward_accumulate(std::span<const double> x_t, int t, const ConditioningFeatures* cond,
                           std::span<const double> upstream, std::span<double> grad) const;

 private:
  struct Cache;
  void run_forward(std::span<const double> x_t, int t, const ConditioningFeatures* cond,
                   Cache& cache) const;

  DenoiserArch arch_;
  DenoiserLayout layout_;
  std::vector<double> params_;
};

}  // namespace vqinit
