// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vqinit/tasks.hpp"

namespace vqinit {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment buffers for bias-corrected Adam.
struct AdamState {
  explicit AdamState(std::size_t dim, AdamHyper hyper = {})
      : hyper(hyper), m(dim, 0.0), v(dim, 0.0) {}

  AdamHyper hyper;
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

/// One Adam update of `params` in place with learning rate `lr`.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               double lr);

struct OptimizerConfig {
  double learning_rate = 0.05;
  AdamHyper adam{};
  int max_steps = 500;
  /// Convergence window w and tolerance tau: see detect_convergence.
  int window = 10;
  double tolerance = 1e-4;

  void validate() const;
};

struct Trajectory {
  /// losses[0] is the initial loss; one entry per optimizer step after it.
  std::vector<double> losses;
  ParamVector final_theta;
  std::optional<int> converged_step;
};

/// dL/dtheta_k = [L(theta + pi/2 e_k) - L(theta - pi/2 e_k)] / 2.
[[nodiscard]] std::vector<double> parameter_shift_grad(const TaskInstance& task,
                                                       std::span<const double> theta);

/// Smallest s >= w with max(losses[s-w..s]) - min(losses[s-w..s]) < tau.
[[nodiscard]] std::optional<int> detect_convergence(std::span<const double> losses, int window,
                                                    double tolerance);

/// Adam on parameter-shift gradients for exactly cfg.max_steps steps.
[[nodiscard]] Trajectory optimize(const TaskInstance& task, std::span<const double> theta0,
                                  const OptimizerConfig& cfg);

}  // namespace vqinit
