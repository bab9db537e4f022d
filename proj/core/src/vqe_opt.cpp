// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/vqe_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vqinit/error.hpp"
#include "vqinit/util.hpp"

namespace vqinit {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               double lr) {
  if (params.size() != grad.size() || params.size() != state.m.size()) {
    fail(ErrorKind::kInvalidArgument, "Adam dimension mismatch: params " +
                                          std::to_string(params.size()) + ", grad " +
                                          std::to_string(grad.size()) + ", state " +
                                          std::to_string(state.m.size()));
  }
  const auto& h = state.hyper;
  ++state.step;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * grad[i];
    state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
  }
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) fail(ErrorKind::kInvalidArgument, "learning rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "Adam betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) fail(ErrorKind::kInvalidArgument, "Adam epsilon must be positive");
  if (window < 1) fail(ErrorKind::kInvalidArgument, "convergence window must be >= 1");
  if (max_steps < 0) fail(ErrorKind::kInvalidArgument, "max_steps must be non-negative");
  if (!(tolerance > 0.0)) fail(ErrorKind::kInvalidArgument, "convergence tolerance must be positive");
}

std::vector<double> parameter_shift_grad(const TaskInstance& task,
                                         std::span<const double> theta) {
  if (theta.size() != static_cast<std::size_t>(task.layout.n_params())) {
    fail(ErrorKind::kInvalidArgument, "gradient expects " +
                                          std::to_string(task.layout.n_params()) +
                                          " parameters, got " + std::to_string(theta.size()));
  }
  // The shift rule is exact only for exp(-i theta P / 2) generators.
  for (const auto& g : task.layout.gates()) {
    if (g.is_parameterized() && !g.is_rotation()) {
      fail(ErrorKind::kInvalidArgument,
           "parameter shift unsupported for gate " + std::string(gate_name(g.kind)));
    }
  }
  constexpr double kShift = std::numbers::pi / 2.0;
  std::vector<double> shifted(theta.begin(), theta.end());
  std::vector<double> grad(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    shifted[k] = theta[k] + kShift;
    const double plus = task_loss(task, shifted);
    shifted[k] = theta[k] - kShift;
    const double minus = task_loss(task, shifted);
    shifted[k] = theta[k];
    grad[k] = 0.5 * (plus - minus);
  }
  return grad;
}

std::optional<int> detect_convergence(std::span<const double> losses, int window,
                                      double tolerance) {
  if (window < 1) fail(ErrorKind::kInvalidArgument, "convergence window must be >= 1");
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t s = w; s < losses.size(); ++s) {
    const auto first = losses.begin() + static_cast<std::ptrdiff_t>(s - w);
    const auto last = losses.begin() + static_cast<std::ptrdiff_t>(s + 1);
    const auto [lo, hi] = std::minmax_element(first, last);
    if (*hi - *lo < tolerance) return static_cast<int>(s);
  }
  return std::nullopt;
}

Trajectory optimize(const TaskInstance& task, std::span<const double> theta0,
                    const OptimizerConfig& cfg) {
  cfg.validate();
  if (theta0.size() != static_cast<std::size_t>(task.layout.n_params())) {
    fail(ErrorKind::kInvalidArgument, "optimize expects " +
                                          std::to_string(task.layout.n_params()) +
                                          " parameters, got " + std::to_string(theta0.size()));
  }
  Trajectory traj;
  traj.final_theta.assign(theta0.begin(), theta0.end());
  traj.losses.reserve(static_cast<std::size_t>(cfg.max_steps) + 1);

  auto record = [&](int step) {
    const double loss = task_loss(task, traj.final_theta);
    if (!std::isfinite(loss)) {
      fail(ErrorKind::kNumerical, "non-finite loss at optimizer step " + std::to_string(step));
    }
    traj.losses.push_back(loss);
  };

  record(0);
  AdamState adam(theta0.size(), cfg.adam);
  for (int step = 1; step <= cfg.max_steps; ++step) {
    const auto grad = parameter_shift_grad(task, traj.final_theta);
    adam_step(adam, traj.final_theta, grad, cfg.learning_rate);
    record(step);
  }
  traj.converged_step = detect_convergence(traj.losses, cfg.window, cfg.tolerance);
  return traj;
}

}  // namespace vqinit
