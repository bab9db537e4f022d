// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Diffusion over normalized parameter vectors: schedule, forward noising,
// the noise-prediction objective, guided reverse sampling and training.
//
// Vectors here are the occupied cells of a normalized ParamGrid (see
// occupied_values), so masked cells never see noise.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vqinit/dataset.hpp"
#include "vqinit/denoiser.hpp"
#include "vqinit/encoding.hpp"
#include "vqinit/error.hpp"
#include "vqinit/util.hpp"

namespace vqinit {

struct DiffusionConfig {
  int timesteps = 100;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  double guidance = 10.0;
  double p_guidance = 0.1;
  int epochs = 500;
  double learning_rate = 5e-5;
  int batch_size = 64;

  void validate() const;
  friend bool operator==(const DiffusionConfig&, const DiffusionConfig&) = default;
};

/// Timesteps run 1..T. Index 0 of each table holds the t = 0 identity
/// values (beta 0, alpha 1, alpha_bar 1).
class NoiseSchedule {
 public:
  NoiseSchedule(std::vector<double> betas);

  [[nodiscard]] int steps() const { return static_cast<int>(beta_.size()) - 1; }
  [[nodiscard]] double beta(int t) const;
  [[nodiscard]] double alpha(int t) const;
  [[nodiscard]] double alpha_bar(int t) const;

 private:
  void check(int t) const;
  std::vector<double> beta_, alpha_, alpha_bar_;
};

/// beta_t = beta_1 + (t - 1)(beta_T - beta_1)/(T - 1).
[[nodiscard]] NoiseSchedule linear_schedule(const DiffusionConfig& cfg);

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
[[nodiscard]] std::vector<double> forward_sample(std::span<const double> x0, int t,
                                                 std::span<const double> eps,
                                                 const NoiseSchedule& sched);

/// Grid form: eps must be zero on masked cells; masked output cells are 0.
[[nodiscard]] ParamGrid forward_sample(const ParamGrid& x0, int t, const ParamGrid& eps,
                                       const NoiseSchedule& sched);

/// One Markov step x_t = sqrt(alpha_t) x_{t-1} + sqrt(beta_t) z.
[[nodiscard]] std::vector<double> forward_step(std::span<const double> x_prev, int t,
                                               std::span<const double> z,
                                               const NoiseSchedule& sched);

/// (1 - g) eps_uncond + g eps_cond: the usual eps_u + g (eps_c - eps_u)
/// rearranged so g = 1 and g = 0 reproduce the inputs exactly.
[[nodiscard]] std::vector<double> combine_guidance(std::span<const double> eps_uncond,
                                                   std::span<const double> eps_cond, double g);

[[nodiscard]] std::vector<double> cfg_epsilon(const NoisePredictor& model,
                                              std::span<const double> x_t, int t,
                                              const ConditioningFeatures& cond, double g);

/// Posterior mean (x_t - beta_t / sqrt(1 - abar_t) eps_hat) / sqrt(alpha_t).
[[nodiscard]] std::vector<double> reverse_mean(std::span<const double> x_t, int t,
                                               std::span<const double> eps_hat,
                                               const NoiseSchedule& sched);

/// reverse_mean plus sqrt(beta_t) z with z ~ N(0, I); no noise at t = 1.
[[nodiscard]] std::vector<double> reverse_step(std::span<const double> x_t, int t,
                                               std::span<const double> eps_hat,
                                               const NoiseSchedule& sched, Rng& rng);

/// Runs the guided reverse chain from x_T ~ N(0, I) on the occupied cells
/// of `shape` and returns the normalized grid x_0.
[[nodiscard]] ParamGrid sample_parameters(const NoisePredictor& model, const ParamGrid& shape,
                                          const ConditioningFeatures& cond,
                                          const NoiseSchedule& sched, double g, Rng& rng);

/// Converts a normalized sample back to ansatz angles.
[[nodiscard]] ParamVector decode_sample(const CircuitLayout& layout, const ParamGrid& sample);

struct TrainingItem {
  std::vector<double> x0;
  ConditioningFeatures cond{};
};

/// Random quantities of one training item.
struct NoiseDraw {
  int t = 1;
  std::vector<double> eps;
  bool drop_condition = false;
};

[[nodiscard]] std::vector<NoiseDraw> draw_noise(std::span<const TrainingItem> batch,
                                                const NoiseSchedule& sched, double p_guidance,
                                                Rng& rng);

/// Mean over items and cells of (eps - model(x_t, t, c))^2.
[[nodiscard]] double denoising_loss(const NoisePredictor& model,
                                    std::span<const TrainingItem> batch,
                                    std::span<const NoiseDraw> draws, const NoiseSchedule& sched);

struct StepResult {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Loss and exact parameter gradient. Items are processed in fixed-size
/// chunks and reduced in order, so the result is independent of `workers`.
[[nodiscard]] StepResult denoising_loss_grad(const Denoiser& model,
                                             std::span<const TrainingItem> batch,
                                             std::span<const NoiseDraw> draws,
                                             const NoiseSchedule& sched, int workers = 1);

/// draw_noise followed by denoising_loss_grad.
[[nodiscard]] StepResult training_step(const Denoiser& model, std::span<const TrainingItem> batch,
                                       const NoiseSchedule& sched, const DiffusionConfig& cfg,
                                       Rng& rng, int workers = 1);

/// peak * (1 + cos(pi * epoch / epochs)) / 2.
[[nodiscard]] double cosine_learning_rate(double peak, int epoch, int epochs);

/// Architecture used for a family: default widths with the input sized to
/// the family's occupied cell count.
[[nodiscard]] DenoiserArch default_arch(TaskFamily family, int timesteps = 100);

/// Normalized occupied-cell vectors and conditioning of the records.
[[nodiscard]] std::vector<TrainingItem> training_items(const std::vector<DatasetRecord>& records);

struct TrainResult {
  Denoiser model;
  std::vector<double> loss_history;
};

/// Thrown when an epoch's mean loss exceeds the divergence limit.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& msg, std::vector<double> history)
      : Error(ErrorKind::kNumerical, msg), history_(std::move(history)) {}
  [[nodiscard]] const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

inline constexpr double kDivergenceLoss = 1e3;

/// Adam with per-epoch cosine decay; one recorded mean loss per epoch.
[[nodiscard]] TrainResult train_model(const std::vector<DatasetRecord>& train,
                                      const DiffusionConfig& cfg, const DenoiserArch& arch,
                                      std::uint64_t seed, int workers = 1);

inline constexpr int kCheckpointSchemaVersion = 1;

struct Checkpoint {
  TaskFamily family = TaskFamily::XYZ_1D;
  DiffusionConfig config{};
  DenoiserArch arch{};
  std::uint64_t seed = 0;
  std::vector<double> weights;
  std::vector<double> loss_history;
  std::string generator_version = kGeneratorVersion;

  [[nodiscard]] Denoiser model() const { return Denoiser(arch, weights); }
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vqinit
