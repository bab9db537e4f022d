// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Initializer evaluation: initial loss and convergence steps over a test
// set, scheme comparison and report files.
//
// Report files written by emit_report (all CSV with a header row):
//   comparison.csv            family, scheme_a, scheme_b, n_instances,
//                             initial_loss_a, initial_loss_b, delta_initial_loss,
//                             steps_a, steps_b, delta_steps_pct
//   initial_losses_<s>.csv    id, initial_loss, converged_step (empty if none)
//   histogram_<s>.csv         bin_low, bin_high, count (bins shared by schemes)
//   loss_curve_<s>.csv        step, mean, min, max (max_steps + 1 rows)
// Numbers use the shortest decimal form that parses back exactly.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vqinit/dataset.hpp"
#include "vqinit/ddpm.hpp"
#include "vqinit/vqe_opt.hpp"

namespace vqinit {

/// Produces the initial angles for one test instance.
using Initializer = std::function<ParamVector(const DatasetRecord&, const TaskInstance&)>;

/// theta ~ U[-pi, pi) from a per-record stream of `seed`.
[[nodiscard]] Initializer random_initializer(std::uint64_t seed);

/// One guided diffusion sample per record, decoded to angles. The
/// checkpoint is copied into the returned callable.
[[nodiscard]] Initializer model_initializer(const Checkpoint& ckpt, std::uint64_t seed);

struct EvalMetrics {
  std::string scheme;
  TaskFamily family = TaskFamily::XYZ_1D;
  int max_steps = 0;
  std::vector<int> instance_ids;
  std::vector<double> initial_losses;
  /// Converged step per instance, or max_steps when it never converged.
  std::vector<int> convergence_steps;
  std::vector<std::optional<int>> converged;
  std::vector<std::vector<double>> trajectories;
  double mean_initial_loss = 0.0;
  double mean_convergence_steps = 0.0;
};

[[nodiscard]] EvalMetrics evaluate_initializer(const std::vector<DatasetRecord>& test,
                                               const std::string& scheme,
                                               const Initializer& init,
                                               const OptimizerConfig& cfg, int workers = 1);

struct ComparisonRow {
  TaskFamily family = TaskFamily::XYZ_1D;
  std::string scheme_a;
  std::string scheme_b;
  int n_instances = 0;
  double initial_loss_a = 0.0;
  double initial_loss_b = 0.0;
  /// a - b; positive means b starts lower.
  double delta_initial_loss = 0.0;
  double steps_a = 0.0;
  double steps_b = 0.0;
  /// 100 (a - b) / a; positive means b converges sooner.
  double delta_steps_pct = 0.0;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

[[nodiscard]] ComparisonRow compare_schemes(const EvalMetrics& a, const EvalMetrics& b);

/// Writes the files listed above into `dir` and returns their paths.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir,
                                               const ComparisonReport& report,
                                               const std::vector<EvalMetrics>& metrics,
                                               int histogram_bins = 20);

[[nodiscard]] ComparisonReport read_comparison_csv(const std::filesystem::path& path);

inline constexpr int kMetricsSchemaVersion = 1;

void save_metrics(const std::filesystem::path& path, const EvalMetrics& metrics);
[[nodiscard]] EvalMetrics load_metrics(const std::filesystem::path& path);

}  // namespace vqinit
