// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vqinit/error.hpp"
#include "vqinit/util.hpp"
#include "vqinit/eval.hpp"

namespace vqinit {
namespace {

OptimizerConfig short_cfg(int steps) {
  OptimizerConfig cfg;
  cfg.max_steps = steps;
  return cfg;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(oracle::slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

Checkpoint fresh_checkpoint(TaskFamily family) {
  Checkpoint ck;
  ck.family = family;
  ck.arch = default_arch(family);
  ck.arch.hidden = 16;
  ck.arch.blocks = 1;
  const Denoiser m = Denoiser::init(ck.arch, 3);
  ck.weights.assign(m.params().begin(), m.params().end());
  return ck;
}

TEST(Evaluate, PulseRandomInitialLossNearOne) {
  const auto test = generate_dataset(TaskFamily::Q_PULSE, 40, 9, short_cfg(2));
  const auto m = evaluate_initializer(test, "random", random_initializer(17), short_cfg(1));
  EXPECT_GE(m.mean_initial_loss, 0.9);
  EXPECT_LE(m.mean_initial_loss, 1.0);
}

TEST(Evaluate, StoredOptimumConvergesImmediately) {
  const auto test = generate_dataset(TaskFamily::XYZ_1D, 4, 9, short_cfg(5));
  const Initializer zero_couplings = [](const DatasetRecord&, const TaskInstance& task) {
    return ParamVector(static_cast<std::size_t>(task.layout.n_params()), 0.3);
  };
  // XYZ(0, 0, 0) has a flat landscape, so any start is already optimal.
  auto flat = test;
  for (auto& r : flat) {
    r.task_params = {0.0, 0.0, 0.0};
    r.conditioning = conditioning_features(rebuild_task(r));
    r.prompt = rebuild_task(r).prompt;
  }
  const OptimizerConfig cfg = short_cfg(50);
  const auto m = evaluate_initializer(flat, "stub", zero_couplings, cfg);
  for (int s : m.convergence_steps) EXPECT_EQ(s, cfg.window);
  EXPECT_EQ(m.mean_convergence_steps, cfg.window);
}

TEST(Evaluate, EmptyAndMixedSetsRejected) {
  EXPECT_THROW((void)evaluate_initializer({}, "random", random_initializer(1), short_cfg(3)), Error);
  auto mixed = generate_dataset(TaskFamily::XYZ_1D, 1, 1, short_cfg(2));
  const auto other = generate_dataset(TaskFamily::FH_1D, 1, 1, short_cfg(2));
  mixed.push_back(other[0]);
  EXPECT_THROW((void)evaluate_initializer(mixed, "random", random_initializer(1), short_cfg(3)), Error);
}

TEST(Evaluate, MetricsConsistentAndRecordsUntouched) {
  const auto test = generate_dataset(TaskFamily::FH_1D, 6, 4, short_cfg(20));
  const auto copy = test;
  const auto m = evaluate_initializer(test, "random", random_initializer(5), short_cfg(60), 2);
  EXPECT_EQ(test, copy);
  double sum_loss = 0.0;
  double sum_steps = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    EXPECT_EQ(m.instance_ids[i], test[i].id);
    EXPECT_EQ(m.trajectories[i].front(), m.initial_losses[i]);
    EXPECT_EQ(m.trajectories[i].size(), 61u);
    EXPECT_EQ(m.convergence_steps[i], m.converged[i].value_or(60));
    sum_loss += m.initial_losses[i];
    sum_steps += m.convergence_steps[i];
  }
  EXPECT_NEAR(m.mean_initial_loss, sum_loss / 6, 1e-12);
  EXPECT_NEAR(m.mean_convergence_steps, sum_steps / 6, 1e-12);

  const auto again = evaluate_initializer(test, "random", random_initializer(5), short_cfg(60), 1);
  EXPECT_EQ(again.initial_losses, m.initial_losses);
  EXPECT_EQ(again.trajectories, m.trajectories);
}

TEST(Evaluate, ModelInitializerDeterministicAndFamilyChecked) {
  const auto test = generate_dataset(TaskFamily::XYZ_1D, 3, 4, short_cfg(5));
  const Checkpoint ck = fresh_checkpoint(TaskFamily::XYZ_1D);
  const Checkpoint keep = ck;
  const auto a = evaluate_initializer(test, "diffq", model_initializer(ck, 19), short_cfg(5));
  const auto b = evaluate_initializer(test, "diffq", model_initializer(ck, 19), short_cfg(5));
  EXPECT_EQ(a.initial_losses, b.initial_losses);
  EXPECT_EQ(ck.weights, keep.weights);
  const auto fh = generate_dataset(TaskFamily::FH_1D, 1, 4, short_cfg(5));
  EXPECT_THROW((void)evaluate_initializer(fh, "diffq", model_initializer(ck, 19), short_cfg(5)), Error);
}

TEST(Compare, IdenticalMetricsGiveZeroDeltas) {
  const auto test = generate_dataset(TaskFamily::XYZ_1D, 3, 4, short_cfg(5));
  const auto m = evaluate_initializer(test, "random", random_initializer(5), short_cfg(30));
  const ComparisonRow row = compare_schemes(m, m);
  EXPECT_EQ(row.delta_initial_loss, 0.0);
  EXPECT_EQ(row.delta_steps_pct, 0.0);
  EXPECT_EQ(row.n_instances, 3);
}

TEST(Compare, TableDeltas) {
  EvalMetrics a;
  a.scheme = "random";
  a.family = TaskFamily::TFI_2D;
  a.instance_ids = {1, 2};
  a.mean_convergence_steps = 235.93;
  a.mean_initial_loss = -3.23;
  EvalMetrics b = a;
  b.scheme = "diffq";
  b.mean_convergence_steps = 180.83;
  b.mean_initial_loss = -12.18;
  const ComparisonRow row = compare_schemes(a, b);
  EXPECT_NEAR(row.delta_steps_pct, 23.4, 0.05);
  EXPECT_NEAR(row.delta_initial_loss, 8.95, 1e-12);

  b.instance_ids = {1, 3};
  EXPECT_THROW((void)compare_schemes(a, b), Error);
  b.instance_ids = a.instance_ids;
  b.family = TaskFamily::XYZ_1D;
  EXPECT_THROW((void)compare_schemes(a, b), Error);
}

TEST(Report, FilesRoundTripAndCurvesBracketed) {
  oracle::TempDir dir;
  const auto test = generate_dataset(TaskFamily::XYZ_1D, 5, 4, short_cfg(5));
  const OptimizerConfig cfg = short_cfg(80);
  const auto a = evaluate_initializer(test, "random", random_initializer(5), cfg);
  const auto b = evaluate_initializer(test, "random-2", random_initializer(6), cfg);
  ComparisonReport report;
  report.rows.push_back(compare_schemes(a, b));
  const auto files = emit_report(dir.path(), report, {a, b}, 7);
  EXPECT_EQ(files.size(), 7u);
  EXPECT_EQ(read_comparison_csv(dir / "comparison.csv"), report);

  for (const std::string tag : {"random", "random-2"}) {
    const auto curve = read_csv(dir / ("loss_curve_" + tag + ".csv"));
    ASSERT_EQ(curve.size(), static_cast<std::size_t>(cfg.max_steps) + 2);  // header + rows
    EXPECT_EQ(curve[0], (std::vector<std::string>{"step", "mean", "min", "max"}));
    for (std::size_t r = 1; r < curve.size(); ++r) {
      const double mean = std::stod(curve[r][1]);
      EXPECT_LE(std::stod(curve[r][2]), mean);
      EXPECT_LE(mean, std::stod(curve[r][3]));
    }
    const auto hist = read_csv(dir / ("histogram_" + tag + ".csv"));
    ASSERT_EQ(hist.size(), 8u);
    int total = 0;
    for (std::size_t r = 1; r < hist.size(); ++r) total += std::stoi(hist[r][2]);
    EXPECT_EQ(total, 5);
    const auto per = read_csv(dir / ("initial_losses_" + tag + ".csv"));
    EXPECT_EQ(per.size(), 6u);
  }
  // Bins are shared so the two histograms are comparable.
  const auto ha = read_csv(dir / "histogram_random.csv");
  const auto hb = read_csv(dir / "histogram_random-2.csv");
  for (std::size_t r = 1; r < ha.size(); ++r) EXPECT_EQ(ha[r][0], hb[r][0]);
}

TEST(Report, MalformedComparisonRejected) {
  oracle::TempDir dir;
  std::ofstream(dir / "c.csv") << "family,scheme_a\nxyz,random\n";
  EXPECT_THROW((void)read_comparison_csv(dir / "c.csv"), Error);
}

TEST(Metrics, SaveLoadRoundTrip) {
  oracle::TempDir dir;
  const auto test = generate_dataset(TaskFamily::XYZ_1D, 2, 4, short_cfg(5));
  const auto m = evaluate_initializer(test, "random", random_initializer(5), short_cfg(30));
  save_metrics(dir / "m.json", m);
  const auto back = load_metrics(dir / "m.json");
  EXPECT_EQ(back.initial_losses, m.initial_losses);
  EXPECT_EQ(back.trajectories, m.trajectories);
  EXPECT_EQ(back.converged, m.converged);
  EXPECT_EQ(back.mean_convergence_steps, m.mean_convergence_steps);
  EXPECT_EQ(back.scheme, m.scheme);
}

}  // namespace
}  // namespace vqinit
