// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vqinit/error.hpp"
#include "vqinit/util.hpp"
#include "vqinit/tasks.hpp"

namespace vqinit {
namespace {

std::vector<double> random_theta(const TaskInstance& task, Rng& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::vector<double> theta(static_cast<std::size_t>(task.layout.n_params()));
  for (auto& v : theta) v = angle(rng);
  return theta;
}

TEST(BuildTask, ParameterCountsPerFamily) {
  const int expected[] = {8, 8, 16, 24, 48};
  for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
    const TaskFamily f = kAllFamilies[i];
    const TaskInstance task = build_task(f, default_task_params(f));
    EXPECT_EQ(task.layout.n_params(), expected[i]) << family_id(f);
    EXPECT_EQ(family_param_count(f), expected[i]);
    EXPECT_NE(task.observable.has_value(), task.target_unitary.has_value());
  }
}

TEST(BuildTask, XyzTermsAndPrompt) {
  const TaskInstance task = build_task(TaskFamily::XYZ_1D, {{2.0, 1.0, 0.5}});
  EXPECT_EQ(task.observable->terms().size(), 12u);
  EXPECT_EQ(task.prompt, "(J_1, J_2, J_3) = (2, 1, 0.5)");
}

TEST(BuildTask, XyzIncludesPeriodicBond) {
  const TaskInstance task = build_task(TaskFamily::XYZ_1D, {{2.0, 1.0, 0.5}});
  bool found = false;
  for (const auto& t : task.observable->terms()) found |= t.ops.str() == "ZIIZ";
  EXPECT_TRUE(found);
}

TEST(BuildTask, FermiHubbardMatchesJordanWignerOracle) {
  const double hop = 0.5;
  const double u = 1.0;
  const TaskInstance task = build_task(TaskFamily::FH_1D, {{hop, u}});
  EXPECT_EQ(task.prompt, "(t, U) = (0.5, 1)");
  bool has_identity = false;
  for (const auto& t : task.observable->terms()) has_identity |= t.ops.is_identity() && t.coeff != 0;
  EXPECT_TRUE(has_identity);

  // Build -t (c_i^dag c_{i+1} + h.c.) + U n_i n_{i+1} from explicit
  // Jordan-Wigner fermion matrices.
  const int n = 4;
  const oracle::Mat lower = (oracle::pauli('X') + oracle::cplx(0, 1) * oracle::pauli('Y')) / 2.0;
  std::vector<oracle::Mat> c;
  for (int i = 0; i < n; ++i) {
    oracle::Mat m = oracle::Mat::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
      m = oracle::kron(m, k < i ? oracle::pauli('Z') : k == i ? lower : oracle::pauli('I'));
    }
    c.push_back(m);
  }
  oracle::Mat h = oracle::Mat::Zero(16, 16);
  for (int i = 0; i + 1 < n; ++i) {
    const auto& a = c[static_cast<std::size_t>(i)];
    const auto& b = c[static_cast<std::size_t>(i + 1)];
    h += -hop * (a.adjoint() * b + b.adjoint() * a);
    h += u * (a.adjoint() * a) * (b.adjoint() * b);
  }
  EXPECT_LT(oracle::max_abs(pauli_matrix(*task.observable) - h), 1e-12);
}

TEST(BuildTask, TfiGridHasTenEdges) {
  const TaskInstance task = build_task(TaskFamily::TFI_2D, {{0.2, 3.0}});
  int zz = 0;
  int z = 0;
  for (const auto& t : task.observable->terms()) {
    int count = 0;
    for (Pauli p : t.ops.ops()) count += p == Pauli::Z;
    zz += count == 2;
    z += count == 1;
  }
  EXPECT_EQ(zz, 10);
  EXPECT_EQ(z, 8);
}

TEST(BuildTask, XyzZeroCouplingsGiveZeroExpectation) {
  Rng rng(1);
  const TaskInstance task = build_task(TaskFamily::XYZ_1D, {{0.0, 0.0, 0.0}});
  for (const auto& t : task.observable->terms()) EXPECT_EQ(t.coeff, 0.0);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(task_loss(task, random_theta(task, rng)), 0.0);
}

TEST(BuildTask, ArityAndFamilyErrors) {
  EXPECT_THROW((void)build_task(TaskFamily::XYZ_1D, {{1.0, 2.0}}), Error);
  EXPECT_THROW((void)build_task(TaskFamily::FH_1D, {{1.0}}), Error);
  EXPECT_THROW((void)build_task(TaskFamily::Q_PULSE, {{1.0, 2.0, 3.0}}), Error);
  EXPECT_THROW((void)build_task(TaskFamily::RANDOM_VQE, {{1.0, 2.0, 3.0}}), Error);
  EXPECT_THROW((void)build_task(static_cast<TaskFamily>(42), {}), Error);
  EXPECT_THROW((void)parse_family("heisenberg"), Error);
}

TEST(BuildTask, Deterministic) {
  const TaskInstance a = build_task(TaskFamily::RANDOM_VQE, {}, 1234);
  const TaskInstance b = build_task(TaskFamily::RANDOM_VQE, {}, 1234);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.prompt, b.prompt);
  EXPECT_TRUE(a.params.size() == 5 || a.params.size() == 10);
  const TaskInstance p = build_task(TaskFamily::Q_PULSE, default_task_params(TaskFamily::Q_PULSE));
  const TaskInstance q = build_task(TaskFamily::Q_PULSE, default_task_params(TaskFamily::Q_PULSE));
  EXPECT_EQ(*p.target_unitary, *q.target_unitary);
}

TEST(TaskLoss, XyzAtZeroAnglesIsZzSum) {
  const TaskInstance task = build_task(TaskFamily::XYZ_1D, {{2.0, 1.0, 0.5}});
  EXPECT_NEAR(task_loss(task, std::vector<double>(8, 0.0)), 2.0, 1e-14);
}

TEST(TaskLoss, PulseExactReproductionIsZero) {
  // Without the control field the target is the drift alone, which the
  // layout reproduces at theta = 0.
  const TaskInstance task = build_task(TaskFamily::Q_PULSE, {{0.3, 0.2, 0.0, 1.0}});
  EXPECT_NEAR(task_loss(task, std::vector<double>(24, 0.0)), 0.0, 1e-14);
  const oracle::Mat h = oracle::hamiltonian({{0.3, "ZI"}, {0.2, "IZ"}});
  EXPECT_LT(oracle::max_abs(*task.target_unitary - oracle::expm_hermitian(h, 1.0)), 1e-12);
}

TEST(TaskLoss, PulseTargetMatchesOracle) {
  const TaskInstance task = build_task(TaskFamily::Q_PULSE, {{0.3, 0.2, 0.4, 1.5}});
  const oracle::Mat h = oracle::hamiltonian({{0.3, "ZI"}, {0.2, "IZ"}, {0.4, "XI"}});
  EXPECT_LT(oracle::max_abs(*task.target_unitary - oracle::expm_hermitian(h, 1.5)), 1e-12);
}

TEST(TaskLoss, ArityMismatchThrows) {
  const TaskInstance task = build_task(TaskFamily::TFI_2D, {{0.2, 3.0}});
  EXPECT_THROW((void)task_loss(task, std::vector<double>(8, 0.0)), Error);
}

TEST(TaskLoss, HamiltonianLossBoundedByGroundEnergy) {
  Rng rng(2);
  for (TaskFamily f : {TaskFamily::XYZ_1D, TaskFamily::FH_1D, TaskFamily::TFI_2D,
                       TaskFamily::RANDOM_VQE}) {
    const TaskInstance task = build_task(f, default_task_params(f));
    const double e0 = oracle::min_eigenvalue(pauli_matrix(*task.observable));
    for (int i = 0; i < 50; ++i) {
      EXPECT_GE(task_loss(task, random_theta(task, rng)), e0 - 1e-12) << family_id(f);
    }
  }
}

TEST(TaskLoss, PulseLossInUnitInterval) {
  Rng rng(3);
  const TaskInstance task = build_task(TaskFamily::Q_PULSE, default_task_params(TaskFamily::Q_PULSE));
  for (int i = 0; i < 200; ++i) {
    const double l = task_loss(task, random_theta(task, rng));
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 1.0);
  }
}

TEST(Conditioning, DirectPacking) {
  const auto xyz = conditioning_features(build_task(TaskFamily::XYZ_1D, {{2.0, 1.0, 0.5}}));
  EXPECT_EQ(xyz[0], 2.0);
  EXPECT_EQ(xyz[1], 1.0);
  EXPECT_EQ(xyz[2], 0.5);
  for (std::size_t i = 3; i < kConditioningDim; ++i) EXPECT_EQ(xyz[i], 0.0);

  const auto tfi = conditioning_features(build_task(TaskFamily::TFI_2D, {{0.2, 3.0}}));
  EXPECT_EQ(tfi[0], 0.2);
  EXPECT_EQ(tfi[1], 3.0);
  EXPECT_EQ(tfi[2], 0.0);
}

TEST(Conditioning, RandomVqeTermsFlattened) {
  const auto c = conditioning_features(
      build_task(TaskFamily::RANDOM_VQE, default_task_params(TaskFamily::RANDOM_VQE)));
  const ConditioningFeatures expected = {0.5, 0, 0, 3, 3, 1.0, 3, 1, 1, 3, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(c, expected);
}

TEST(Conditioning, OverflowRejected) {
  TaskInstance task = build_task(TaskFamily::XYZ_1D, {{2.0, 1.0, 0.5}});
  task.params.assign(17, 1.0);
  EXPECT_THROW((void)conditioning_features(task), Error);
}

TEST(Prompt, TableTexts) {
  EXPECT_EQ(prompt_text(build_task(TaskFamily::XYZ_1D, {{2.0, 1.0, 0.5}})),
            "(J_1, J_2, J_3) = (2, 1, 0.5)");
  EXPECT_EQ(prompt_text(build_task(TaskFamily::FH_1D, {{0.5, 1.0}})), "(t, U) = (0.5, 1)");
  EXPECT_EQ(prompt_text(build_task(TaskFamily::TFI_2D, {{0.2, 3.0}})), "(j, μ) = (0.2, 3)");
  EXPECT_EQ(prompt_text(build_task(TaskFamily::Q_PULSE, default_task_params(TaskFamily::Q_PULSE))),
            "h_0 = 0.3 ZI + 0.2 IZ; h_1 = 0.4 XI; U_t = e^{-iHt}");
  EXPECT_EQ(prompt_text(build_task(TaskFamily::RANDOM_VQE,
                                   default_task_params(TaskFamily::RANDOM_VQE))),
            "Hamiltonian = 0.5 · IIZZ + ZXXZ");
}

TEST(Prompt, FamilyIdsRoundTrip) {
  for (TaskFamily f : kAllFamilies) EXPECT_EQ(parse_family(family_id(f)), f);
}

}  // namespace
}  // namespace vqinit
