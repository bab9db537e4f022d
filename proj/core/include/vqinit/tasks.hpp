// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// The five benchmark task families: Hamiltonian or target construction,
// fixed ansatz layouts, losses, prompt text and numeric conditioning.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vqinit/quantum_sim.hpp"

namespace vqinit {

enum class TaskFamily { XYZ_1D, FH_1D, TFI_2D, Q_PULSE, RANDOM_VQE };

inline constexpr std::array<TaskFamily, 5> kAllFamilies = {
    TaskFamily::XYZ_1D, TaskFamily::FH_1D, TaskFamily::TFI_2D, TaskFamily::Q_PULSE,
    TaskFamily::RANDOM_VQE};

/// Short identifier used in files and on the command line: xyz, fh, tfi,
/// qpulse, random_vqe.
[[nodiscard]] std::string_view family_id(TaskFamily family);
[[nodiscard]] TaskFamily parse_family(std::string_view id);

/// Ansatz parameter count per family: 8 / 8 / 16 / 24 / 48.
[[nodiscard]] int family_param_count(TaskFamily family);

inline constexpr std::size_t kConditioningDim = 16;
using ConditioningFeatures = std::array<double, kConditioningDim>;

/// Number of real values per RANDOM_VQE term in the parameter vector:
/// coefficient followed by four Pauli codes (I=0, X=1, Y=2, Z=3).
inline constexpr std::size_t kRandomTermWidth = 5;
inline constexpr int kRandomVqeQubits = 4;

struct TaskInstance {
  TaskFamily family = TaskFamily::XYZ_1D;
  /// Explicit family parameters. For RANDOM_VQE this holds the flattened
  /// Hamiltonian terms even when they were drawn from the seed.
  std::vector<double> params;
  std::uint64_t seed = 0;
  std::optional<Observable> observable;
  std::optional<DenseMatrix> target_unitary;
  CircuitLayout layout{1, {}, 0};
  std::string prompt;
};

/// Builds an instance. Parameter arity per family:
///   XYZ_1D     (J1, J2, J3)
///   FH_1D      (t, U)
///   TFI_2D     (j, mu)
///   Q_PULSE    (h0_ZI, h0_IZ, h1_XI, t)
///   RANDOM_VQE empty (draw 1-2 terms from seed) or 5 or 10 values
[[nodiscard]] TaskInstance build_task(TaskFamily family, std::span<const double> params,
                                      std::uint64_t seed = 0);

/// Energy for Hamiltonian families; 1 - F^2 with F = gate_fidelity for
/// Q_PULSE.
[[nodiscard]] double task_loss(const TaskInstance& task, std::span<const double> theta);

[[nodiscard]] ConditioningFeatures conditioning_features(const TaskInstance& task);

[[nodiscard]] std::string prompt_text(const TaskInstance& task);

/// Table values used as representative defaults for each family.
[[nodiscard]] std::vector<double> default_task_params(TaskFamily family);

}  // namespace vqinit
