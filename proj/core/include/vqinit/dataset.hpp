// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Corpora of optimized ansatz parameters.
//
// Record files are JSON Lines: one object per line with the fields
//   schema, id, family, task_params, seed, prompt, conditioning, theta_opt,
//   final_loss, converged_step (integer or null), generator_version, checksum
// Floating-point values use the shortest decimal form that round-trips to
// the same double. `checksum` is the FNV-1a 64-bit hash (16 hex digits) of
// the compact serialization of the object without the checksum field.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vqinit/tasks.hpp"
#include "vqinit/util.hpp"
#include "vqinit/vqe_opt.hpp"

namespace vqinit {

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;

struct DatasetRecord {
  int id = 0;
  TaskFamily family = TaskFamily::XYZ_1D;
  std::vector<double> task_params;
  std::uint64_t seed = 0;
  std::string prompt;
  ConditioningFeatures conditioning{};
  ParamVector theta_opt;
  double final_loss = 0.0;
  std::optional<int> converged_step;
  std::string generator_version = kGeneratorVersion;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

struct SplitManifest {
  std::vector<int> train_ids;
  std::vector<int> test_ids;
  std::uint64_t seed = 0;
  double ratio = 0.7;

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

/// Provenance of a generated corpus, written next to the record file.
struct DatasetManifest {
  TaskFamily family = TaskFamily::XYZ_1D;
  int count = 0;
  std::uint64_t master_seed = 0;
  OptimizerConfig optimizer{};
  std::string generator_version = kGeneratorVersion;
  std::optional<SplitManifest> split;
};

/// Instance counts of the full published corpora.
[[nodiscard]] int full_scale_count(TaskFamily family);
/// Small corpus size that trains in minutes on one core.
inline constexpr int kDeskScaleCount = 200;

/// Uniform draws from ranges that contain every representative prompt:
///   XYZ J_k in [0,2]; FH t in [0.1,1], U in [0,2]; TFI j in [0,1], mu in
///   [0,4]; Q_PULSE h0 in [0,0.5]^2, h1 in [0.1,0.5], t in [0.5,2];
///   RANDOM_VQE 1-2 random weighted Pauli strings.
[[nodiscard]] std::vector<double> sample_task_params(TaskFamily family, Rng& rng);

/// Builds the task, draws theta0 ~ U[-pi, pi) from `seed` and optimizes.
[[nodiscard]] DatasetRecord generate_instance(TaskFamily family, std::span<const double> params,
                                              std::uint64_t seed, const OptimizerConfig& cfg);

/// Seed of instance i, derived from the master seed by counter.
[[nodiscard]] std::uint64_t instance_seed(std::uint64_t master_seed, int index);

/// n records with ids 0..n-1. Output is independent of `workers`.
[[nodiscard]] std::vector<DatasetRecord> generate_dataset(TaskFamily family, int n,
                                                          std::uint64_t master_seed,
                                                          const OptimizerConfig& cfg,
                                                          int workers = 1);

/// Seeded uniform shuffle; the first floor(ratio * n) ids form the train set.
[[nodiscard]] SplitManifest split_dataset(const std::vector<DatasetRecord>& records,
                                          double ratio, std::uint64_t seed);

/// Rebuilds the task a record was generated from.
[[nodiscard]] TaskInstance rebuild_task(const DatasetRecord& record);

void save_records(const std::filesystem::path& path, const std::vector<DatasetRecord>& records);

/// Validates schema version, checksum and record invariants, including
/// final_loss against the rebuilt task within 1e-9. Errors name the line.
[[nodiscard]] std::vector<DatasetRecord> load_records(const std::filesystem::path& path);

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
[[nodiscard]] DatasetManifest load_manifest(const std::filesystem::path& path);

void save_split(const std::filesystem::path& path, const SplitManifest& split);
[[nodiscard]] SplitManifest load_split(const std::filesystem::path& path);

/// Records whose ids appear in `ids`, in the order of `ids`.
[[nodiscard]] std::vector<DatasetRecord> select_records(const std::vector<DatasetRecord>& records,
                                                        const std::vector<int>& ids);

}  // namespace vqinit
