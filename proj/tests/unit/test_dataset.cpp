// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <random>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vqinit/dataset.hpp"
#include "vqinit/error.hpp"
#include "vqinit/util.hpp"

namespace vqinit {
namespace {

OptimizerConfig short_cfg(int steps = 40) {
  OptimizerConfig cfg;
  cfg.max_steps = steps;
  return cfg;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
}

TEST(SampleTaskParams, SeededAndInRange) {
  Rng a(3);
  Rng b(3);
  EXPECT_EQ(sample_task_params(TaskFamily::FH_1D, a), sample_task_params(TaskFamily::FH_1D, b));

  Rng rng(4);
  std::array<std::vector<double>, 3> cols;
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_task_params(TaskFamily::XYZ_1D, rng);
    ASSERT_EQ(p.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_GE(p[k], 0.0);
      EXPECT_LE(p[k], 2.0);
      cols[k].push_back(p[k]);
    }
  }
  const double tol = 2.0 * 2.0 / std::sqrt(12.0 * 1000.0);
  for (const auto& c : cols) EXPECT_NEAR(oracle::moments(c).mean, 1.0, tol);
}

TEST(SampleTaskParams, EveryFamilyBuilds) {
  Rng rng(5);
  for (TaskFamily f : kAllFamilies) {
    for (int i = 0; i < 20; ++i) {
      const auto p = sample_task_params(f, rng);
      EXPECT_NO_THROW((void)build_task(f, p)) << family_id(f);
    }
  }
}

TEST(GenerateInstance, ZeroCouplingsStayPut) {
  const DatasetRecord r = generate_instance(TaskFamily::XYZ_1D, {{0.0, 0.0, 0.0}}, 8, short_cfg());
  EXPECT_EQ(r.final_loss, 0.0);
  const DatasetRecord r0 = generate_instance(TaskFamily::XYZ_1D, {{0.0, 0.0, 0.0}}, 8, short_cfg(0));
  EXPECT_EQ(r.theta_opt, r0.theta_opt);
}

TEST(GenerateInstance, XyzReachesGroundEnergy) {
  const DatasetRecord r = generate_instance(TaskFamily::XYZ_1D, {{2.0, 1.0, 0.5}}, 1, OptimizerConfig{});
  const double gap = oracle::kXyzMaxEnergy - oracle::kXyzGroundEnergy;
  EXPECT_LE(r.final_loss - oracle::kXyzGroundEnergy, 0.02 * gap);
  EXPECT_EQ(r.prompt, "(J_1, J_2, J_3) = (2, 1, 0.5)");
  EXPECT_EQ(r.generator_version, kGeneratorVersion);
}

TEST(GenerateInstance, Reproducible) {
  const auto a = generate_instance(TaskFamily::TFI_2D, {{0.2, 3.0}}, 17, short_cfg());
  const auto b = generate_instance(TaskFamily::TFI_2D, {{0.2, 3.0}}, 17, short_cfg());
  EXPECT_EQ(a, b);
}

TEST(GenerateDataset, IdsAndWorkerIndependence) {
  const auto a = generate_dataset(TaskFamily::FH_1D, 5, 3, short_cfg(), 1);
  ASSERT_EQ(a.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(a[static_cast<std::size_t>(i)].id, i);
  EXPECT_EQ(a, generate_dataset(TaskFamily::FH_1D, 5, 3, short_cfg(), 3));
  EXPECT_THROW((void)generate_dataset(TaskFamily::FH_1D, 0, 3, short_cfg()), Error);
}

TEST(GenerateDataset, RecordsRegenerateFromStoredFields) {
  for (TaskFamily f : kAllFamilies) {
    const auto records = generate_dataset(f, 3, 77, short_cfg(15));
    for (const auto& r : records) {
      const auto again = generate_instance(r.family, r.task_params, r.seed, short_cfg(15));
      EXPECT_EQ(again.theta_opt, r.theta_opt) << family_id(f);
      EXPECT_EQ(again.final_loss, task_loss(rebuild_task(r), r.theta_opt));
      EXPECT_EQ(r.theta_opt.size(), static_cast<std::size_t>(family_param_count(f)));
    }
  }
}

TEST(GenerateDataset, DeskScaleRunsQuickly) {
  const auto start = std::chrono::steady_clock::now();
  const auto records = generate_dataset(TaskFamily::XYZ_1D, kDeskScaleCount, 7, OptimizerConfig{});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(records.size(), 200u);
  EXPECT_LT(secs, 60.0);
}

TEST(Split, Counts) {
  const auto ten = generate_dataset(TaskFamily::XYZ_1D, 10, 1, short_cfg(2));
  const auto s = split_dataset(ten, 0.7, 11);
  EXPECT_EQ(s.train_ids.size(), 7u);
  EXPECT_EQ(s.test_ids.size(), 3u);
  const auto two = generate_dataset(TaskFamily::XYZ_1D, 2, 1, short_cfg(2));
  const auto t = split_dataset(two, 0.7, 11);
  EXPECT_EQ(t.train_ids.size(), 1u);
  EXPECT_EQ(t.test_ids.size(), 1u);
  EXPECT_THROW((void)split_dataset({ten[0]}, 0.7, 1), Error);
  EXPECT_THROW((void)split_dataset(ten, 1.0, 1), Error);
}

TEST(Split, DeterministicDisjointExhaustive) {
  const auto records = generate_dataset(TaskFamily::XYZ_1D, 37, 1, short_cfg(2));
  const auto a = split_dataset(records, 0.7, 5);
  EXPECT_EQ(a, split_dataset(records, 0.7, 5));
  EXPECT_NE(a.train_ids, split_dataset(records, 0.7, 6).train_ids);
  std::set<int> all(a.train_ids.begin(), a.train_ids.end());
  for (int id : a.test_ids) EXPECT_TRUE(all.insert(id).second);
  EXPECT_EQ(all.size(), 37u);
  EXPECT_LE(std::abs(static_cast<double>(a.train_ids.size()) - 0.7 * 37), 1.0);
}

TEST(RecordFile, RoundTrip) {
  oracle::TempDir dir;
  auto records = generate_dataset(TaskFamily::RANDOM_VQE, 3, 2, short_cfg(10));
  auto more = generate_dataset(TaskFamily::Q_PULSE, 2, 2, short_cfg(10));
  save_records(dir / "rv.jsonl", records);
  save_records(dir / "qp.jsonl", more);
  EXPECT_EQ(load_records(dir / "rv.jsonl"), records);
  EXPECT_EQ(load_records(dir / "qp.jsonl"), more);
  const auto text = oracle::slurp(dir / "rv.jsonl");
  EXPECT_EQ(lines_of(text).size(), 3u);
  EXPECT_NE(text.find("\"checksum\""), std::string::npos);
}

TEST(RecordFile, CorruptedLineNamed) {
  oracle::TempDir dir;
  const auto records = generate_dataset(TaskFamily::XYZ_1D, 4, 2, short_cfg(10));
  save_records(dir / "r.jsonl", records);
  auto lines = lines_of(oracle::slurp(dir / "r.jsonl"));

  auto tampered = lines;
  const auto pos = tampered[2].find("\"final_loss\":");
  ASSERT_NE(pos, std::string::npos);
  tampered[2].insert(pos + 13, "1");
  write_lines(dir / "t.jsonl", tampered);
  try {
    (void)load_records(dir / "t.jsonl");
    FAIL() << "expected a load error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }

  auto truncated = lines;
  truncated[1].resize(truncated[1].size() / 2);
  write_lines(dir / "u.jsonl", truncated);
  try {
    (void)load_records(dir / "u.jsonl");
    FAIL() << "expected a load error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(RecordFile, NewerSchemaRejectedExplicitly) {
  oracle::TempDir dir;
  const auto records = generate_dataset(TaskFamily::XYZ_1D, 1, 2, short_cfg(5));
  save_records(dir / "r.jsonl", records);
  auto lines = lines_of(oracle::slurp(dir / "r.jsonl"));
  const auto pos = lines[0].find("\"schema\":1");
  ASSERT_NE(pos, std::string::npos);
  lines[0].replace(pos, 10, "\"schema\":2");
  write_lines(dir / "r2.jsonl", lines);
  try {
    (void)load_records(dir / "r2.jsonl");
    FAIL() << "expected a version error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find("newer"), std::string::npos) << e.what();
  }
}

TEST(RecordFile, InvariantViolationRejected) {
  oracle::TempDir dir;
  auto records = generate_dataset(TaskFamily::XYZ_1D, 2, 2, short_cfg(5));
  records[1].final_loss += 1e-6;  // checksum is recomputed on save
  save_records(dir / "r.jsonl", records);
  EXPECT_THROW((void)load_records(dir / "r.jsonl"), Error);
  EXPECT_THROW((void)load_records(dir / "missing.jsonl"), Error);
}

TEST(Manifests, RoundTrip) {
  oracle::TempDir dir;
  const auto records = generate_dataset(TaskFamily::XYZ_1D, 6, 2, short_cfg(2));
  DatasetManifest m;
  m.count = 6;
  m.master_seed = 2;
  m.optimizer = short_cfg(2);
  save_manifest(dir / "m.json", m);
  auto back = load_manifest(dir / "m.json");
  EXPECT_EQ(back.count, 6);
  EXPECT_FALSE(back.split.has_value());
  m.split = split_dataset(records, 0.7, 3);
  save_manifest(dir / "m.json", m);
  back = load_manifest(dir / "m.json");
  EXPECT_EQ(back.split, m.split);
  EXPECT_EQ(back.optimizer.max_steps, 2);

  save_split(dir / "s.json", *m.split);
  EXPECT_EQ(load_split(dir / "s.json"), *m.split);
  EXPECT_EQ(select_records(records, m.split->test_ids).size(), m.split->test_ids.size());
  EXPECT_THROW((void)select_records(records, {99}), Error);
}

TEST(Manifests, OverlappingSplitRejected) {
  oracle::TempDir dir;
  SplitManifest s;
  s.train_ids = {0, 1, 2};
  s.test_ids = {2, 3};
  save_split(dir / "s.json", s);
  EXPECT_THROW((void)load_split(dir / "s.json"), Error);
}

}  // namespace
}  // namespace vqinit
