// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "oracles.hpp"
#include "vqinit/dataset.hpp"
#include "vqinit/eval.hpp"

namespace vqinit::cli {
namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

CliRun gen(const oracle::TempDir& dir, const std::string& name, const std::string& n = "4") {
  return run({"--output-dir", dir.path().string(), "gen-dataset", "--family", "xyz", "--n", n,
              "--seed", "3", "--max-steps", "20", "--out", (dir / name).string()});
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  const CliRun r = run({"gen-dataset", "--bogus", "1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);
  EXPECT_EQ(run({"gen-dataset", "--n", "many"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, MissingFileIsIoError) {
  oracle::TempDir dir;
  const CliRun r = run({"--output-dir", dir.path().string(), "split", "--records",
                     (dir / "nope.jsonl").string()});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("nope.jsonl"), std::string::npos);
}

TEST(Cli, PreconditionViolationIsConfigError) {
  oracle::TempDir dir;
  EXPECT_EQ(run({"--output-dir", dir.path().string(), "gen-dataset", "--n", "0"}).code,
            kExitConfig);
  EXPECT_EQ(run({"--output-dir", dir.path().string(), "gen-dataset", "--family", "ising"}).code,
            kExitConfig);
  ASSERT_EQ(gen(dir, "r.jsonl").code, kExitOk);
  EXPECT_EQ(run({"--output-dir", dir.path().string(), "split", "--records",
                 (dir / "r.jsonl").string(), "--ratio", "1.5"})
                .code,
            kExitConfig);
}

TEST(Cli, CorruptedFileIsFormatError) {
  oracle::TempDir dir;
  ASSERT_EQ(gen(dir, "r.jsonl").code, kExitOk);
  std::string text = oracle::slurp(dir / "r.jsonl");
  text[text.find("\"final_loss\":") + 13] = 'x';
  std::ofstream(dir / "bad.jsonl", std::ios::binary) << text;
  const CliRun r = run({"--output-dir", dir.path().string(), "split", "--records",
                     (dir / "bad.jsonl").string()});
  EXPECT_EQ(r.code, kExitFormat);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
}

TEST(Cli, GenDatasetIsBitReproducible) {
  oracle::TempDir dir;
  ASSERT_EQ(gen(dir, "a.jsonl").code, kExitOk);
  ASSERT_EQ(gen(dir, "b.jsonl").code, kExitOk);
  EXPECT_EQ(oracle::slurp(dir / "a.jsonl"), oracle::slurp(dir / "b.jsonl"));
  EXPECT_EQ(load_records(dir / "a.jsonl").size(), 4u);
  EXPECT_TRUE(std::filesystem::exists(dir / "xyz_manifest.json"));
}

TEST(Cli, ProvenanceRecordsConfigAndOutputs) {
  oracle::TempDir dir;
  ASSERT_EQ(gen(dir, "r.jsonl").code, kExitOk);
  const auto j = nlohmann::json::parse(oracle::slurp(dir / "provenance_gen-dataset.json"));
  EXPECT_EQ(j["command"], "gen-dataset");
  EXPECT_EQ(j["config"]["optimizer"]["max_steps"], 20);
  EXPECT_EQ(j["generator_version"], kGeneratorVersion);
  ASSERT_FALSE(j["outputs"].empty());
}

TEST(Cli, EvalAndCompareOnIdenticalMetrics) {
  oracle::TempDir dir;
  const std::string d = dir.path().string();
  ASSERT_EQ(gen(dir, "r.jsonl", "6").code, kExitOk);
  ASSERT_EQ(run({"--output-dir", d, "split", "--records", (dir / "r.jsonl").string()}).code,
            kExitOk);
  ASSERT_EQ(run({"--output-dir", d, "eval", "--records", (dir / "r.jsonl").string(), "--split",
                 (dir / "split.json").string(), "--scheme", "random", "--max-steps", "30"})
                .code,
            kExitOk);
  const std::string m = (dir / "metrics_random.json").string();
  const CliRun r = run({"--output-dir", d, "compare", "--a", m, "--b", m});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto report = read_comparison_csv(dir / "comparison.csv");
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(report.rows[0].delta_initial_loss, 0.0);
  EXPECT_EQ(report.rows[0].delta_steps_pct, 0.0);
  EXPECT_EQ(report.rows[0].n_instances, 2);
}

TEST(Cli, EvalDiffqNeedsCheckpoint) {
  oracle::TempDir dir;
  ASSERT_EQ(gen(dir, "r.jsonl").code, kExitOk);
  EXPECT_EQ(run({"--output-dir", dir.path().string(), "eval", "--records",
                 (dir / "r.jsonl").string(), "--scheme", "diffq"})
                .code,
            kExitConfig);
}

TEST(Cli, TrainAndSampleSmallModel) {
  oracle::TempDir dir;
  const std::string d = dir.path().string();
  ASSERT_EQ(gen(dir, "r.jsonl").code, kExitOk);
  const CliRun t = run({"--output-dir", d, "train", "--records", (dir / "r.jsonl").string(),
                     "--epochs", "3", "--hidden", "16", "--blocks", "1"});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "loss_history.csv"));
  const CliRun s = run({"--output-dir", d, "sample", "--checkpoint", (dir / "checkpoint.json").string(),
                     "--params", "2,1,0.5"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_NE(s.out.find("initial loss"), std::string::npos);
  EXPECT_EQ(run({"--output-dir", d, "train", "--family", "fh", "--records",
                 (dir / "r.jsonl").string(), "--epochs", "1"})
                .code,
            kExitConfig);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  oracle::TempDir dir;
  std::ofstream(dir / "run.ini") << "[gen-dataset]\nfamily=xyz\nn=3\nmax-steps=5\nseed=9\n";
  const std::string d = dir.path().string();
  ASSERT_EQ(run({"--config", (dir / "run.ini").string(), "--output-dir", d, "gen-dataset", "--out",
                 (dir / "a.jsonl").string()})
                .code,
            kExitOk);
  EXPECT_EQ(load_records(dir / "a.jsonl").size(), 3u);
  ASSERT_EQ(run({"--config", (dir / "run.ini").string(), "--output-dir", d, "gen-dataset", "--n",
                 "2", "--out", (dir / "b.jsonl").string()})
                .code,
            kExitOk);
  EXPECT_EQ(load_records(dir / "b.jsonl").size(), 2u);
  const auto j = nlohmann::json::parse(oracle::slurp(dir / "provenance_gen-dataset.json"));
  EXPECT_EQ(j["config"]["optimizer"]["max_steps"], 5);
  EXPECT_EQ(run({"--config", (dir / "missing.ini").string(), "selftest"}).code, kExitIo);
}

TEST(Cli, OutputDirFromEnvironment) {
  oracle::TempDir dir;
  ::setenv("VQINIT_OUTPUT_DIR", dir.path().string().c_str(), 1);
  const CliRun r = run({"gen-dataset", "--n", "2", "--max-steps", "3"});
  ::unsetenv("VQINIT_OUTPUT_DIR");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "xyz_records.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "provenance_gen-dataset.json"));
}

TEST(Cli, SelftestPasses) {
  oracle::TempDir dir;
  const CliRun r = run({"--output-dir", dir.path().string(), "selftest"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace vqinit::cli
