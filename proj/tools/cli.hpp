// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver for the dataset / train / sample / eval pipeline.
//
//   vqinit [--config FILE] [--workers N] [--output-dir DIR] <command> [flags]
//
// Commands: gen-dataset, split, train, sample, eval, compare, selftest.
// FILE is INI text; a [name] section sets the flags of command `name`, and
// flags given on the command line win. DIR defaults to $VQINIT_OUTPUT_DIR,
// then the current directory. Every command writes provenance_<command>.json
// into DIR.
//
// Exit codes:
//   0 success
//   1 runtime failure (numerical error, divergence, failed selftest)
//   2 usage error (unknown command or flag, malformed flag value)
//   3 file missing or unreadable / unwritable
//   4 configuration or argument violates a precondition
//   5 malformed, corrupted or version-mismatched data file

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vqinit/ddpm.hpp"
#include "vqinit/denoiser.hpp"
#include "vqinit/vqe_opt.hpp"

namespace vqinit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitConfig = 4,
  kExitFormat = 5,
};

/// Everything a pipeline run can be configured with. Defaults are the
/// published hyperparameters.
struct RunConfig {
  std::string family = "xyz";
  std::string records_path;
  std::string split_path;
  std::string checkpoint_path;
  std::string output_dir;
  int count = 200;
  std::uint64_t dataset_seed = 7;
  std::uint64_t split_seed = 11;
  double split_ratio = 0.7;
  std::uint64_t train_seed = 13;
  std::uint64_t eval_seed = 17;
  OptimizerConfig optimizer{};
  DiffusionConfig diffusion{};
  DenoiserArch arch{};
  int workers = 1;
};

/// Runs one command. `args` excludes the program name. Messages go to
/// `out`; a single-line cause goes to `err` on failure.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vqinit::cli
