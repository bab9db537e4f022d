// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Quick invariant checks against independent dense references, run by the
// `selftest` command.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vqinit {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

[[nodiscard]] std::vector<SelftestResult> run_selftest(std::uint64_t seed = 0x5e1f);

}  // namespace vqinit
