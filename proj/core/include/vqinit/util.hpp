// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace vqinit {

using Rng = std::mt19937_64;

inline constexpr const char* kGeneratorVersion = "vqinit-0.1.0";

/// SplitMix64 finalizer. Used to derive independent child seeds from a
/// master seed and a counter, so results never depend on iteration order.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] std::string format_double(double value);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// handled exactly once; callers write into per-index slots and reduce in
/// index order afterwards, so results do not depend on the worker count.
/// The first exception thrown by any fn(i) is rethrown on the caller.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace vqinit
