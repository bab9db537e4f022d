// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Qubit x depth grid view of an ansatz parameter vector.
//
// Row q holds the parameters of the rotations acting on qubit q, packed
// left to right in gate order. Entangling gates carry no parameters and take
// no columns, so the depth axis is as compact as the layout allows.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vqinit/quantum_sim.hpp"

namespace vqinit {

struct ParamGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major, rows * cols
  std::vector<std::uint8_t> mask;

  [[nodiscard]] double at(int q, int c) const {
    return values[static_cast<std::size_t>(q * cols + c)];
  }
  [[nodiscard]] bool occupied(int q, int c) const {
    return mask[static_cast<std::size_t>(q * cols + c)] != 0;
  }
  [[nodiscard]] std::size_t occupied_count() const;
};

/// Cell (row, col) of every parameter index.
struct GridMap {
  int rows = 0;
  int cols = 0;
  std::vector<std::pair<int, int>> cell_of_param;
};

[[nodiscard]] GridMap grid_map(const CircuitLayout& layout);

/// Mask-only grid for a layout, all values zero.
[[nodiscard]] ParamGrid empty_grid(const CircuitLayout& layout);

[[nodiscard]] ParamGrid encode_grid(const CircuitLayout& layout, std::span<const double> theta);
[[nodiscard]] ParamVector decode_grid(const CircuitLayout& layout, const ParamGrid& grid);

enum class AngleDirection { kForward, kInverse };

/// Forward wraps occupied cells into [-pi, pi) and divides by pi; inverse
/// multiplies by pi without unwrapping. Unoccupied cells stay zero.
[[nodiscard]] ParamGrid normalize_angles(const ParamGrid& grid, AngleDirection direction);

/// Wraps a single angle into [-pi, pi).
[[nodiscard]] double wrap_angle(double theta);

/// Occupied cells in row-major order; this is the denoiser's input vector.
[[nodiscard]] std::vector<double> occupied_values(const ParamGrid& grid);

/// Inverse of occupied_values for a given mask; unoccupied cells are zero.
[[nodiscard]] ParamGrid grid_from_occupied(const ParamGrid& shape, std::span<const double> values);

}  // namespace vqinit
