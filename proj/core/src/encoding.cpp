// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vqinit/error.hpp"

namespace vqinit {

std::size_t ParamGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

GridMap grid_map(const CircuitLayout& layout) {
  GridMap map;
  map.rows = layout.n_qubits();
  map.cell_of_param.resize(static_cast<std::size_t>(layout.n_params()));
  std::vector<int> next_col(static_cast<std::size_t>(layout.n_qubits()), 0);
  for (const auto& g : layout.gates()) {
    if (!g.is_parameterized()) continue;
    int& col = next_col[static_cast<std::size_t>(g.target)];
    map.cell_of_param[static_cast<std::size_t>(*g.param)] = {g.target, col};
    ++col;
  }
  map.cols = next_col.empty() ? 0 : *std::max_element(next_col.begin(), next_col.end());
  return map;
}

ParamGrid empty_grid(const CircuitLayout& layout) {
  const GridMap map = grid_map(layout);
  ParamGrid grid;
  grid.rows = map.rows;
  grid.cols = map.cols;
  grid.values.assign(static_cast<std::size_t>(map.rows * map.cols), 0.0);
  grid.mask.assign(grid.values.size(), 0);
  for (auto [q, c] : map.cell_of_param) grid.mask[static_cast<std::size_t>(q * map.cols + c)] = 1;
  return grid;
}

ParamGrid encode_grid(const CircuitLayout& layout, std::span<const double> theta) {
  if (theta.size() != static_cast<std::size_t>(layout.n_params())) {
    fail(ErrorKind::kInvalidArgument, "encode_grid expects " + std::to_string(layout.n_params()) +
                                          " parameters, got " + std::to_string(theta.size()));
  }
  const GridMap map = grid_map(layout);
  ParamGrid grid = empty_grid(layout);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto [q, c] = map.cell_of_param[k];
    grid.values[static_cast<std::size_t>(q * map.cols + c)] = theta[k];
  }
  return grid;
}

ParamVector decode_grid(const CircuitLayout& layout, const ParamGrid& grid) {
  const GridMap map = grid_map(layout);
  if (grid.rows != map.rows || grid.cols != map.cols ||
      grid.values.size() != static_cast<std::size_t>(map.rows * map.cols)) {
    fail(ErrorKind::kInvalidArgument,
         "grid shape " + std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
             " does not match layout shape " + std::to_string(map.rows) + "x" +
             std::to_string(map.cols));
  }
  ParamVector theta(map.cell_of_param.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto [q, c] = map.cell_of_param[k];
    theta[k] = grid.values[static_cast<std::size_t>(q * map.cols + c)];
  }
  return theta;
}

double wrap_angle(double theta) {
  constexpr double kPi = std::numbers::pi;
  // remainder is exact and returns [-pi, pi]; fold the closed end over.
  double w = std::remainder(theta, 2.0 * kPi);
  if (w >= kPi) w = -kPi;
  return w;
}

ParamGrid normalize_angles(const ParamGrid& grid, AngleDirection direction) {
  ParamGrid out = grid;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!out.mask[i]) {
      out.values[i] = 0.0;
      continue;
    }
    const double v = out.values[i];
    if (!std::isfinite(v)) {
      fail(ErrorKind::kNumerical, "non-finite value in parameter grid at cell " + std::to_string(i));
    }
    out.values[i] = direction == AngleDirection::kForward ? wrap_angle(v) / std::numbers::pi
                                                          : v * std::numbers::pi;
  }
  return out;
}

std::vector<double> occupied_values(const ParamGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (grid.mask[i]) out.push_back(grid.values[i]);
  }
  return out;
}

ParamGrid grid_from_occupied(const ParamGrid& shape, std::span<const double> values) {
  ParamGrid out = shape;
  std::size_t next = 0;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!out.mask[i]) {
      out.values[i] = 0.0;
      continue;
    }
    if (next >= values.size()) break;
    out.values[i] = values[next++];
  }
  if (next != values.size() || next != shape.occupied_count()) {
    fail(ErrorKind::kInvalidArgument, "grid has " + std::to_string(shape.occupied_count()) +
                                          " occupied cells, got " + std::to_string(values.size()) +
                                          " values");
  }
  return out;
}

}  // namespace vqinit
