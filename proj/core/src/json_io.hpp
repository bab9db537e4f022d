// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Internal JSON helpers shared by the file formats.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "vqinit/vqe_opt.hpp"

namespace vqinit::detail {

using nlohmann::json;

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string hex16(std::uint64_t value);

[[nodiscard]] json optimizer_to_json(const OptimizerConfig& cfg);
[[nodiscard]] OptimizerConfig optimizer_from_json(const json& j);

/// Whole-file helpers. Errors are kIo for open/write failures and kFormat
/// for unparsable content.
void write_text(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);
[[nodiscard]] json read_json(const std::filesystem::path& path);

/// Throws kFormat if j["schema"] is missing or differs from `supported`.
void check_schema(const json& j, int supported, const std::string& what);

}  // namespace vqinit::detail
