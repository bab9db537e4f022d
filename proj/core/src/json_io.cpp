// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "json_io.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "vqinit/error.hpp"

namespace vqinit::detail {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

json optimizer_to_json(const OptimizerConfig& cfg) {
  return json{{"learning_rate", cfg.learning_rate},
              {"beta1", cfg.adam.beta1},
              {"beta2", cfg.adam.beta2},
              {"epsilon", cfg.adam.epsilon},
              {"max_steps", cfg.max_steps},
              {"window", cfg.window},
              {"tolerance", cfg.tolerance}};
}

OptimizerConfig optimizer_from_json(const json& j) {
  OptimizerConfig cfg;
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.adam.beta1 = j.at("beta1").get<double>();
  cfg.adam.beta2 = j.at("beta2").get<double>();
  cfg.adam.epsilon = j.at("epsilon").get<double>();
  cfg.max_steps = j.at("max_steps").get<int>();
  cfg.window = j.at("window").get<int>();
  cfg.tolerance = j.at("tolerance").get<double>();
  cfg.validate();
  return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

void check_schema(const json& j, int supported, const std::string& what) {
  if (!j.is_object() || !j.contains("schema") || !j.at("schema").is_number_integer()) {
    fail(ErrorKind::kFormat, what + ": missing schema version");
  }
  const int version = j.at("schema").get<int>();
  if (version > supported) {
    fail(ErrorKind::kFormat, what + ": schema version " + std::to_string(version) +
                                 " is newer than the supported version " +
                                 std::to_string(supported));
  }
  if (version != supported) {
    fail(ErrorKind::kFormat, what + ": unsupported schema version " + std::to_string(version));
  }
}

}  // namespace vqinit::detail
