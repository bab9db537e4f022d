// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <unordered_map>

#include "json_io.hpp"
#include "vqinit/error.hpp"

namespace vqinit {

using detail::json;

namespace {

constexpr std::uint64_t kThetaStream = 0x7e7a0;
constexpr std::uint64_t kParamStream = 0x9a9a;
constexpr double kLossTolerance = 1e-9;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

json record_body(const DatasetRecord& r) {
  json j;
  j["schema"] = kRecordSchemaVersion;
  j["id"] = r.id;
  j["family"] = std::string(family_id(r.family));
  j["task_params"] = r.task_params;
  j["seed"] = r.seed;
  j["prompt"] = r.prompt;
  j["conditioning"] = std::vector<double>(r.conditioning.begin(), r.conditioning.end());
  j["theta_opt"] = r.theta_opt;
  j["final_loss"] = r.final_loss;
  j["converged_step"] = r.converged_step ? json(*r.converged_step) : json(nullptr);
  j["generator_version"] = r.generator_version;
  return j;
}

DatasetRecord record_from_body(const json& j) {
  DatasetRecord r;
  r.id = j.at("id").get<int>();
  r.family = parse_family(j.at("family").get<std::string>());
  r.task_params = j.at("task_params").get<std::vector<double>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.prompt = j.at("prompt").get<std::string>();
  const auto cond = j.at("conditioning").get<std::vector<double>>();
  if (cond.size() != kConditioningDim) {
    fail(ErrorKind::kFormat, "conditioning has " + std::to_string(cond.size()) + " entries");
  }
  std::copy(cond.begin(), cond.end(), r.conditioning.begin());
  r.theta_opt = j.at("theta_opt").get<std::vector<double>>();
  r.final_loss = j.at("final_loss").get<double>();
  if (!j.at("converged_step").is_null()) r.converged_step = j.at("converged_step").get<int>();
  r.generator_version = j.at("generator_version").get<std::string>();
  return r;
}

void validate_record(const DatasetRecord& r) {
  const auto expected = static_cast<std::size_t>(family_param_count(r.family));
  if (r.theta_opt.size() != expected) {
    fail(ErrorKind::kFormat, "theta_opt has " + std::to_string(r.theta_opt.size()) +
                                 " entries, family expects " + std::to_string(expected));
  }
  const TaskInstance task = rebuild_task(r);
  if (conditioning_features(task) != r.conditioning) {
    fail(ErrorKind::kFormat, "conditioning does not match the rebuilt task");
  }
  if (task.prompt != r.prompt) fail(ErrorKind::kFormat, "prompt does not match the rebuilt task");
  const double loss = task_loss(task, r.theta_opt);
  if (!(std::abs(loss - r.final_loss) <= kLossTolerance)) {
    fail(ErrorKind::kFormat, "final_loss " + format_double(r.final_loss) +
                                 " differs from recomputed " + format_double(loss));
  }
}

json split_to_json(const SplitManifest& s) {
  return json{{"train_ids", s.train_ids},
              {"test_ids", s.test_ids},
              {"seed", s.seed},
              {"ratio", s.ratio}};
}

SplitManifest split_from_json(const json& j) {
  SplitManifest s;
  s.train_ids = j.at("train_ids").get<std::vector<int>>();
  s.test_ids = j.at("test_ids").get<std::vector<int>>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ratio = j.at("ratio").get<double>();
  std::set<int> seen;
  for (int id : s.train_ids) seen.insert(id);
  for (int id : s.test_ids) {
    if (!seen.insert(id).second) {
      fail(ErrorKind::kFormat, "split id " + std::to_string(id) + " appears in both sets");
    }
  }
  if (seen.size() != s.train_ids.size() + s.test_ids.size()) {
    fail(ErrorKind::kFormat, "split contains duplicate ids");
  }
  return s;
}

}  // namespace

int full_scale_count(TaskFamily family) {
  switch (family) {
    case TaskFamily::XYZ_1D: return 2000;
    case TaskFamily::FH_1D: return 1000;
    case TaskFamily::TFI_2D: return 1000;
    case TaskFamily::Q_PULSE: return 8285;
    case TaskFamily::RANDOM_VQE: return 2800;
  }
  fail(ErrorKind::kInternal, "unknown family");
}

std::vector<double> sample_task_params(TaskFamily family, Rng& rng) {
  switch (family) {
    case TaskFamily::XYZ_1D: {
      std::vector<double> p(3);
      for (auto& v : p) v = uniform(rng, 0.0, 2.0);
      return p;
    }
    case TaskFamily::FH_1D: {
      const double t = uniform(rng, 0.1, 1.0);
      const double u = uniform(rng, 0.0, 2.0);
      return {t, u};
    }
    case TaskFamily::TFI_2D: {
      const double j = uniform(rng, 0.0, 1.0);
      const double mu = uniform(rng, 0.0, 4.0);
      return {j, mu};
    }
    case TaskFamily::Q_PULSE: {
      const double a = uniform(rng, 0.0, 0.5);
      const double b = uniform(rng, 0.0, 0.5);
      const double c = uniform(rng, 0.1, 0.5);
      const double t = uniform(rng, 0.5, 2.0);
      return {a, b, c, t};
    }
    case TaskFamily::RANDOM_VQE: {
      // Same procedure build_task uses for an empty parameter list, seeded
      // from this rng so the terms vary with it.
      const std::uint64_t seed = rng();
      return build_task(TaskFamily::RANDOM_VQE, {}, seed).params;
    }
  }
  fail(ErrorKind::kInternal, "unknown family");
}

std::uint64_t instance_seed(std::uint64_t master_seed, int index) {
  return mix_seed(master_seed, static_cast<std::uint64_t>(index));
}

DatasetRecord generate_instance(TaskFamily family, std::span<const double> params,
                                std::uint64_t seed, const OptimizerConfig& cfg) {
  const TaskInstance task = build_task(family, params, seed);
  Rng rng(mix_seed(seed, kThetaStream));
  ParamVector theta0(static_cast<std::size_t>(task.layout.n_params()));
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (auto& v : theta0) v = angle(rng);

  const Trajectory traj = optimize(task, theta0, cfg);

  DatasetRecord r;
  r.family = family;
  r.task_params = task.params;
  r.seed = seed;
  r.prompt = task.prompt;
  r.conditioning = conditioning_features(task);
  r.theta_opt = traj.final_theta;
  r.final_loss = traj.losses.back();
  r.converged_step = traj.converged_step;
  return r;
}

std::vector<DatasetRecord> generate_dataset(TaskFamily family, int n, std::uint64_t master_seed,
                                            const OptimizerConfig& cfg, int workers) {
  if (n < 1) fail(ErrorKind::kInvalidArgument, "dataset size must be at least 1");
  cfg.validate();
  std::vector<DatasetRecord> records(static_cast<std::size_t>(n));
  parallel_for(records.size(), workers, [&](std::size_t i) {
    const std::uint64_t seed = instance_seed(master_seed, static_cast<int>(i));
    Rng prng(mix_seed(seed, kParamStream));
    const auto params = sample_task_params(family, prng);
    records[i] = generate_instance(family, params, seed, cfg);
    records[i].id = static_cast<int>(i);
  });
  return records;
}

SplitManifest split_dataset(const std::vector<DatasetRecord>& records, double ratio,
                            std::uint64_t seed) {
  if (records.size() < 2) fail(ErrorKind::kInvalidArgument, "split needs at least 2 records");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "split ratio must lie in (0, 1)");
  }
  std::vector<int> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.id);
  Rng rng(seed);
  // Fisher-Yates with an explicit draw so the order is the same on every
  // standard library.
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(ids[i], ids[j]);
  }
  const auto n = ids.size();
  // The small epsilon keeps products like 0.7 * 10 from flooring to 6.
  auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  SplitManifest s;
  s.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  s.seed = seed;
  s.ratio = ratio;
  return s;
}

TaskInstance rebuild_task(const DatasetRecord& record) {
  return build_task(record.family, record.task_params, record.seed);
}

void save_records(const std::filesystem::path& path, const std::vector<DatasetRecord>& records) {
  std::string text;
  for (const auto& r : records) {
    json j = record_body(r);
    const std::string body = j.dump();
    j["checksum"] = detail::hex16(detail::fnv1a64(body));
    text += j.dump();
    text += '\n';
  }
  detail::write_text(path, text);
}

std::vector<DatasetRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<DatasetRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + " line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorKind::kFormat, where + ": " + e.what());
    }
    try {
      detail::check_schema(j, kRecordSchemaVersion, where);
      if (!j.contains("checksum") || !j.at("checksum").is_string()) {
        fail(ErrorKind::kFormat, where + ": missing checksum");
      }
      const std::string stored = j.at("checksum").get<std::string>();
      j.erase("checksum");
      if (detail::hex16(detail::fnv1a64(j.dump())) != stored) {
        fail(ErrorKind::kFormat, where + ": checksum mismatch");
      }
      DatasetRecord r = record_from_body(j);
      validate_record(r);
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      fail(ErrorKind::kFormat, where + ": " + e.what());
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.rfind(where, 0) == 0) throw;
      fail(ErrorKind::kFormat, where + ": " + msg);
    }
  }
  return out;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  json j;
  j["schema"] = kManifestSchemaVersion;
  j["family"] = std::string(family_id(m.family));
  j["count"] = m.count;
  j["master_seed"] = m.master_seed;
  j["optimizer"] = detail::optimizer_to_json(m.optimizer);
  j["generator_version"] = m.generator_version;
  j["split"] = m.split ? split_to_json(*m.split) : json(nullptr);
  detail::write_json(path, j);
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const json j = detail::read_json(path);
  detail::check_schema(j, kManifestSchemaVersion, path.string());
  try {
    DatasetManifest m;
    m.family = parse_family(j.at("family").get<std::string>());
    m.count = j.at("count").get<int>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.optimizer = detail::optimizer_from_json(j.at("optimizer"));
    m.generator_version = j.at("generator_version").get<std::string>();
    if (!j.at("split").is_null()) m.split = split_from_json(j.at("split"));
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

void save_split(const std::filesystem::path& path, const SplitManifest& split) {
  json j = split_to_json(split);
  j["schema"] = kManifestSchemaVersion;
  detail::write_json(path, j);
}

SplitManifest load_split(const std::filesystem::path& path) {
  const json j = detail::read_json(path);
  detail::check_schema(j, kManifestSchemaVersion, path.string());
  try {
    return split_from_json(j);
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

std::vector<DatasetRecord> select_records(const std::vector<DatasetRecord>& records,
                                          const std::vector<int>& ids) {
  std::unordered_map<int, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index.emplace(records[i].id, i);
  std::vector<DatasetRecord> out;
  out.reserve(ids.size());
  for (int id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) {
      fail(ErrorKind::kInvalidArgument, "record id " + std::to_string(id) + " not found");
    }
    out.push_back(records[it->second]);
  }
  return out;
}

}  // namespace vqinit
