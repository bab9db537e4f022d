// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "json_io.hpp"
#include "vqinit/error.hpp"

namespace vqinit {

using detail::json;

namespace {

constexpr std::uint64_t kInitStream = 0x1417;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::kFormat, where + ": not a number: '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& where) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::kFormat, where + ": not an integer: '" + s + "'");
  }
  return v;
}

std::string file_tag(const std::string& scheme) {
  std::string out;
  for (char c : scheme) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "scheme" : out;
}

}  // namespace

Initializer random_initializer(std::uint64_t seed) {
  return [seed](const DatasetRecord& record, const TaskInstance& task) {
    Rng rng(mix_seed(mix_seed(seed, kInitStream), static_cast<std::uint64_t>(record.id)));
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    ParamVector theta(static_cast<std::size_t>(task.layout.n_params()));
    for (auto& v : theta) v = angle(rng);
    return theta;
  };
}

Initializer model_initializer(const Checkpoint& ckpt, std::uint64_t seed) {
  auto model = std::make_shared<const Denoiser>(ckpt.model());
  auto sched = std::make_shared<const NoiseSchedule>(linear_schedule(ckpt.config));
  const TaskFamily family = ckpt.family;
  const double g = ckpt.config.guidance;
  return [model, sched, family, g, seed](const DatasetRecord& record, const TaskInstance& task) {
    if (record.family != family) {
      fail(ErrorKind::kInvalidArgument, "checkpoint was trained on " +
                                            std::string(family_id(family)) + ", record is " +
                                            std::string(family_id(record.family)));
    }
    Rng rng(mix_seed(mix_seed(seed, kInitStream), static_cast<std::uint64_t>(record.id)));
    const ParamGrid shape = empty_grid(task.layout);
    const ParamGrid sample = sample_parameters(*model, shape, record.conditioning, *sched, g, rng);
    return decode_sample(task.layout, sample);
  };
}

EvalMetrics evaluate_initializer(const std::vector<DatasetRecord>& test, const std::string& scheme,
                                 const Initializer& init, const OptimizerConfig& cfg,
                                 int workers) {
  if (test.empty()) fail(ErrorKind::kInvalidArgument, "test set is empty");
  cfg.validate();
  for (const auto& r : test) {
    if (r.family != test.front().family) {
      fail(ErrorKind::kInvalidArgument, "test set mixes task families");
    }
  }
  const std::size_t n = test.size();
  EvalMetrics m;
  m.scheme = scheme;
  m.family = test.front().family;
  m.max_steps = cfg.max_steps;
  m.instance_ids.resize(n);
  m.initial_losses.resize(n);
  m.convergence_steps.resize(n);
  m.converged.resize(n);
  m.trajectories.resize(n);

  parallel_for(n, workers, [&](std::size_t i) {
    const DatasetRecord& r = test[i];
    const TaskInstance task = rebuild_task(r);
    const ParamVector theta = init(r, task);
    if (theta.size() != static_cast<std::size_t>(task.layout.n_params())) {
      fail(ErrorKind::kInvalidArgument, "initializer returned " + std::to_string(theta.size()) +
                                            " angles for record " + std::to_string(r.id));
    }
    const double initial = task_loss(task, theta);
    if (!std::isfinite(initial)) {
      fail(ErrorKind::kNumerical, "non-finite initial loss for record " + std::to_string(r.id));
    }
    Trajectory traj = optimize(task, theta, cfg);
    if (traj.losses.front() != initial) {
      fail(ErrorKind::kInternal, "trajectory does not start at the initial loss");
    }
    m.instance_ids[i] = r.id;
    m.initial_losses[i] = initial;
    m.converged[i] = traj.converged_step;
    m.convergence_steps[i] = traj.converged_step.value_or(cfg.max_steps);
    m.trajectories[i] = std::move(traj.losses);
  });

  m.mean_initial_loss = mean_of(m.initial_losses);
  std::vector<double> steps(m.convergence_steps.begin(), m.convergence_steps.end());
  m.mean_convergence_steps = mean_of(steps);
  return m;
}

ComparisonRow compare_schemes(const EvalMetrics& a, const EvalMetrics& b) {
  if (a.family != b.family) fail(ErrorKind::kInvalidArgument, "metrics cover different families");
  if (a.instance_ids != b.instance_ids) {
    fail(ErrorKind::kInvalidArgument, "metrics cover different test instances");
  }
  ComparisonRow row;
  row.family = a.family;
  row.scheme_a = a.scheme;
  row.scheme_b = b.scheme;
  row.n_instances = static_cast<int>(a.instance_ids.size());
  row.initial_loss_a = a.mean_initial_loss;
  row.initial_loss_b = b.mean_initial_loss;
  row.delta_initial_loss = a.mean_initial_loss - b.mean_initial_loss;
  row.steps_a = a.mean_convergence_steps;
  row.steps_b = b.mean_convergence_steps;
  row.delta_steps_pct =
      a.mean_convergence_steps == 0.0
          ? 0.0
          : 100.0 * (a.mean_convergence_steps - b.mean_convergence_steps) / a.mean_convergence_steps;
  return row;
}

std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir,
                                               const ComparisonReport& report,
                                               const std::vector<EvalMetrics>& metrics,
                                               int histogram_bins) {
  if (histogram_bins < 1) fail(ErrorKind::kInvalidArgument, "histogram needs at least one bin");
  std::vector<std::filesystem::path> written;
  const auto fd = [](double v) { return format_double(v); };

  {
    std::string text =
        "family,scheme_a,scheme_b,n_instances,initial_loss_a,initial_loss_b,"
        "delta_initial_loss,steps_a,steps_b,delta_steps_pct\n";
    for (const auto& r : report.rows) {
      text += std::string(family_id(r.family)) + "," + r.scheme_a + "," + r.scheme_b + "," +
              std::to_string(r.n_instances) + "," + fd(r.initial_loss_a) + "," +
              fd(r.initial_loss_b) + "," + fd(r.delta_initial_loss) + "," + fd(r.steps_a) + "," +
              fd(r.steps_b) + "," + fd(r.delta_steps_pct) + "\n";
    }
    written.push_back(dir / "comparison.csv");
    detail::write_text(written.back(), text);
  }

  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& m : metrics) {
    for (double v : m.initial_losses) {
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / histogram_bins;

  for (const auto& m : metrics) {
    const std::string tag = file_tag(m.scheme);

    std::string per = "id,initial_loss,converged_step\n";
    for (std::size_t i = 0; i < m.initial_losses.size(); ++i) {
      per += std::to_string(m.instance_ids[i]) + "," + fd(m.initial_losses[i]) + "," +
             (m.converged[i] ? std::to_string(*m.converged[i]) : std::string()) + "\n";
    }
    written.push_back(dir / ("initial_losses_" + tag + ".csv"));
    detail::write_text(written.back(), per);

    std::vector<int> counts(static_cast<std::size_t>(histogram_bins), 0);
    for (double v : m.initial_losses) {
      auto b = static_cast<int>(std::floor((v - lo) / width));
      b = std::clamp(b, 0, histogram_bins - 1);
      ++counts[static_cast<std::size_t>(b)];
    }
    std::string hist = "bin_low,bin_high,count\n";
    for (int b = 0; b < histogram_bins; ++b) {
      const double bl = lo + b * width;
      const double bh = b + 1 == histogram_bins ? hi : lo + (b + 1) * width;
      hist += fd(bl) + "," + fd(bh) + "," + std::to_string(counts[static_cast<std::size_t>(b)]) +
              "\n";
    }
    written.push_back(dir / ("histogram_" + tag + ".csv"));
    detail::write_text(written.back(), hist);

    std::string curve = "step,mean,min,max\n";
    for (int s = 0; s <= m.max_steps; ++s) {
      double sum = 0.0;
      double mn = 0.0;
      double mx = 0.0;
      for (std::size_t i = 0; i < m.trajectories.size(); ++i) {
        const auto& tr = m.trajectories[i];
        if (tr.size() != static_cast<std::size_t>(m.max_steps) + 1) {
          fail(ErrorKind::kInvalidArgument, "trajectory length does not match max_steps");
        }
        const double v = tr[static_cast<std::size_t>(s)];
        sum += v;
        mn = i == 0 ? v : std::min(mn, v);
        mx = i == 0 ? v : std::max(mx, v);
      }
      // Rounding in the sum can push the mean a hair past an extreme.
      const double mean = std::clamp(sum / static_cast<double>(m.trajectories.size()), mn, mx);
      curve += std::to_string(s) + "," + fd(mean) + "," + fd(mn) + "," + fd(mx) + "\n";
    }
    written.push_back(dir / ("loss_curve_" + tag + ".csv"));
    detail::write_text(written.back(), curve);
  }
  return written;
}

ComparisonReport read_comparison_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  ComparisonReport report;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const std::string where = path.string() + " line " + std::to_string(line_no);
    const auto cells = split_csv(line);
    if (cells.size() != 10) fail(ErrorKind::kFormat, where + ": expected 10 columns");
    ComparisonRow r;
    try {
      r.family = parse_family(cells[0]);
    } catch (const Error& e) {
      fail(ErrorKind::kFormat, where + ": " + e.what());
    }
    r.scheme_a = cells[1];
    r.scheme_b = cells[2];
    r.n_instances = parse_int(cells[3], where);
    r.initial_loss_a = parse_double(cells[4], where);
    r.initial_loss_b = parse_double(cells[5], where);
    r.delta_initial_loss = parse_double(cells[6], where);
    r.steps_a = parse_double(cells[7], where);
    r.steps_b = parse_double(cells[8], where);
    r.delta_steps_pct = parse_double(cells[9], where);
    report.rows.push_back(std::move(r));
  }
  return report;
}

void save_metrics(const std::filesystem::path& path, const EvalMetrics& m) {
  json j;
  j["schema"] = kMetricsSchemaVersion;
  j["scheme"] = m.scheme;
  j["family"] = std::string(family_id(m.family));
  j["max_steps"] = m.max_steps;
  j["instance_ids"] = m.instance_ids;
  j["initial_losses"] = m.initial_losses;
  j["convergence_steps"] = m.convergence_steps;
  json conv = json::array();
  for (const auto& c : m.converged) conv.push_back(c ? json(*c) : json(nullptr));
  j["converged"] = conv;
  j["trajectories"] = m.trajectories;
  j["mean_initial_loss"] = m.mean_initial_loss;
  j["mean_convergence_steps"] = m.mean_convergence_steps;
  detail::write_text(path, j.dump() + "\n");
}

EvalMetrics load_metrics(const std::filesystem::path& path) {
  const json j = detail::read_json(path);
  detail::check_schema(j, kMetricsSchemaVersion, path.string());
  EvalMetrics m;
  try {
    m.scheme = j.at("scheme").get<std::string>();
    m.family = parse_family(j.at("family").get<std::string>());
    m.max_steps = j.at("max_steps").get<int>();
    m.instance_ids = j.at("instance_ids").get<std::vector<int>>();
    m.initial_losses = j.at("initial_losses").get<std::vector<double>>();
    m.convergence_steps = j.at("convergence_steps").get<std::vector<int>>();
    for (const auto& c : j.at("converged")) {
      m.converged.push_back(c.is_null() ? std::nullopt : std::optional<int>(c.get<int>()));
    }
    m.trajectories = j.at("trajectories").get<std::vector<std::vector<double>>>();
    m.mean_initial_loss = j.at("mean_initial_loss").get<double>();
    m.mean_convergence_steps = j.at("mean_convergence_steps").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  const std::size_t n = m.instance_ids.size();
  if (n == 0 || m.initial_losses.size() != n || m.convergence_steps.size() != n ||
      m.converged.size() != n || m.trajectories.size() != n) {
    fail(ErrorKind::kFormat, path.string() + ": per-instance arrays have inconsistent lengths");
  }
  return m;
}

}  // namespace vqinit
