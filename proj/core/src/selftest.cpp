// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "vqinit/ddpm.hpp"
#include "vqinit/dataset.hpp"
#include "vqinit/denoiser.hpp"
#include "vqinit/encoding.hpp"
#include "vqinit/quantum_sim.hpp"
#include "vqinit/tasks.hpp"
#include "vqinit/vqe_opt.hpp"

namespace vqinit {

namespace {

using Check = std::function<std::string(Rng&)>;

std::string fmt(double v) { return format_double(v); }

StateVector random_state(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<cplx> amps(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : amps) {
    a = {normal(rng), normal(rng)};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return StateVector(n, std::move(amps));
}

Observable random_observable(int n, Rng& rng) {
  std::uniform_int_distribution<int> code(0, 3);
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<PauliTerm> terms;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    std::vector<Pauli> ops(static_cast<std::size_t>(n));
    for (auto& p : ops) p = static_cast<Pauli>(code(rng));
    terms.push_back({coeff(rng), PauliString(std::move(ops))});
  }
  return Observable(n, std::move(terms));
}

std::string check_expectation(Rng& rng) {
  std::uniform_int_distribution<int> qubits(1, 4);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = qubits(rng);
    const StateVector psi = random_state(n, rng);
    const Observable obs = random_observable(n, rng);
    const Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(),
                                               static_cast<Eigen::Index>(psi.dim()));
    const double dense = (v.adjoint() * pauli_matrix(obs) * v)(0, 0).real();
    worst = std::max(worst, std::abs(dense - expectation(psi, obs)));
  }
  if (worst >= 1e-10) return "max deviation " + fmt(worst);
  return {};
}

std::string check_parameter_shift(Rng& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (TaskFamily family : kAllFamilies) {
    const TaskInstance task = build_task(family, default_task_params(family), 3);
    ParamVector theta(static_cast<std::size_t>(task.layout.n_params()));
    for (auto& v : theta) v = angle(rng);
    const auto grad = parameter_shift_grad(task, theta);
    constexpr double h = 1e-5;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      ParamVector p = theta;
      ParamVector m = theta;
      p[k] += h;
      m[k] -= h;
      const double fd = (task_loss(task, p) - task_loss(task, m)) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[k]) / std::max(std::abs(fd), 1.0));
    }
  }
  // Central differences carry O(h^2) truncation and O(eps/h) rounding error.
  if (worst >= 1e-6) return "max relative deviation " + fmt(worst);
  return {};
}

std::string check_ground_energy(Rng&) {
  for (TaskFamily family : {TaskFamily::XYZ_1D, TaskFamily::FH_1D, TaskFamily::TFI_2D}) {
    const TaskInstance task = build_task(family, default_task_params(family));
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(pauli_matrix(*task.observable),
                                                        Eigen::EigenvaluesOnly);
    const double ref = es.eigenvalues().minCoeff();
    const double got = ground_energy(*task.observable);
    if (std::abs(ref - got) > 1e-9) {
      return std::string(family_id(family)) + ": " + fmt(got) + " vs " + fmt(ref);
    }
  }
  return {};
}

std::string check_encoding(Rng& rng) {
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (TaskFamily family : kAllFamilies) {
    const TaskInstance task = build_task(family, default_task_params(family));
    ParamVector theta(static_cast<std::size_t>(task.layout.n_params()));
    for (auto& v : theta) v = angle(rng);
    if (decode_grid(task.layout, encode_grid(task.layout, theta)) != theta) {
      return std::string(family_id(family)) + ": grid round trip changed values";
    }
  }
  return {};
}

std::string check_schedule(Rng&) {
  const NoiseSchedule s = linear_schedule(DiffusionConfig{});
  for (int t = 1; t <= s.steps(); ++t) {
    if (s.alpha_bar(t) != s.alpha(t) * s.alpha_bar(t - 1)) return "cumulative product mismatch";
    if (!(s.alpha_bar(t) < s.alpha_bar(t - 1))) return "alpha_bar not strictly decreasing";
  }
  return {};
}

DenoiserArch small_arch() {
  DenoiserArch a;
  a.input_dim = 6;
  a.hidden = 8;
  a.blocks = 1;
  a.time_dim = 4;
  a.cond_dim = 4;
  return a;
}

Denoiser random_denoiser(const DenoiserArch& arch, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 0.5);
  std::vector<double> p(arch.param_count());
  for (auto& v : p) v = normal(rng);
  return Denoiser(arch, std::move(p));
}

std::string check_guidance(Rng& rng) {
  const Denoiser model = random_denoiser(small_arch(), rng);
  std::normal_distribution<double> normal;
  std::vector<double> x(6);
  for (auto& v : x) v = normal(rng);
  ConditioningFeatures c{};
  for (auto& v : c) v = normal(rng);
  const auto ec = model.forward(x, 40, &c);
  const auto eu = model.forward(x, 40, nullptr);
  if (cfg_epsilon(model, x, 40, c, 1.0) != ec) return "g = 1 differs from conditional";
  if (cfg_epsilon(model, x, 40, c, 0.0) != eu) return "g = 0 differs from unconditional";
  return {};
}

std::string check_denoiser_gradient(Rng& rng) {
  Denoiser model = random_denoiser(small_arch(), rng);
  std::normal_distribution<double> normal;
  std::vector<double> x(6);
  std::vector<double> up(6);
  for (auto& v : x) v = normal(rng);
  for (auto& v : up) v = normal(rng);
  ConditioningFeatures c{};
  for (auto& v : c) v = normal(rng);
  double worst = 0.0;
  for (const ConditioningFeatures* cond : {static_cast<const ConditioningFeatures*>(&c),
                                           static_cast<const ConditioningFeatures*>(nullptr)}) {
    const auto grad = model.backward(x, 17, cond, up);
    auto params = model.mutable_params();
    auto objective = [&]() {
      const auto y = model.forward(x, 17, cond);
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += up[i] * y[i];
      return s;
    };
    constexpr double h = 1e-6;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double keep = params[k];
      params[k] = keep + h;
      const double fp = objective();
      params[k] = keep - h;
      const double fm = objective();
      params[k] = keep;
      const double fd = (fp - fm) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[k]) / std::max(std::abs(fd), 1e-3));
    }
  }
  if (worst >= 1e-4) return "max relative deviation " + fmt(worst);
  return {};
}

std::string check_record_round_trip(Rng& rng) {
  OptimizerConfig cfg;
  cfg.max_steps = 20;
  const auto records = generate_dataset(TaskFamily::FH_1D, 3, rng(), cfg);
  const auto dir = std::filesystem::temp_directory_path() /
                   ("vqinit-selftest-" + std::to_string(rng() % 1000000007ULL));
  const auto path = dir / "records.jsonl";
  save_records(path, records);
  const auto loaded = load_records(path);
  std::filesystem::remove_all(dir);
  if (loaded != records) return "records changed in a save/load round trip";
  return {};
}

}  // namespace

std::vector<SelftestResult> run_selftest(std::uint64_t seed) {
  const std::vector<std::pair<std::string, Check>> checks = {
      {"expectation matches dense reference", check_expectation},
      {"parameter shift matches finite differences", check_parameter_shift},
      {"Lanczos matches dense eigensolver", check_ground_energy},
      {"grid encoding round trip", check_encoding},
      {"noise schedule invariants", check_schedule},
      {"guidance degenerate scales", check_guidance},
      {"denoiser gradient matches finite differences", check_denoiser_gradient},
      {"record file round trip", check_record_round_trip},
  };
  std::vector<SelftestResult> out;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Rng rng(mix_seed(seed, i));
    SelftestResult r;
    r.name = checks[i].first;
    try {
      r.detail = checks[i].second(rng);
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vqinit
