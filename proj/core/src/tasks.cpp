// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/tasks.hpp"

#include <cmath>
#include <random>

#include "vqinit/error.hpp"
#include "vqinit/util.hpp"

namespace vqinit {

namespace {

constexpr int kChainQubits = 4;
constexpr int kGridRows = 2;
constexpr int kGridCols = 4;
constexpr int kPulseQubits = 2;
constexpr int kPulseBlocks = 4;
constexpr int kRandomLayers = 4;

PauliString string_with(int n, std::initializer_list<std::pair<int, Pauli>> ops) {
  std::vector<Pauli> out(static_cast<std::size_t>(n), Pauli::I);
  for (auto [q, p] : ops) out[static_cast<std::size_t>(q)] = p;
  return PauliString(std::move(out));
}

void check_arity(TaskFamily family, std::span<const double> params, std::size_t expected) {
  if (params.size() != expected) {
    fail(ErrorKind::kInvalidArgument,
         std::string(family_id(family)) + " expects " + std::to_string(expected) +
             " parameters, got " + std::to_string(params.size()));
  }
  for (double p : params) {
    if (!std::isfinite(p)) {
      fail(ErrorKind::kInvalidArgument,
           std::string(family_id(family)) + " parameters must be finite");
    }
  }
}

// Two layers of RY on every qubit. Layer one fans CNOTs out from qubit 0,
// layer two closes a reversed CNOT ring. Reaches the exact ground state of
// the periodic four-site XYZ chain.
CircuitLayout chain_layout() {
  std::vector<GateOp> gates;
  int k = 0;
  for (int q = 0; q < kChainQubits; ++q) gates.push_back(GateOp::rotation(GateKind::RY, q, k++));
  for (int q = 1; q < kChainQubits; ++q) gates.push_back(GateOp::cnot(0, q));
  for (int q = 0; q < kChainQubits; ++q) gates.push_back(GateOp::rotation(GateKind::RY, q, k++));
  for (int q = 1; q < kChainQubits; ++q) gates.push_back(GateOp::cnot(q, q - 1));
  gates.push_back(GateOp::cnot(0, kChainQubits - 1));
  return CircuitLayout(kChainQubits, std::move(gates), 2);
}

CircuitLayout grid_layout() {
  constexpr int n = kGridRows * kGridCols;
  std::vector<GateOp> gates;
  int k = 0;
  for (int layer = 0; layer < 2; ++layer) {
    for (int q = 0; q < n; ++q) gates.push_back(GateOp::rotation(GateKind::RY, q, k++));
    for (int q = 0; q < n; ++q) gates.push_back(GateOp::cnot(q, (q + 1) % n));
  }
  return CircuitLayout(n, std::move(gates), 2);
}

// Control rotations interleaved with the fixed drift exp(-i h0 dt), which
// factorizes into RZ(2 a dt) (x) RZ(2 b dt) because h0 is diagonal and local.
CircuitLayout pulse_layout(double h0_zi, double h0_iz, double duration) {
  const double dt = duration / kPulseBlocks;
  std::vector<GateOp> gates;
  int k = 0;
  for (int block = 0; block < kPulseBlocks; ++block) {
    for (int q = 0; q < kPulseQubits; ++q) {
      for (GateKind kind : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
        gates.push_back(GateOp::rotation(kind, q, k++));
      }
    }
    gates.push_back(GateOp::fixed(GateKind::RZ, 0, 2.0 * h0_zi * dt));
    gates.push_back(GateOp::fixed(GateKind::RZ, 1, 2.0 * h0_iz * dt));
  }
  return CircuitLayout(kPulseQubits, std::move(gates), kPulseBlocks);
}

CircuitLayout random_vqe_layout() {
  std::vector<GateOp> gates;
  int k = 0;
  for (int layer = 0; layer < kRandomLayers; ++layer) {
    for (int q = 0; q < kRandomVqeQubits; ++q) {
      for (GateKind kind : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
        gates.push_back(GateOp::rotation(kind, q, k++));
      }
    }
    for (int q = 0; q + 1 < kRandomVqeQubits; ++q) gates.push_back(GateOp::cnot(q, q + 1));
  }
  return CircuitLayout(kRandomVqeQubits, std::move(gates), kRandomLayers);
}

Observable xyz_observable(double j1, double j2, double j3) {
  std::vector<PauliTerm> terms;
  for (int i = 0; i < kChainQubits; ++i) {
    const int j = (i + 1) % kChainQubits;
    terms.push_back({j1, string_with(kChainQubits, {{i, Pauli::X}, {j, Pauli::X}})});
    terms.push_back({j2, string_with(kChainQubits, {{i, Pauli::Y}, {j, Pauli::Y}})});
    terms.push_back({j3, string_with(kChainQubits, {{i, Pauli::Z}, {j, Pauli::Z}})});
  }
  return Observable(kChainQubits, std::move(terms));
}

// Spinless open chain after Jordan-Wigner:
//   -t (c_i^dag c_{i+1} + h.c.) -> -(t/2)(X_i X_{i+1} + Y_i Y_{i+1})
//   U n_i n_{i+1}               -> (U/4)(I - Z_i - Z_{i+1} + Z_i Z_{i+1})
Observable fh_observable(double hop, double interaction) {
  constexpr int n = kChainQubits;
  constexpr int bonds = n - 1;
  std::vector<PauliTerm> terms;
  terms.push_back({bonds * interaction / 4.0, string_with(n, {})});
  for (int i = 0; i < bonds; ++i) {
    terms.push_back({-hop / 2.0, string_with(n, {{i, Pauli::X}, {i + 1, Pauli::X}})});
    terms.push_back({-hop / 2.0, string_with(n, {{i, Pauli::Y}, {i + 1, Pauli::Y}})});
    terms.push_back({interaction / 4.0, string_with(n, {{i, Pauli::Z}, {i + 1, Pauli::Z}})});
  }
  for (int q = 0; q < n; ++q) {
    const int degree = (q == 0 || q == n - 1) ? 1 : 2;
    terms.push_back({-degree * interaction / 4.0, string_with(n, {{q, Pauli::Z}})});
  }
  return Observable(n, std::move(terms));
}

// Open 2 x 4 grid, qubit index = row * 4 + col, 10 nearest-neighbour edges.
Observable tfi_observable(double coupling, double field) {
  constexpr int n = kGridRows * kGridCols;
  std::vector<PauliTerm> terms;
  for (int r = 0; r < kGridRows; ++r) {
    for (int c = 0; c < kGridCols; ++c) {
      const int q = r * kGridCols + c;
      if (c + 1 < kGridCols) {
        terms.push_back({-coupling, string_with(n, {{q, Pauli::Z}, {q + 1, Pauli::Z}})});
      }
      if (r + 1 < kGridRows) {
        terms.push_back({-coupling, string_with(n, {{q, Pauli::Z}, {q + kGridCols, Pauli::Z}})});
      }
    }
  }
  for (int q = 0; q < n; ++q) terms.push_back({-field, string_with(n, {{q, Pauli::Z}})});
  return Observable(n, std::move(terms));
}

std::vector<double> draw_random_terms(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x7e27));
  std::uniform_int_distribution<int> count(1, 2);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> code(0, 3);
  const int n_terms = count(rng);
  std::vector<double> params;
  for (int t = 0; t < n_terms; ++t) {
    params.push_back(coeff(rng));
    std::array<int, kRandomVqeQubits> codes{};
    do {
      for (auto& c : codes) c = code(rng);
    } while (codes == std::array<int, kRandomVqeQubits>{});
    for (int c : codes) params.push_back(c);
  }
  return params;
}

Observable random_observable(std::span<const double> params) {
  std::vector<PauliTerm> terms;
  for (std::size_t base = 0; base < params.size(); base += kRandomTermWidth) {
    std::vector<Pauli> ops;
    for (std::size_t q = 0; q < kRandomVqeQubits; ++q) {
      const double code = params[base + 1 + q];
      if (code != std::floor(code) || code < 0 || code > 3) {
        fail(ErrorKind::kInvalidArgument,
             "random_vqe Pauli code must be an integer in 0..3, got " + format_double(code));
      }
      ops.push_back(static_cast<Pauli>(static_cast<int>(code)));
    }
    terms.push_back({params[base], PauliString(std::move(ops))});
  }
  return Observable(kRandomVqeQubits, std::move(terms));
}

std::string tuple_text(std::span<const double> values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out + ")";
}

}  // namespace

std::string_view family_id(TaskFamily family) {
  switch (family) {
    case TaskFamily::XYZ_1D: return "xyz";
    case TaskFamily::FH_1D: return "fh";
    case TaskFamily::TFI_2D: return "tfi";
    case TaskFamily::Q_PULSE: return "qpulse";
    case TaskFamily::RANDOM_VQE: return "random_vqe";
  }
  fail(ErrorKind::kInvalidArgument, "invalid task family");
}

TaskFamily parse_family(std::string_view id) {
  for (TaskFamily f : kAllFamilies) {
    if (family_id(f) == id) return f;
  }
  fail(ErrorKind::kInvalidArgument,
       "unknown task family \"" + std::string(id) + "\" (expected xyz, fh, tfi, qpulse, random_vqe)");
}

int family_param_count(TaskFamily family) {
  switch (family) {
    case TaskFamily::XYZ_1D: return 8;
    case TaskFamily::FH_1D: return 8;
    case TaskFamily::TFI_2D: return 16;
    case TaskFamily::Q_PULSE: return 24;
    case TaskFamily::RANDOM_VQE: return 48;
  }
  fail(ErrorKind::kInvalidArgument, "invalid task family");
}

std::vector<double> default_task_params(TaskFamily family) {
  switch (family) {
    case TaskFamily::XYZ_1D: return {2.0, 1.0, 0.5};
    case TaskFamily::FH_1D: return {0.5, 1.0};
    case TaskFamily::TFI_2D: return {0.2, 3.0};
    case TaskFamily::Q_PULSE: return {0.3, 0.2, 0.4, 1.0};
    case TaskFamily::RANDOM_VQE: return {0.5, 0, 0, 3, 3, 1.0, 3, 1, 1, 3};
  }
  fail(ErrorKind::kInvalidArgument, "invalid task family");
}

TaskInstance build_task(TaskFamily family, std::span<const double> params, std::uint64_t seed) {
  TaskInstance task;
  task.family = family;
  task.seed = seed;
  switch (family) {
    case TaskFamily::XYZ_1D:
      check_arity(family, params, 3);
      task.observable = xyz_observable(params[0], params[1], params[2]);
      task.layout = chain_layout();
      break;
    case TaskFamily::FH_1D:
      check_arity(family, params, 2);
      task.observable = fh_observable(params[0], params[1]);
      task.layout = chain_layout();
      break;
    case TaskFamily::TFI_2D:
      check_arity(family, params, 2);
      task.observable = tfi_observable(params[0], params[1]);
      task.layout = grid_layout();
      break;
    case TaskFamily::Q_PULSE: {
      check_arity(family, params, 4);
      const Observable h(kPulseQubits, {{params[0], PauliString::parse("ZI")},
                                        {params[1], PauliString::parse("IZ")},
                                        {params[2], PauliString::parse("XI")}});
      task.target_unitary = hermitian_exp(pauli_matrix(h), params[3]);
      task.layout = pulse_layout(params[0], params[1], params[3]);
      break;
    }
    case TaskFamily::RANDOM_VQE: {
      std::vector<double> explicit_params(params.begin(), params.end());
      if (explicit_params.empty()) explicit_params = draw_random_terms(seed);
      if (explicit_params.size() != kRandomTermWidth &&
          explicit_params.size() != 2 * kRandomTermWidth) {
        fail(ErrorKind::kInvalidArgument,
             "random_vqe expects 0, 5 or 10 parameters, got " + std::to_string(params.size()));
      }
      check_arity(family, explicit_params, explicit_params.size());
      task.observable = random_observable(explicit_params);
      task.layout = random_vqe_layout();
      task.params = std::move(explicit_params);
      task.prompt = prompt_text(task);
      return task;
    }
    default:
      fail(ErrorKind::kInvalidArgument, "invalid task family");
  }
  task.params.assign(params.begin(), params.end());
  task.prompt = prompt_text(task);
  return task;
}

double task_loss(const TaskInstance& task, std::span<const double> theta) {
  if (theta.size() != static_cast<std::size_t>(task.layout.n_params())) {
    fail(ErrorKind::kInvalidArgument,
         std::string(family_id(task.family)) + " loss expects " +
             std::to_string(task.layout.n_params()) + " parameters, got " +
             std::to_string(theta.size()));
  }
  if (task.target_unitary) {
    const double f = gate_fidelity(*task.target_unitary, circuit_unitary(task.layout, theta));
    return 1.0 - f * f;
  }
  if (!task.observable) fail(ErrorKind::kInternal, "task has neither observable nor target");
  return expectation(run_circuit(task.layout, theta), *task.observable);
}

ConditioningFeatures conditioning_features(const TaskInstance& task) {
  if (task.params.size() > kConditioningDim) {
    fail(ErrorKind::kOutOfRange, "conditioning needs " + std::to_string(task.params.size()) +
                                     " slots, only " + std::to_string(kConditioningDim) +
                                     " available");
  }
  ConditioningFeatures out{};
  std::copy(task.params.begin(), task.params.end(), out.begin());
  return out;
}

std::string prompt_text(const TaskInstance& task) {
  const auto& p = task.params;
  switch (task.family) {
    case TaskFamily::XYZ_1D:
      return "(J_1, J_2, J_3) = " + tuple_text(p);
    case TaskFamily::FH_1D:
      return "(t, U) = " + tuple_text(p);
    case TaskFamily::TFI_2D:
      return "(j, μ) = " + tuple_text(p);
    case TaskFamily::Q_PULSE:
      return "h_0 = " + format_double(p[0]) + " ZI + " + format_double(p[1]) + " IZ; h_1 = " +
             format_double(p[2]) + " XI; U_t = e^{-iHt}";
    case TaskFamily::RANDOM_VQE: {
      std::string out = "Hamiltonian = ";
      const Observable obs = random_observable(p);
      bool first = true;
      for (const auto& term : obs.terms()) {
        double c = term.coeff;
        if (!first) {
          out += c < 0 ? " - " : " + ";
          c = std::abs(c);
        }
        if (c == -1.0) {
          out += "-";
        } else if (c != 1.0) {
          out += format_double(c) + " · ";
        }
        out += term.ops.str();
        first = false;
      }
      return out;
    }
  }
  fail(ErrorKind::kInvalidArgument, "invalid task family");
}

}  // namespace vqinit
