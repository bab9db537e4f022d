// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/quantum_sim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "vqinit/error.hpp"
#include "vqinit/util.hpp"

namespace vqinit {

namespace {

constexpr double kImagResidueLimit = 1e-8;
constexpr double kLanczosResidualLimit = 1e-8;

std::size_t bit_of(int n_qubits, int qubit) {
  return std::size_t{1} << static_cast<unsigned>(n_qubits - 1 - qubit);
}

// 2x2 rotation matrices, row-major {m00, m01, m10, m11}.
std::array<cplx, 4> rotation_matrix(GateKind kind, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (kind) {
    case GateKind::RX:
      return {cplx{c, 0}, cplx{0, -s}, cplx{0, -s}, cplx{c, 0}};
    case GateKind::RY:
      return {cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
    case GateKind::RZ:
      return {cplx{c, -s}, cplx{0, 0}, cplx{0, 0}, cplx{c, s}};
    case GateKind::CNOT:
      break;
  }
  fail(ErrorKind::kInternal, "rotation_matrix called for CNOT");
}

void check_gate(const GateOp& gate, int n_qubits, std::size_t n_theta) {
  const std::string name(gate_name(gate.kind));
  if (gate.target < 0 || gate.target >= n_qubits) {
    fail(ErrorKind::kOutOfRange, name + " target qubit " + std::to_string(gate.target) +
                                     " out of range for " + std::to_string(n_qubits) +
                                     " qubits");
  }
  if (gate.kind == GateKind::CNOT) {
    if (!gate.control || *gate.control < 0 || *gate.control >= n_qubits) {
      fail(ErrorKind::kOutOfRange,
           "CNOT control qubit " +
               (gate.control ? std::to_string(*gate.control) : std::string("<none>")) +
               " out of range for " + std::to_string(n_qubits) + " qubits");
    }
    if (*gate.control == gate.target) {
      fail(ErrorKind::kInvalidArgument,
           "CNOT control equals target (" + std::to_string(gate.target) + ")");
    }
    if (gate.param) fail(ErrorKind::kInvalidArgument, "CNOT carries a parameter index");
    return;
  }
  if (gate.control) fail(ErrorKind::kInvalidArgument, name + " carries a control qubit");
  if (gate.param && (*gate.param < 0 || static_cast<std::size_t>(*gate.param) >= n_theta)) {
    fail(ErrorKind::kOutOfRange, name + " on qubit " + std::to_string(gate.target) +
                                     " uses parameter index " + std::to_string(*gate.param) +
                                     " but only " + std::to_string(n_theta) +
                                     " parameters were supplied");
  }
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DenseMatrix single_pauli(Pauli p) {
  DenseMatrix m(2, 2);
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, cplx{0, -1}, cplx{0, 1}, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

void check_dense_cap(int n_qubits, int cap, std::string_view what) {
  if (n_qubits > cap) {
    fail(ErrorKind::kOutOfRange, std::string(what) + " limited to " + std::to_string(cap) +
                                     " qubits, got " + std::to_string(n_qubits));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) {
    fail(ErrorKind::kInvalidArgument, "qubit count must be in [1, 30], got " +
                                          std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << static_cast<unsigned>(n_qubits), cplx{0, 0});
  amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > 30 ||
      amps_.size() != (std::size_t{1} << static_cast<unsigned>(n_qubits))) {
    fail(ErrorKind::kInvalidArgument, "amplitude count " + std::to_string(amps_.size()) +
                                          " is not 2^" + std::to_string(n_qubits));
  }
}

double StateVector::norm_squared() const noexcept {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return acc;
}

// ---------------------------------------------------------------------------
// Pauli strings and observables

PauliString PauliString::parse(std::string_view text) {
  std::vector<Pauli> ops;
  ops.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case 'I': ops.push_back(Pauli::I); break;
      case 'X': ops.push_back(Pauli::X); break;
      case 'Y': ops.push_back(Pauli::Y); break;
      case 'Z': ops.push_back(Pauli::Z); break;
      default:
        fail(ErrorKind::kInvalidArgument,
             "invalid Pauli symbol '" + std::string(1, ch) + "' in \"" + std::string(text) + "\"");
    }
  }
  return PauliString(std::move(ops));
}

bool PauliString::is_identity() const noexcept {
  return std::all_of(ops_.begin(), ops_.end(), [](Pauli p) { return p == Pauli::I; });
}

std::string PauliString::str() const {
  static constexpr char kSymbols[] = {'I', 'X', 'Y', 'Z'};
  std::string out;
  out.reserve(ops_.size());
  for (Pauli p : ops_) out.push_back(kSymbols[static_cast<int>(p)]);
  return out;
}

Observable::Observable(int n_qubits, std::vector<PauliTerm> terms)
    : n_qubits_(n_qubits), terms_(std::move(terms)) {
  if (n_qubits < 1) fail(ErrorKind::kInvalidArgument, "observable needs at least one qubit");
  if (terms_.empty()) fail(ErrorKind::kInvalidArgument, "observable has no terms");
  for (const auto& term : terms_) {
    if (term.ops.n_qubits() != n_qubits_) {
      fail(ErrorKind::kInvalidArgument, "Pauli string \"" + term.ops.str() + "\" has length " +
                                            std::to_string(term.ops.n_qubits()) +
                                            ", observable has " + std::to_string(n_qubits_) +
                                            " qubits");
    }
    if (!std::isfinite(term.coeff)) {
      fail(ErrorKind::kInvalidArgument, "non-finite coefficient on \"" + term.ops.str() + "\"");
    }
  }
}

// ---------------------------------------------------------------------------
// Gates and layouts

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

GateOp GateOp::rotation(GateKind kind, int target, int param_index) {
  GateOp g;
  g.kind = kind;
  g.target = target;
  g.param = param_index;
  return g;
}

GateOp GateOp::fixed(GateKind kind, int target, double angle) {
  GateOp g;
  g.kind = kind;
  g.target = target;
  g.fixed_angle = angle;
  return g;
}

GateOp GateOp::cnot(int control, int target) {
  GateOp g;
  g.kind = GateKind::CNOT;
  g.control = control;
  g.target = target;
  return g;
}

double GateOp::angle(std::span<const double> theta) const {
  return param ? theta[static_cast<std::size_t>(*param)] : fixed_angle;
}

CircuitLayout::CircuitLayout(int n_qubits, std::vector<GateOp> gates, int depth)
    : n_qubits_(n_qubits), gates_(std::move(gates)), depth_(depth) {
  if (n_qubits < 1) fail(ErrorKind::kInvalidArgument, "layout needs at least one qubit");
  if (depth < 0) fail(ErrorKind::kInvalidArgument, "layout depth must be non-negative");
  std::vector<int> uses;
  for (const auto& g : gates_) {
    if (g.param) {
      if (*g.param < 0) fail(ErrorKind::kOutOfRange, "negative parameter index");
      const auto idx = static_cast<std::size_t>(*g.param);
      if (idx >= uses.size()) uses.resize(idx + 1, 0);
      ++uses[idx];
    }
  }
  for (std::size_t k = 0; k < uses.size(); ++k) {
    if (uses[k] != 1) {
      fail(ErrorKind::kInvalidArgument, "parameter index " + std::to_string(k) + " used " +
                                            std::to_string(uses[k]) +
                                            " times; each index must be used exactly once");
    }
  }
  n_params_ = static_cast<int>(uses.size());
  for (const auto& g : gates_) check_gate(g, n_qubits_, uses.size());
}

// ---------------------------------------------------------------------------
// Statevector kernels

void apply_gate(StateVector& state, const GateOp& gate, std::span<const double> theta) {
  check_gate(gate, state.n_qubits(), theta.size());
  auto amps = state.amplitudes();
  const std::size_t dim = amps.size();
  const std::size_t t_bit = bit_of(state.n_qubits(), gate.target);

  if (gate.kind == GateKind::CNOT) {
    const std::size_t c_bit = bit_of(state.n_qubits(), *gate.control);
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & c_bit) && !(i & t_bit)) std::swap(amps[i], amps[i | t_bit]);
    }
    return;
  }

  const auto m = rotation_matrix(gate.kind, gate.angle(theta));
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & t_bit) continue;
    const cplx a0 = amps[i];
    const cplx a1 = amps[i | t_bit];
    amps[i] = m[0] * a0 + m[1] * a1;
    amps[i | t_bit] = m[2] * a0 + m[3] * a1;
  }
}

StateVector run_circuit(const CircuitLayout& layout, std::span<const double> theta) {
  if (theta.size() != static_cast<std::size_t>(layout.n_params())) {
    fail(ErrorKind::kInvalidArgument, "layout expects " + std::to_string(layout.n_params()) +
                                          " parameters, got " + std::to_string(theta.size()));
  }
  StateVector state(layout.n_qubits());
  for (const auto& g : layout.gates()) apply_gate(state, g, theta);
  return state;
}

cplx pauli_expectation(const StateVector& state, const PauliString& ops) {
  if (ops.n_qubits() != state.n_qubits()) {
    fail(ErrorKind::kInvalidArgument, "Pauli string length " + std::to_string(ops.n_qubits()) +
                                          " does not match state with " +
                                          std::to_string(state.n_qubits()) + " qubits");
  }
  // P|b> = i^{n_y} (-1)^{popcount(b & z_mask)} |b ^ x_mask>, using Y = i X Z.
  std::size_t x_mask = 0;
  std::size_t z_mask = 0;
  int n_y = 0;
  for (int q = 0; q < ops.n_qubits(); ++q) {
    const std::size_t bit = bit_of(state.n_qubits(), q);
    switch (ops[q]) {
      case Pauli::I: break;
      case Pauli::X: x_mask |= bit; break;
      case Pauli::Y: x_mask |= bit; z_mask |= bit; ++n_y; break;
      case Pauli::Z: z_mask |= bit; break;
    }
  }
  const auto amps = state.amplitudes();
  cplx acc{0, 0};
  for (std::size_t b = 0; b < amps.size(); ++b) {
    const cplx term = std::conj(amps[b ^ x_mask]) * amps[b];
    acc += (std::popcount(b & z_mask) & 1) ? -term : term;
  }
  static constexpr cplx kIPow[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kIPow[n_y % 4] * acc;
}

double expectation(const StateVector& state, const Observable& obs) {
  if (obs.n_qubits() != state.n_qubits()) {
    fail(ErrorKind::kInvalidArgument, "observable has " + std::to_string(obs.n_qubits()) +
                                          " qubits, state has " +
                                          std::to_string(state.n_qubits()));
  }
  cplx total{0, 0};
  for (const auto& term : obs.terms()) total += term.coeff * pauli_expectation(state, term.ops);
  if (std::abs(total.imag()) > kImagResidueLimit) {
    fail(ErrorKind::kInternal, "expectation has imaginary residue " +
                                   std::to_string(total.imag()));
  }
  return total.real();
}

// ---------------------------------------------------------------------------
// Dense oracles

DenseMatrix pauli_matrix(const PauliString& ops) {
  check_dense_cap(ops.n_qubits(), kMaxDenseQubits, "pauli_matrix");
  DenseMatrix out = DenseMatrix::Identity(1, 1);
  for (Pauli p : ops.ops()) out = kron(out, single_pauli(p));
  return out;
}

DenseMatrix pauli_matrix(const Observable& obs) {
  check_dense_cap(obs.n_qubits(), kMaxDenseQubits, "pauli_matrix");
  const auto dim = Eigen::Index{1} << obs.n_qubits();
  DenseMatrix out = DenseMatrix::Zero(dim, dim);
  for (const auto& term : obs.terms()) out += term.coeff * pauli_matrix(term.ops);
  return out;
}

LanczosResult lanczos_lowest(const DenseMatrix& h, int max_iterations) {
  const Eigen::Index n = h.rows();
  if (n == 0 || h.cols() != n) fail(ErrorKind::kInvalidArgument, "Lanczos needs a square matrix");
  const Eigen::Index cap = max_iterations > 0 ? std::min<Eigen::Index>(max_iterations, n) : n;

  // Fixed start vector keeps ground_energy a deterministic function of H.
  Rng rng(0x1a2c05ULL);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx{normal(rng), normal(rng)};
  v.normalize();

  Eigen::MatrixXcd basis(n, cap);
  std::vector<double> alpha;
  std::vector<double> beta;
  const double scale = std::max(1.0, h.cwiseAbs().rowwise().sum().maxCoeff());

  LanczosResult best;
  best.residual = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < cap; ++j) {
    basis.col(j) = v;
    Eigen::VectorXcd w = h * v;
    alpha.push_back(v.dot(w).real());
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
    }
    const double b = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                : Eigen::VectorXd(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double ritz = tri.eigenvalues()(0);
    const double estimate = b * std::abs(tri.eigenvectors()(m - 1, 0));

    const bool breakdown = b < 1e-12 * scale;
    if (estimate < 1e-3 * kLanczosResidualLimit || breakdown || j + 1 == cap) {
      Eigen::VectorXcd y = basis.leftCols(m) * tri.eigenvectors().col(0).cast<cplx>();
      y.normalize();
      const double residual = (h * y - ritz * y).norm();
      if (residual < best.residual) {
        best.eigenvalue = ritz;
        best.eigenvector = y;
        best.residual = residual;
        best.iterations = static_cast<int>(m);
      }
      if (residual < kLanczosResidualLimit) return best;
      if (breakdown) break;
    }
    beta.push_back(b);
    v = w / b;
  }
  fail(ErrorKind::kNumerical, "Lanczos did not converge: residual " +
                                  std::to_string(best.residual) + " after " +
                                  std::to_string(best.iterations) + " iterations");
}

double ground_energy(const Observable& obs) {
  return lanczos_lowest(pauli_matrix(obs)).eigenvalue;
}

std::pair<double, double> spectral_bounds(const Observable& obs) {
  const DenseMatrix h = pauli_matrix(obs);
  const DenseMatrix neg = -h;
  return {lanczos_lowest(h).eigenvalue, -lanczos_lowest(neg).eigenvalue};
}

DenseMatrix gate_matrix(const GateOp& gate, int n_qubits, std::span<const double> theta) {
  check_dense_cap(n_qubits, kMaxDenseQubits, "gate_matrix");
  check_gate(gate, n_qubits, theta.size());
  const auto dim = Eigen::Index{1} << n_qubits;
  if (gate.kind == GateKind::CNOT) {
    const auto c_bit = static_cast<Eigen::Index>(bit_of(n_qubits, *gate.control));
    const auto t_bit = static_cast<Eigen::Index>(bit_of(n_qubits, gate.target));
    DenseMatrix out = DenseMatrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) out((b & c_bit) ? (b ^ t_bit) : b, b) = 1.0;
    return out;
  }
  const auto m = rotation_matrix(gate.kind, gate.angle(theta));
  DenseMatrix g(2, 2);
  g << m[0], m[1], m[2], m[3];
  const auto left = Eigen::Index{1} << gate.target;
  const auto right = Eigen::Index{1} << (n_qubits - 1 - gate.target);
  return kron(kron(DenseMatrix::Identity(left, left), g), DenseMatrix::Identity(right, right));
}

DenseMatrix circuit_unitary(const CircuitLayout& layout, std::span<const double> theta) {
  check_dense_cap(layout.n_qubits(), kMaxUnitaryQubits, "circuit_unitary");
  if (theta.size() != static_cast<std::size_t>(layout.n_params())) {
    fail(ErrorKind::kInvalidArgument, "layout expects " + std::to_string(layout.n_params()) +
                                          " parameters, got " + std::to_string(theta.size()));
  }
  const auto dim = Eigen::Index{1} << layout.n_qubits();
  DenseMatrix u = DenseMatrix::Identity(dim, dim);
  for (const auto& g : layout.gates()) u = gate_matrix(g, layout.n_qubits(), theta) * u;
  return u;
}

DenseMatrix hermitian_exp(const DenseMatrix& h, double t) {
  const Eigen::Index dim = h.rows();
  if (dim == 0 || h.cols() != dim) fail(ErrorKind::kInvalidArgument, "hermitian_exp needs a square matrix");
  if (dim > (Eigen::Index{1} << kMaxUnitaryQubits)) {
    fail(ErrorKind::kOutOfRange, "hermitian_exp limited to dimension 16, got " + std::to_string(dim));
  }
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    fail(ErrorKind::kInvalidArgument, "hermitian_exp input is not Hermitian (max |H - H^dagger| = " +
                                          std::to_string(asym) + ")");
  }
  const DenseMatrix a = cplx{0, -t} * h;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const DenseMatrix b = a / std::ldexp(1.0, squarings);

  DenseMatrix result = DenseMatrix::Identity(dim, dim);
  DenseMatrix term = DenseMatrix::Identity(dim, dim);
  for (int k = 1; k <= 30; ++k) {
    term = term * b / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

double gate_fidelity(const DenseMatrix& u, const DenseMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
    fail(ErrorKind::kInvalidArgument, "gate_fidelity dimension mismatch: " +
                                          std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                                          " vs " + std::to_string(v.rows()) + "x" +
                                          std::to_string(v.cols()));
  }
  const cplx tr = u.conjugate().cwiseProduct(v).sum();
  return std::min(1.0, std::abs(tr) / static_cast<double>(u.rows()));
}

}  // namespace vqinit
