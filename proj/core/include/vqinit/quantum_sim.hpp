// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

// Exact statevector simulation for small circuits.
//
// Qubit 0 is the leftmost symbol of a Pauli string and the most significant
// bit of a basis index: for n qubits, qubit q lives at bit (n - 1 - q).

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace vqinit {

using cplx = std::complex<double>;
using ParamVector = std::vector<double>;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxDenseQubits = 10;
inline constexpr int kMaxUnitaryQubits = 4;

class StateVector {
 public:
  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits);
  /// Takes ownership of raw amplitudes; length must be 2^n_qubits.
  StateVector(int n_qubits, std::vector<cplx> amplitudes);

  [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
  [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
  [[nodiscard]] std::span<const cplx> amplitudes() const noexcept { return amps_; }
  [[nodiscard]] std::span<cplx> amplitudes() noexcept { return amps_; }
  [[nodiscard]] const cplx& operator[](std::size_t i) const { return amps_[i]; }
  [[nodiscard]] double norm_squared() const noexcept;

 private:
  int n_qubits_;
  std::vector<cplx> amps_;
};

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> ops) : ops_(std::move(ops)) {}
  /// Parses "IXYZ"-style text. Throws on any other symbol.
  [[nodiscard]] static PauliString parse(std::string_view text);

  [[nodiscard]] int n_qubits() const noexcept { return static_cast<int>(ops_.size()); }
  [[nodiscard]] Pauli operator[](int q) const { return ops_[static_cast<std::size_t>(q)]; }
  [[nodiscard]] std::span<const Pauli> ops() const noexcept { return ops_; }
  [[nodiscard]] bool is_identity() const noexcept;
  [[nodiscard]] std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> ops_;
};

struct PauliTerm {
  double coeff = 0.0;
  PauliString ops;
};

/// Weighted sum of Pauli strings over a fixed number of qubits.
class Observable {
 public:
  /// Validates: at least one term, equal string lengths, finite coefficients.
  Observable(int n_qubits, std::vector<PauliTerm> terms);

  [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
  [[nodiscard]] std::span<const PauliTerm> terms() const noexcept { return terms_; }

 private:
  int n_qubits_;
  std::vector<PauliTerm> terms_;
};

enum class GateKind : std::uint8_t { RX, RY, RZ, CNOT };

[[nodiscard]] std::string_view gate_name(GateKind kind);

/// A single gate. Rotations take their angle either from theta[param] or,
/// for fixed gates such as drift evolutions, from fixed_angle.
struct GateOp {
  GateKind kind = GateKind::RX;
  int target = 0;
  std::optional<int> control;
  std::optional<int> param;
  double fixed_angle = 0.0;

  [[nodiscard]] static GateOp rotation(GateKind kind, int target, int param_index);
  [[nodiscard]] static GateOp fixed(GateKind kind, int target, double angle);
  [[nodiscard]] static GateOp cnot(int control, int target);

  [[nodiscard]] bool is_rotation() const noexcept { return kind != GateKind::CNOT; }
  [[nodiscard]] bool is_parameterized() const noexcept { return param.has_value(); }
  /// Rotation angle for this gate given the circuit parameters.
  [[nodiscard]] double angle(std::span<const double> theta) const;
};

/// Fixed ansatz topology. Every parameter index 0..n_params-1 is used by
/// exactly one gate, which keeps the two-point shift rule exact.
class CircuitLayout {
 public:
  CircuitLayout(int n_qubits, std::vector<GateOp> gates, int depth);

  [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
  [[nodiscard]] int n_params() const noexcept { return n_params_; }
  [[nodiscard]] int depth() const noexcept { return depth_; }
  [[nodiscard]] std::span<const GateOp> gates() const noexcept { return gates_; }

 private:
  int n_qubits_;
  std::vector<GateOp> gates_;
  int n_params_ = 0;
  int depth_;
};

/// Applies one gate in place. Norm is preserved to rounding.
void apply_gate(StateVector& state, const GateOp& gate, std::span<const double> theta);

/// Runs the layout from |0...0>.
[[nodiscard]] StateVector run_circuit(const CircuitLayout& layout,
                                      std::span<const double> theta);

/// <psi|P|psi> for a single Pauli string (complex in general).
[[nodiscard]] cplx pauli_expectation(const StateVector& state, const PauliString& ops);

/// Sum_k c_k <psi|P_k|psi>. Throws kInternal if the imaginary residue
/// exceeds 1e-8.
[[nodiscard]] double expectation(const StateVector& state, const Observable& obs);

/// Dense Kronecker-product matrix of a string or observable (n <= 10).
[[nodiscard]] DenseMatrix pauli_matrix(const PauliString& ops);
[[nodiscard]] DenseMatrix pauli_matrix(const Observable& obs);

struct LanczosResult {
  double eigenvalue = 0.0;
  Eigen::VectorXcd eigenvector;
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest eigenvalue of a dense Hermitian matrix by Lanczos with full
/// reorthogonalization. Throws kNumerical if ||Hv - lambda v|| >= 1e-8
/// after the iteration cap.
[[nodiscard]] LanczosResult lanczos_lowest(const DenseMatrix& h, int max_iterations = 0);

[[nodiscard]] double ground_energy(const Observable& obs);

/// (smallest, largest) eigenvalue; the width is used as the energy scale of
/// VQE quality checks.
[[nodiscard]] std::pair<double, double> spectral_bounds(const Observable& obs);

/// Dense matrix of a single gate acting on an n-qubit register.
[[nodiscard]] DenseMatrix gate_matrix(const GateOp& gate, int n_qubits,
                                      std::span<const double> theta);

/// Product of per-gate matrices in application order (n <= 4).
[[nodiscard]] DenseMatrix circuit_unitary(const CircuitLayout& layout,
                                          std::span<const double> theta);

/// exp(-i H t) by scaling and squaring of a truncated Taylor series.
[[nodiscard]] DenseMatrix hermitian_exp(const DenseMatrix& h, double t);

/// |Tr(U^dagger V)| / d.
[[nodiscard]] double gate_fidelity(const DenseMatrix& u, const DenseMatrix& v);

}  // namespace vqinit
