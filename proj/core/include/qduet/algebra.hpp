#pragma once

// Dense complex linear algebra on the fixed two-qubit Hilbert space.
//
// Basis ordering is {|g,g>, |g,e>, |e,g>, |e,e>} with qubit 1 as the LEFT
// tensor factor, i.e. index = 2*q1 + q2 with g=0, e=1. Every serialized
// artifact and every operator constructor in this library uses this ordering.

#include <complex>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace qduet {

using Complex = std::complex<double>;
using StateVector = Eigen::Vector4cd;   // |psi>, amplitudes in the basis above
using Operator = Eigen::Matrix4cd;      // 4x4 operator, same ordering
using DensityMatrix = Eigen::Matrix4cd; // rho, same ordering
using QubitOperator = Eigen::Matrix2cd; // single-qubit 2x2 block

// Basis indices.
inline constexpr int kGG = 0;
inline constexpr int kGE = 1; // qubit 1 ground, qubit 2 excited
inline constexpr int kEG = 2; // qubit 1 excited, qubit 2 ground
inline constexpr int kEE = 3;

// Centralized tolerance table. Callers may override per call; these are the
// project-wide defaults.
namespace tol {
inline constexpr double algebraic = 1e-12;  // hermiticity, orthogonality
inline constexpr double trace = 1e-9;       // trace drift along integration
inline constexpr double positivity = -1e-10; // smallest admissible eigenvalue
} // namespace tol

// Single-qubit blocks, basis {|g>, |e>}.
inline QubitOperator qubit_identity() { return QubitOperator::Identity(); }

inline QubitOperator sigma_z() {
  QubitOperator m;
  m << -1, 0, 0, 1;
  return m;
}

inline QubitOperator sigma_minus() { // |g><e|
  QubitOperator m;
  m << 0, 1, 0, 0;
  return m;
}

inline QubitOperator sigma_plus() { // |e><g|
  QubitOperator m;
  m << 0, 0, 1, 0;
  return m;
}

// Kronecker product with qubit 1 as the left factor.
Operator tensor_product(const QubitOperator& a, const QubitOperator& b);

// Embeddings of a single-qubit operator.
inline Operator on_qubit1(const QubitOperator& a) {
  return tensor_product(a, qubit_identity());
}
inline Operator on_qubit2(const QubitOperator& a) {
  return tensor_product(qubit_identity(), a);
}

// Number operators sigma_+ sigma_- per qubit.
inline Operator number_op1() { return on_qubit1(sigma_plus() * sigma_minus()); }
inline Operator number_op2() { return on_qubit2(sigma_plus() * sigma_minus()); }

inline StateVector basis_state(int index) {
  StateVector v = StateVector::Zero();
  v(index) = 1.0;
  return v;
}

// (|Psi+>, |Psi->) with |Psi+-> = (|e,g> +- |g,e>)/sqrt2, both normalized.
std::pair<StateVector, StateVector> bell_states();

// <psi|op|psi> / <psi|psi>. Throws std::domain_error on a zero-norm state so
// unnormalized no-jump states are handled uniformly.
Complex expectation(const Operator& op, const StateVector& psi);

// Tr[op rho] / Tr[rho]. Throws std::domain_error on zero trace.
Complex dm_expectation(const Operator& op, const DensityMatrix& rho);

inline double population1(const StateVector& psi) {
  return std::real(expectation(number_op1(), psi));
}
inline double population2(const StateVector& psi) {
  return std::real(expectation(number_op2(), psi));
}

bool is_hermitian(const Eigen::Matrix4cd& m, double tolerance = tol::algebraic);

// Throws std::invalid_argument when a claimed-Hermitian matrix is not.
void require_hermitian(const Eigen::Matrix4cd& m, double tolerance = tol::algebraic);

// Smallest eigenvalue of a Hermitian matrix (positivity checks).
double min_eigenvalue(const Eigen::Matrix4cd& m);

// Hermitian to `hermiticity`, trace within `trace_tol` of 1, eigenvalues
// above tol::positivity.
bool is_valid_density_matrix(const DensityMatrix& rho,
                             double hermiticity = tol::algebraic,
                             double trace_tol = tol::trace,
                             double positivity = tol::positivity);

inline bool all_finite(const Eigen::Matrix4cd& m) { return m.allFinite(); }
inline bool all_finite(const StateVector& v) { return v.allFinite(); }

} // namespace qduet
