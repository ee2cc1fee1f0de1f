#include "qduet/algebra.hpp"

#include <cmath>

namespace qduet {

Operator tensor_product(const QubitOperator& a, const QubitOperator& b) {
  Operator out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

std::pair<StateVector, StateVector> bell_states() {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  StateVector plus = StateVector::Zero();
  StateVector minus = StateVector::Zero();
  plus(kEG) = inv_sqrt2;
  plus(kGE) = inv_sqrt2;
  minus(kEG) = inv_sqrt2;
  minus(kGE) = -inv_sqrt2;
  return {plus, minus};
}

Complex expectation(const Operator& op, const StateVector& psi) {
  const double norm2 = psi.squaredNorm();
  if (norm2 <= 0.0 || !std::isfinite(norm2)) {
    throw std::domain_error("expectation: degenerate state (zero or non-finite norm)");
  }
  return psi.dot(op * psi) / norm2;
}

Complex dm_expectation(const Operator& op, const DensityMatrix& rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr) <= 0.0 || !std::isfinite(std::abs(tr))) {
    throw std::domain_error("dm_expectation: zero-trace density matrix");
  }
  return (op * rho).trace() / tr;
}

bool is_hermitian(const Eigen::Matrix4cd& m, double tolerance) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

void require_hermitian(const Eigen::Matrix4cd& m, double tolerance) {
  if (!is_hermitian(m, tolerance)) {
    throw std::invalid_argument("matrix violates the claimed Hermiticity tolerance");
  }
}

double min_eigenvalue(const Eigen::Matrix4cd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool is_valid_density_matrix(const DensityMatrix& rho, double hermiticity,
                             double trace_tol, double positivity) {
  if (!all_finite(rho)) return false;
  if (!is_hermitian(rho, hermiticity)) return false;
  if (std::abs(rho.trace().real() - 1.0) > trace_tol) return false;
  if (std::abs(rho.trace().imag()) > trace_tol) return false;
  return min_eigenvalue(rho) >= positivity;
}

} // namespace qduet
