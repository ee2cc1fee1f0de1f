#pragma once

// Independent computational routes used as oracles in the tests. These must
// not share code with the implementation paths they check: the Kronecker
// product is an index loop, the propagator oracle is a generic matrix
// exponential (scaling-and-squaring on the 2x2 block).

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "qduet/algebra.hpp"

namespace qduet::testing {

// Index-loop Kronecker product (oracle for tensor_product).
inline Eigen::Matrix4cd kron_oracle(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

// exp(M) by scaling and squaring with a Taylor core; independent of the
// closed-form propagator.
template <typename Matrix>
Matrix expm_oracle(const Matrix& m) {
  int squarings = 0;
  Matrix scaled = m;
  while (scaled.cwiseAbs().maxCoeff() > 0.25 && squarings < 120) {
    scaled /= 2.0;
    ++squarings;
  }
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  for (int k = 1; k <= 24; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// Deterministic pseudo-random complex matrices/states for property tests.
class RandomSource {
 public:
  explicit RandomSource(unsigned seed) : engine_(seed), dist_(-1.0, 1.0) {}

  std::complex<double> complex_value() { return {dist_(engine_), dist_(engine_)}; }

  Eigen::Matrix2cd matrix2() {
    Eigen::Matrix2cd m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = complex_value();
    return m;
  }

  Eigen::Matrix4cd matrix4() {
    Eigen::Matrix4cd m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = complex_value();
    return m;
  }

  Eigen::Matrix4cd hermitian4() {
    const Eigen::Matrix4cd m = matrix4();
    return 0.5 * (m + m.adjoint());
  }

  // Valid density matrix: A A^dag normalized.
  qduet::DensityMatrix density_matrix() {
    const Eigen::Matrix4cd a = matrix4();
    Eigen::Matrix4cd rho = a * a.adjoint();
    return rho / rho.trace();
  }

  qduet::StateVector state() {
    qduet::StateVector v;
    for (int i = 0; i < 4; ++i) v(i) = complex_value();
    return v.normalized();
  }

 private:
  std::mt19937 engine_;
  std::uniform_real_distribution<double> dist_;
};

} // namespace qduet::testing
