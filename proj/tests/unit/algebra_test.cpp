#include <doctest.h>

#include "qduet/algebra.hpp"
#include "test_oracles.hpp"

using namespace qduet;
using qduet::testing::RandomSource;
using qduet::testing::kron_oracle;

TEST_CASE("tensor product acts on basis states as expected") {
  const Operator sz1 = on_qubit1(sigma_z());
  CHECK((sz1 * basis_state(kEG) - basis_state(kEG)).norm() == doctest::Approx(0.0));

  const Operator id = tensor_product(qubit_identity(), qubit_identity());
  CHECK((id - Operator::Identity()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  const Operator lower1 = on_qubit1(sigma_minus());
  CHECK((lower1 * basis_state(kEG) - basis_state(kGG)).norm() == doctest::Approx(0.0));
}

TEST_CASE("basis ordering: sigma_z on qubit 1 has diagonal (-1,-1,+1,+1)") {
  const Operator sz1 = on_qubit1(sigma_z());
  CHECK(sz1(0, 0).real() == -1.0);
  CHECK(sz1(1, 1).real() == -1.0);
  CHECK(sz1(2, 2).real() == 1.0);
  CHECK(sz1(3, 3).real() == 1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(std::abs(sz1(i, j)) == 0.0);
}

TEST_CASE("tensor product matches the index-loop oracle and is bilinear") {
  RandomSource random(42);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Matrix2cd a = random.matrix2();
    const Eigen::Matrix2cd b = random.matrix2();
    const Eigen::Matrix2cd c = random.matrix2();
    const Eigen::Matrix2cd d = random.matrix2();

    CHECK((tensor_product(a, b) - kron_oracle(a, b)).cwiseAbs().maxCoeff() < 1e-15);

    // bilinearity
    const Complex alpha = random.complex_value();
    const Operator left = tensor_product(alpha * a + c, b);
    const Operator right = alpha * tensor_product(a, b) + tensor_product(c, b);
    CHECK((left - right).cwiseAbs().maxCoeff() < 1e-12);

    // mixed product: (A (x) B)(C (x) D) = (AC) (x) (BD)
    const Operator lhs = tensor_product(a, b) * tensor_product(c, d);
    const Operator rhs = tensor_product(a * c, b * d);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("bell states") {
  const auto [plus, minus] = bell_states();
  CHECK(std::abs(plus.dot(minus)) < 1e-15);
  CHECK(plus.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(minus.norm() == doctest::Approx(1.0).epsilon(1e-15));

  const StateVector eg = ((plus + minus) / std::sqrt(2.0));
  CHECK((eg - basis_state(kEG)).norm() < 1e-15);
}

TEST_CASE("expectation values") {
  const Operator n1 = number_op1();
  CHECK(std::real(expectation(n1, basis_state(kEG))) == doctest::Approx(1.0));

  const auto [plus, minus] = bell_states();
  CHECK(std::real(expectation(n1, minus)) == doctest::Approx(0.5));

  // normalization built in
  const StateVector doubled = 2.0 * basis_state(kEG);
  CHECK(std::real(expectation(n1, doubled)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(expectation(n1, StateVector::Zero()), std::domain_error);
}

TEST_CASE("expectation of Hermitian operators is real for random states") {
  RandomSource random(7);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Matrix4cd h = random.hermitian4();
    const StateVector psi = random.state();
    CHECK(std::abs(std::imag(expectation(h, psi))) < 1e-12);
  }
}

TEST_CASE("density-matrix expectation and adjoint") {
  RandomSource random(3);
  const DensityMatrix rho = random.density_matrix();
  CHECK(std::real(dm_expectation(Operator::Identity(), rho)) == doctest::Approx(1.0));

  const StateVector eg = basis_state(kEG);
  const DensityMatrix proj = eg * eg.adjoint();
  CHECK(std::real(dm_expectation(number_op1(), proj)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(dm_expectation(number_op1(), DensityMatrix::Zero()), std::domain_error);

  const Operator lower1 = on_qubit1(sigma_minus());
  const Operator raise1 = on_qubit1(sigma_plus());
  CHECK((lower1.adjoint() - raise1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hermiticity and density-matrix validity checks") {
  RandomSource random(11);
  const Eigen::Matrix4cd h = random.hermitian4();
  CHECK(is_hermitian(h));
  CHECK_NOTHROW(require_hermitian(h));

  Eigen::Matrix4cd skewed = h;
  skewed(0, 1) += Complex(0.0, 1e-6);
  CHECK(!is_hermitian(skewed));
  CHECK_THROWS_AS(require_hermitian(skewed), std::invalid_argument);

  const DensityMatrix rho = random.density_matrix();
  CHECK(is_valid_density_matrix(rho));
  CHECK(min_eigenvalue(rho) >= 0.0);

  DensityMatrix negative = rho;
  negative(0, 0) -= 0.5;
  CHECK(!is_valid_density_matrix(negative));
}
