#include <doctest.h>

#include "qduet/lindblad.hpp"
#include "test_oracles.hpp"

using namespace qduet;
using qduet::testing::RandomSource;

namespace {

ModelParams fig3_params() { return {10.0, 10.0, 2.2, 0.2, 1.0, 0.0, 0.0, 0.0}; }

DensityMatrix projector(int index) {
  const StateVector v = basis_state(index);
  return v * v.adjoint();
}

} // namespace

TEST_CASE("liouvillian right-hand side") {
  SUBCASE("the zero-temperature ground state is dark") {
    const DensityMatrix d = liouvillian_apply(fig3_params(), projector(kGG));
    CHECK(d.cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("single-qubit decay law d<n1>/dt = -gamma1") {
    ModelParams p;
    p.omega1 = 10.0;
    p.gamma1 = 0.7;
    const DensityMatrix d = liouvillian_apply(p, projector(kEG));
    const double dn1 = std::real((number_op1() * d).trace());
    CHECK(dn1 == doctest::Approx(-0.7).epsilon(1e-14));
  }

  SUBCASE("trace preservation and Hermiticity for random states") {
    RandomSource random(31);
    ModelParams p = fig3_params();
    p.nth1 = 0.1;
    p.nth2 = 0.2;
    p.nthc = 0.05;
    for (int rep = 0; rep < 50; ++rep) {
      const DensityMatrix rho = random.density_matrix();
      const DensityMatrix d = liouvillian_apply(p, rho);
      CHECK(std::abs(d.trace()) < 1e-13);
      CHECK(is_hermitian(d, 1e-13));
    }
  }

  SUBCASE("non-Hermitian input is rejected") {
    DensityMatrix bad = projector(kEG);
    bad(0, 1) = Complex(0.0, 1e-3);
    CHECK_THROWS_AS(liouvillian_apply(fig3_params(), bad), std::invalid_argument);
  }
}

TEST_CASE("master-equation integration") {
  SUBCASE("unique zero-temperature dark state") {
    RandomSource random(13);
    const DensityMatrix rho0 = random.density_matrix();
    const DensityMatrixSeries series =
        integrate_states(fig3_params(), rho0, 1e-3, 5.0, 25.0);
    const DensityMatrix final = series.states.back();
    CHECK(std::real(final(kGG, kGG)) > 1.0 - 1e-6);
  }

  SUBCASE("no dissipation, no motion of populations") {
    ModelParams p;
    p.omega1 = 3.0;
    p.omega2 = 1.0;
    const TimeSeries series = integrate(p, projector(kEG), 1e-3, 0.5, 2.0);
    for (const auto& row : series.rows) {
      CHECK(row[series.column("n1")] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(row[series.column("n2")] == doctest::Approx(0.0).epsilon(1e-12));
    }
  }

  SUBCASE("fig3 run: integrity, monotone n1 decay, n2 stays small") {
    const TimeSeries series = integrate(fig3_params(), projector(kEG), 1e-3, 0.1, 8.0);
    const std::size_t c1 = series.column("n1");
    const std::size_t c2 = series.column("n2");
    const std::size_t ct = series.column("trace");
    double prev_n1 = 1.0 + 1e-12;
    for (std::size_t i = 0; i < series.size(); ++i) {
      CHECK(std::abs(series.rows[i][ct] - 1.0) < 1e-9);
      CHECK(series.rows[i][c1] <= prev_n1 + 1e-12);
      CHECK(series.rows[i][c2] < 0.1);
      prev_n1 = series.rows[i][c1];
    }

    const DensityMatrixSeries states =
        integrate_states(fig3_params(), projector(kEG), 1e-3, 1.0, 8.0);
    for (const auto& rho : states.states) {
      CHECK(is_hermitian(rho, 1e-12));
      CHECK(min_eigenvalue(rho) >= -1e-10);
    }
  }

  SUBCASE("stability guard") {
    CHECK_THROWS_AS(integrate(fig3_params(), projector(kEG), 0.05, 0.1, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("empirical convergence order of the integrator is ~4") {
  const ModelParams p = fig3_params();
  const DensityMatrix rho0 = projector(kEG);
  auto final_state = [&](double dt) {
    return integrate_states(p, rho0, dt, 5.0, 5.0).states.back();
  };
  const DensityMatrix reference = final_state(0.00125);
  const double err1 = (final_state(0.02) - reference).cwiseAbs().maxCoeff();
  const double err2 = (final_state(0.01) - reference).cwiseAbs().maxCoeff();
  const double order = std::log2(err1 / err2);
  CHECK(order >= 3.8);
  CHECK(order <= 4.6);
}

TEST_CASE("steady states") {
  SUBCASE("zero temperature relaxes to |g,g>") {
    const DensityMatrix rho = steady_state(fig3_params(), 1e-12, 1e-3);
    CHECK(std::real(rho(kGG, kGG)) > 1.0 - 1e-9);
  }

  SUBCASE("thermal single qubit: detailed balance occupation n/(2n+1)") {
    for (double n : {0.05, 0.1, 0.5}) {
      ModelParams p;
      p.omega1 = 1.0;
      p.gamma1 = 1.0;
      p.nth1 = n;
      const DensityMatrix rho = steady_state(p, 1e-13, 1e-3);
      const double occ = std::real(dm_expectation(number_op1(), rho).real());
      CHECK(occ == doctest::Approx(n / (2.0 * n + 1.0)).epsilon(1e-7));
    }
  }

  SUBCASE("symmetric thermal parameters give equal populations") {
    ModelParams p;
    p.omega1 = p.omega2 = 2.0;
    p.gamma1 = p.gamma2 = 0.5;
    p.gamma_c = 0.3;
    p.nth1 = p.nth2 = 0.2;
    const DensityMatrix rho = steady_state(p, 1e-13, 1e-3);
    const double o1 = std::real(dm_expectation(number_op1(), rho).real());
    const double o2 = std::real(dm_expectation(number_op2(), rho).real());
    CHECK(o1 == doctest::Approx(o2).epsilon(1e-9));
  }

  SUBCASE("no active channel is rejected") {
    ModelParams p;
    p.omega1 = 1.0;
    CHECK_THROWS_AS(steady_state(p), std::invalid_argument);
  }
}

TEST_CASE("heat currents") {
  SUBCASE("zero temperature, excited cold qubit") {
    const ModelParams p = fig3_params();
    const HeatCurrentReport r = heat_currents(p, projector(kEG));
    CHECK(r.current_cold == doctest::Approx(10.0 * 2.2).epsilon(1e-14));
    CHECK(r.current_hot == doctest::Approx(0.0));
    CHECK(r.current_collective == doctest::Approx(10.0 * 0.5).epsilon(1e-14));
  }

  SUBCASE("ground state at zero temperature carries no current") {
    const HeatCurrentReport r = heat_currents(fig3_params(), projector(kGG));
    CHECK(r.current_cold == 0.0);
    CHECK(r.current_hot == 0.0);
    CHECK(r.current_collective == 0.0);
  }

  SUBCASE("energy balance at a thermal steady state") {
    ModelParams p;
    p.omega1 = p.omega2 = 2.0;
    p.gamma1 = 0.8;
    p.gamma2 = 0.3;
    p.gamma_c = 0.4;
    p.nth1 = 0.1;
    p.nth2 = 0.3;
    p.nthc = 0.05;
    const DensityMatrix rho = steady_state(p, 1e-13, 1e-3);
    const HeatCurrentReport r = heat_currents(p, rho);
    CHECK(std::abs(r.current_cold + r.current_hot + r.current_collective) < 1e-9);
  }

  SUBCASE("detuned collective current is rejected") {
    ModelParams p = fig3_params();
    p.omega2 = 9.0;
    CHECK_THROWS_AS(heat_currents(p, projector(kEG)), std::domain_error);
  }

  SUBCASE("demon-regime baseline: the zero-temperature collective bath drains both local baths") {
    // With the door always open and nthc = 0, the collective bath is the
    // coldest reservoir: both local currents are negative (the baths feed
    // the system) and the collective bath absorbs everything.
    ModelParams p;
    const double gamma_c = 5.0 / 11.0;
    p.omega1 = p.omega2 = 10.0 * gamma_c;
    p.gamma1 = 1.0;
    p.gamma2 = 1.0 / 11.0;
    p.gamma_c = gamma_c;
    p.nth1 = 0.05;
    p.nth2 = 0.1;
    const DensityMatrix rho = steady_state(p, 1e-13, 2e-3);
    const HeatCurrentReport r = heat_currents(p, rho);
    CHECK(r.current_cold < 0.0);
    CHECK(r.current_hot < 0.0);
    CHECK(r.current_collective > 0.0);
    CHECK(std::abs(r.current_cold + r.current_hot + r.current_collective) < 1e-9);

    // A warm enough collective bath flips the cold current positive.
    ModelParams warm = p;
    warm.nthc = 0.2;
    const HeatCurrentReport rw = heat_currents(warm, steady_state(warm, 1e-13, 2e-3));
    CHECK(rw.current_cold > 0.0);

    // Decoupled qubits sit in local equilibrium: no net currents at all.
    ModelParams off = p;
    off.gamma_c = 0.0;
    const HeatCurrentReport r0 = heat_currents(off, steady_state(off, 1e-13, 2e-3));
    CHECK(std::abs(r0.current_cold) < 1e-10);
    CHECK(std::abs(r0.current_hot) < 1e-10);
    CHECK(r0.current_collective == 0.0);
  }
}
