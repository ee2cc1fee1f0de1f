#pragma once

// Deterministic integration of the master equation
//   d rho/dt = -i[H, rho] + sum_mu rate_mu ( J rho J^dag - {J^dag J, rho}/2 ),
// plus steady states and per-bath heat currents.

#include <vector>

#include "qduet/algebra.hpp"
#include "qduet/model.hpp"
#include "qduet/timeseries.hpp"

namespace qduet {

// Exact right-hand side; Hermitian and traceless output.
DensityMatrix liouvillian_apply(const ModelParams& p, const DensityMatrix& rho);
DensityMatrix liouvillian_apply(const Operator& h, const std::vector<JumpChannel>& channels,
                                const DensityMatrix& rho);

struct Observable {
  std::string name;
  Operator op;
};

// n1, n2 populations.
std::vector<Observable> population_observables();

// Fixed-step classic 4th-order integration, sampling the requested
// observables (plus trace and purity) every sample_dt. Enforces the
// stability guard dt * total_rate < 0.1 and a Hermitian rho0; throws
// std::invalid_argument on violation. Samples land exactly on the grid.
TimeSeries integrate(const ModelParams& p, const DensityMatrix& rho0, double dt,
                     double sample_dt, double t_max,
                     const std::vector<Observable>& observables = population_observables());

// Density matrices on the sample grid (postselection input).
struct DensityMatrixSeries {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

DensityMatrixSeries integrate_states(const ModelParams& p, const DensityMatrix& rho0,
                                     double dt, double sample_dt, double t_max);

// Integrates from the maximally mixed state until ||d rho/dt||_max < tol.
// Throws std::runtime_error when the step budget is exhausted.
DensityMatrix steady_state(const ModelParams& p, double tol = 1e-12,
                           double dt = 1e-3, double max_time = 2e4);

struct HeatCurrentReport {
  double current_cold;       // energy per unit time INTO the cold (qubit-1) bath
  double current_hot;        // into the hot (qubit-2) bath
  double current_collective; // into the collective bath
};

// current into bath b = omega_b * [ sum_down rate <J^dag J> - sum_up rate <J J^dag> ]
// with J the lowering operator of bath b. The collective current needs
// omega1 == omega2 for an unambiguous quantum energy; throws otherwise when
// gamma_c > 0.
HeatCurrentReport heat_currents(const ModelParams& p, const DensityMatrix& rho);

} // namespace qduet
