#include "qduet/lindblad.hpp"

#include <cmath>
#include <stdexcept>

namespace qduet {

namespace {

// Precomputed channel data for the RHS inner loop.
struct ChannelTerms {
  Operator jump;       // sqrt(rate) J
  Operator half_jdagj; // rate J^dag J / 2
};

std::vector<ChannelTerms> channel_terms(const std::vector<JumpChannel>& channels) {
  std::vector<ChannelTerms> terms;
  terms.reserve(channels.size());
  for (const auto& ch : channels) {
    ChannelTerms t;
    t.jump = std::sqrt(ch.rate) * ch.op;
    t.half_jdagj = 0.5 * ch.rate * (ch.op.adjoint() * ch.op);
    terms.push_back(t);
  }
  return terms;
}

DensityMatrix rhs(const Operator& h, const std::vector<ChannelTerms>& terms,
                  const DensityMatrix& rho) {
  const Complex i(0.0, 1.0);
  DensityMatrix out = -i * (h * rho - rho * h);
  for (const auto& t : terms) {
    out += t.jump * rho * t.jump.adjoint();
    out -= t.half_jdagj * rho + rho * t.half_jdagj;
  }
  return out;
}

DensityMatrix rk4_step(const Operator& h, const std::vector<ChannelTerms>& terms,
                       const DensityMatrix& rho, double dt) {
  const DensityMatrix k1 = rhs(h, terms, rho);
  const DensityMatrix k2 = rhs(h, terms, rho + (0.5 * dt) * k1);
  const DensityMatrix k3 = rhs(h, terms, rho + (0.5 * dt) * k2);
  const DensityMatrix k4 = rhs(h, terms, rho + dt * k3);
  return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_stability(const ModelParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (dt * p.total_rate() >= 0.1) {
    throw std::invalid_argument("stability guard violated: dt * total_rate must be < 0.1");
  }
}

} // namespace

DensityMatrix liouvillian_apply(const Operator& h, const std::vector<JumpChannel>& channels,
                                const DensityMatrix& rho) {
  return rhs(h, channel_terms(channels), rho);
}

DensityMatrix liouvillian_apply(const ModelParams& p, const DensityMatrix& rho) {
  require_hermitian(rho);
  return liouvillian_apply(build_hamiltonian(p), build_channels(p), rho);
}

std::vector<Observable> population_observables() {
  return {{"n1", number_op1()}, {"n2", number_op2()}};
}

namespace {

template <typename SampleFn>
void run_fixed_grid(const ModelParams& p, const DensityMatrix& rho0, double dt,
                    double sample_dt, double t_max, SampleFn&& sample) {
  check_stability(p, dt);
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be > 0");
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be >= 0");
  require_hermitian(rho0);

  const Operator h = build_hamiltonian(p);
  const auto terms = channel_terms(build_channels(p));

  DensityMatrix rho = rho0;
  double t = 0.0;
  long sample_index = 0;
  const double eps = 1e-12 * std::max(1.0, t_max);
  sample(0.0, rho);
  ++sample_index;
  while (t < t_max - eps) {
    const double next_sample = sample_dt * static_cast<double>(sample_index);
    const double target = std::min(next_sample, t_max);
    while (t < target - eps) {
      const double h_step = std::min(dt, target - t);
      rho = rk4_step(h, terms, rho, h_step);
      t += h_step;
    }
    t = target;
    if (target <= t_max + eps && std::abs(target - sample_dt * sample_index) <= eps) {
      sample(target, rho);
      ++sample_index;
    }
  }
}

} // namespace

TimeSeries integrate(const ModelParams& p, const DensityMatrix& rho0, double dt,
                     double sample_dt, double t_max,
                     const std::vector<Observable>& observables) {
  TimeSeries series;
  for (const auto& obs : observables) series.names.push_back(obs.name);
  series.names.push_back("trace");
  series.names.push_back("purity");

  run_fixed_grid(p, rho0, dt, sample_dt, t_max, [&](double t, const DensityMatrix& rho) {
    std::vector<double> row;
    row.reserve(observables.size() + 2);
    for (const auto& obs : observables) {
      row.push_back(std::real((obs.op * rho).trace()));
    }
    row.push_back(std::real(rho.trace()));
    row.push_back(std::real((rho * rho).trace()));
    series.times.push_back(t);
    series.rows.push_back(std::move(row));
  });
  return series;
}

DensityMatrixSeries integrate_states(const ModelParams& p, const DensityMatrix& rho0,
                                     double dt, double sample_dt, double t_max) {
  DensityMatrixSeries series;
  run_fixed_grid(p, rho0, dt, sample_dt, t_max, [&](double t, const DensityMatrix& rho) {
    series.times.push_back(t);
    series.states.push_back(rho);
  });
  return series;
}

DensityMatrix steady_state(const ModelParams& p, double tol, double dt, double max_time) {
  if (build_channels(p).empty()) {
    throw std::invalid_argument("steady_state: no active dissipation channel");
  }
  check_stability(p, dt);
  const Operator h = build_hamiltonian(p);
  const auto terms = channel_terms(build_channels(p));

  DensityMatrix rho = DensityMatrix::Identity() / 4.0;
  const long check_every = 128;
  const long max_steps = static_cast<long>(max_time / dt);
  for (long step = 0; step < max_steps; ++step) {
    rho = rk4_step(h, terms, rho, dt);
    if (step % check_every == 0) {
      if (rhs(h, terms, rho).cwiseAbs().maxCoeff() < tol) {
        return rho;
      }
    }
  }
  throw std::runtime_error("steady_state: no convergence within the step budget");
}

HeatCurrentReport heat_currents(const ModelParams& p, const DensityMatrix& rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr) <= 0.0) throw std::domain_error("heat_currents: zero-trace density matrix");
  if (p.gamma_c > 0.0 && p.omega1 != p.omega2) {
    throw std::domain_error(
        "heat_currents: collective current undefined for omega1 != omega2");
  }

  auto quantum_flow = [&rho, &tr](const Operator& lowering, double rate_down,
                                  double rate_up) {
    const double down =
        rate_down * std::real(((lowering.adjoint() * lowering) * rho).trace() / tr);
    const double up =
        rate_up * std::real(((lowering * lowering.adjoint()) * rho).trace() / tr);
    return down - up;
  };

  const Operator j1 = on_qubit1(sigma_minus());
  const Operator j2 = on_qubit2(sigma_minus());
  const Operator jc =
      (on_qubit1(sigma_minus()) + on_qubit2(sigma_minus())) / std::sqrt(2.0);

  HeatCurrentReport report{};
  report.current_cold =
      p.omega1 * quantum_flow(j1, p.gamma1 * (p.nth1 + 1.0), p.gamma1 * p.nth1);
  report.current_hot =
      p.omega2 * quantum_flow(j2, p.gamma2 * (p.nth2 + 1.0), p.gamma2 * p.nth2);
  report.current_collective =
      p.omega1 * quantum_flow(jc, p.gamma_c * (p.nthc + 1.0), p.gamma_c * p.nthc);
  return report;
}

} // namespace qduet
