#pragma once

// Physical model of two noninteracting qubits with local and collective
// dissipation: Hamiltonian, thermal jump channels, the non-Hermitian
// effective Hamiltonian that generates the no-jump evolution, and the
// closed-form solution of that evolution on the one-excitation manifold.

#include <string>
#include <vector>

#include "qduet/algebra.hpp"

namespace qduet {

struct ModelParams {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma_c = 0.0;
  double nth1 = 0.0;
  double nth2 = 0.0;
  double nthc = 0.0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool zero_temperature() const { return nth1 == 0.0 && nth2 == 0.0 && nthc == 0.0; }

  // Sum of all active channel rates (stability guards).
  double total_rate() const;
};

enum class ChannelLabel {
  Local1Down,
  Local1Up,
  Local2Down,
  Local2Up,
  CollectiveDown,
  CollectiveUp,
};

enum class Bath { Cold, Hot, Collective };

const char* to_string(ChannelLabel label);
ChannelLabel channel_label_from_string(const std::string& name);
bool is_down(ChannelLabel label);
Bath bath_of(ChannelLabel label);

struct JumpChannel {
  ChannelLabel label;
  Operator op;   // the 1/sqrt2 of the collective operator lives here, not in the rate
  double rate;   // thermal rule: gamma*(nth+1) down, gamma*nth up
};

// H = (omega1/2) sigma_z(1) + (omega2/2) sigma_z(2).
Operator build_hamiltonian(const ModelParams& p);

// Only channels with strictly positive rate are returned: 3 at zero
// temperature, up to 6 thermally.
std::vector<JumpChannel> build_channels(const ModelParams& p);

// H_eff = H - (i/2) sum_mu rate_mu J_mu^dag J_mu. The state-dependent scalar
// that would keep the norm fixed is dropped; no-jump evolution runs
// unnormalized and observables are normalized on readout.
Operator build_effective_hamiltonian(const ModelParams& p);
Operator build_effective_hamiltonian(const Operator& h,
                                     const std::vector<JumpChannel>& channels);

struct ManifoldAnalytics {
  double total_rate;   // Gamma = gamma1 + gamma2 + gamma_c
  Complex eta;         // principal sqrt of gamma_c^2 + (dgamma + 2i domega)^2
  double delta_gamma;  // gamma1 - gamma2
  double delta_omega;  // omega1 - omega2
};

ManifoldAnalytics manifold_analytics(const ModelParams& p);

// Closed-form no-jump propagator exp(-i H_eff t) restricted to the
// one-excitation manifold, basis {|e,g>, |g,e>} (row/col 0 = |e,g>).
// Valid for the zero-temperature three-channel model. t >= 0.
Eigen::Matrix2cd analytic_propagator(const ModelParams& p, double t);

// U(t)|e,g> embedded in the 4-dim space, unnormalized; its squared norm is
// the no-jump survival probability.
StateVector analytic_no_jump_state(const ModelParams& p, double t);

// t->inf limit of the normalized |<g,e|psi(t)>|^2 for the no-jump evolution
// from |e,g>: gamma_c^2 / (gamma_c^2 + (eta - dgamma)^2). Requires
// omega1 == omega2 (throws std::domain_error otherwise).
double transfer_fidelity_infinite(const ModelParams& p);

// ||psi_no_jump(t)||^2, monotone non-increasing, survival_probability(0) = 1.
double survival_probability(const ModelParams& p, double t);

struct EffectiveRates {
  double gtilde1; // gamma1 (1 + 2 nth1)
  double gtilde2;
  double gtilde_c;
};

EffectiveRates effective_thermal_rates(const ModelParams& p);

} // namespace qduet
