#include "qduet/model.hpp"

#include <cmath>
#include <stdexcept>

namespace qduet {

namespace {

void require_nonnegative(double value, const char* field) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(field) + " must be finite and >= 0");
  }
}

} // namespace

void ModelParams::validate() const {
  if (!std::isfinite(omega1)) throw std::invalid_argument("omega1 must be finite");
  if (!std::isfinite(omega2)) throw std::invalid_argument("omega2 must be finite");
  require_nonnegative(gamma1, "gamma1");
  require_nonnegative(gamma2, "gamma2");
  require_nonnegative(gamma_c, "gamma_c");
  require_nonnegative(nth1, "nth1");
  require_nonnegative(nth2, "nth2");
  require_nonnegative(nthc, "nthc");
}

double ModelParams::total_rate() const {
  double sum = 0.0;
  for (const auto& ch : build_channels(*this)) sum += ch.rate;
  return sum;
}

const char* to_string(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::Local1Down: return "local1_down";
    case ChannelLabel::Local1Up: return "local1_up";
    case ChannelLabel::Local2Down: return "local2_down";
    case ChannelLabel::Local2Up: return "local2_up";
    case ChannelLabel::CollectiveDown: return "collective_down";
    case ChannelLabel::CollectiveUp: return "collective_up";
  }
  return "unknown";
}

ChannelLabel channel_label_from_string(const std::string& name) {
  for (ChannelLabel label :
       {ChannelLabel::Local1Down, ChannelLabel::Local1Up, ChannelLabel::Local2Down,
        ChannelLabel::Local2Up, ChannelLabel::CollectiveDown, ChannelLabel::CollectiveUp}) {
    if (name == to_string(label)) return label;
  }
  throw std::invalid_argument("unknown channel label: " + name);
}

bool is_down(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::Local1Down:
    case ChannelLabel::Local2Down:
    case ChannelLabel::CollectiveDown:
      return true;
    default:
      return false;
  }
}

Bath bath_of(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::Local1Down:
    case ChannelLabel::Local1Up:
      return Bath::Cold;
    case ChannelLabel::Local2Down:
    case ChannelLabel::Local2Up:
      return Bath::Hot;
    default:
      return Bath::Collective;
  }
}

Operator build_hamiltonian(const ModelParams& p) {
  return 0.5 * p.omega1 * on_qubit1(sigma_z()) + 0.5 * p.omega2 * on_qubit2(sigma_z());
}

std::vector<JumpChannel> build_channels(const ModelParams& p) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Operator collective_down =
      inv_sqrt2 * (on_qubit1(sigma_minus()) + on_qubit2(sigma_minus()));
  const Operator collective_up =
      inv_sqrt2 * (on_qubit1(sigma_plus()) + on_qubit2(sigma_plus()));

  std::vector<JumpChannel> channels;
  auto add = [&channels](ChannelLabel label, const Operator& op, double rate) {
    if (rate > 0.0) channels.push_back({label, op, rate});
  };
  add(ChannelLabel::Local1Down, on_qubit1(sigma_minus()), p.gamma1 * (p.nth1 + 1.0));
  add(ChannelLabel::Local1Up, on_qubit1(sigma_plus()), p.gamma1 * p.nth1);
  add(ChannelLabel::Local2Down, on_qubit2(sigma_minus()), p.gamma2 * (p.nth2 + 1.0));
  add(ChannelLabel::Local2Up, on_qubit2(sigma_plus()), p.gamma2 * p.nth2);
  add(ChannelLabel::CollectiveDown, collective_down, p.gamma_c * (p.nthc + 1.0));
  add(ChannelLabel::CollectiveUp, collective_up, p.gamma_c * p.nthc);
  return channels;
}

Operator build_effective_hamiltonian(const Operator& h,
                                     const std::vector<JumpChannel>& channels) {
  Operator h_eff = h;
  const Complex half_i(0.0, 0.5);
  for (const auto& ch : channels) {
    h_eff -= half_i * ch.rate * (ch.op.adjoint() * ch.op);
  }
  return h_eff;
}

Operator build_effective_hamiltonian(const ModelParams& p) {
  return build_effective_hamiltonian(build_hamiltonian(p), build_channels(p));
}

ManifoldAnalytics manifold_analytics(const ModelParams& p) {
  ManifoldAnalytics out;
  out.total_rate = p.gamma1 + p.gamma2 + p.gamma_c;
  out.delta_gamma = p.gamma1 - p.gamma2;
  out.delta_omega = p.omega1 - p.omega2;
  const Complex d(out.delta_gamma, 2.0 * out.delta_omega);
  out.eta = std::sqrt(Complex(p.gamma_c * p.gamma_c, 0.0) + d * d);
  return out;
}

namespace {

// cosh(eta t/4) and sinh(eta t/4)/eta, with the eta->0 limit taken by series
// below |eta| t < 1e-6, and an exp-scaled branch for large Re(eta t/4).
struct HyperbolicTerms {
  Complex cosh_term;     // cosh(z)
  Complex sinh_over_eta; // sinh(z)/eta = (t/4) sinh(z)/z
  double log_scale;      // both terms are to be multiplied by exp(log_scale)
};

HyperbolicTerms hyperbolic_terms(Complex eta, double t) {
  const Complex z = eta * (t / 4.0);
  HyperbolicTerms out{};
  out.log_scale = 0.0;
  if (std::abs(eta) * t < 1e-6) {
    const Complex z2 = z * z;
    out.cosh_term = 1.0 + z2 / 2.0;
    out.sinh_over_eta = (t / 4.0) * (1.0 + z2 / 6.0);
    return out;
  }
  if (z.real() > 200.0) {
    // cosh z = e^z (1 + e^{-2z})/2, sinh z = e^z (1 - e^{-2z})/2; pull the
    // e^z out so the caller can combine it with the decaying prefactor.
    const Complex e2 = std::exp(-2.0 * z);
    out.log_scale = z.real();
    const Complex phase = std::exp(Complex(0.0, z.imag()));
    out.cosh_term = phase * (1.0 + e2) * 0.5;
    out.sinh_over_eta = phase * (1.0 - e2) * 0.5 / eta;
    return out;
  }
  out.cosh_term = std::cosh(z);
  out.sinh_over_eta = std::sinh(z) / eta;
  return out;
}

} // namespace

Eigen::Matrix2cd analytic_propagator(const ModelParams& p, double t) {
  if (t < 0.0) throw std::domain_error("analytic_propagator: t must be >= 0");
  const ManifoldAnalytics a = manifold_analytics(p);
  const Complex d(a.delta_gamma, 2.0 * a.delta_omega);
  const HyperbolicTerms h = hyperbolic_terms(a.eta, t);
  const double prefactor_log = -a.total_rate * t / 4.0 + h.log_scale;
  const double prefactor = std::exp(prefactor_log);

  Eigen::Matrix2cd u;
  u(0, 0) = prefactor * (h.cosh_term - d * h.sinh_over_eta);
  u(1, 1) = prefactor * (h.cosh_term + d * h.sinh_over_eta);
  u(0, 1) = u(1, 0) = prefactor * (-p.gamma_c * h.sinh_over_eta);
  return u;
}

StateVector analytic_no_jump_state(const ModelParams& p, double t) {
  const Eigen::Matrix2cd u = analytic_propagator(p, t);
  StateVector psi = StateVector::Zero();
  psi(kEG) = u(0, 0);
  psi(kGE) = u(1, 0);
  return psi;
}

double transfer_fidelity_infinite(const ModelParams& p) {
  if (p.omega1 != p.omega2) {
    throw std::domain_error(
        "transfer_fidelity_infinite: detuned long-time limit undefined (omega1 != omega2)");
  }
  const double dgamma = p.gamma1 - p.gamma2;
  if (p.gamma_c == 0.0) {
    // Degenerate limit of the formula below: complete transfer for
    // dgamma > 0, none otherwise.
    return dgamma > 0.0 ? 1.0 : 0.0;
  }
  const double eta = std::sqrt(p.gamma_c * p.gamma_c + dgamma * dgamma);
  const double gap = eta - dgamma;
  return p.gamma_c * p.gamma_c / (p.gamma_c * p.gamma_c + gap * gap);
}

double survival_probability(const ModelParams& p, double t) {
  return analytic_no_jump_state(p, t).squaredNorm();
}

EffectiveRates effective_thermal_rates(const ModelParams& p) {
  return {p.gamma1 * (1.0 + 2.0 * p.nth1), p.gamma2 * (1.0 + 2.0 * p.nth2),
          p.gamma_c * (1.0 + 2.0 * p.nthc)};
}

} // namespace qduet
