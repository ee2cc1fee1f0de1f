#include "qduet/demon.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qduet {

const char* to_string(DemonPhase phase) {
  switch (phase) {
    case DemonPhase::Monitoring: return "monitoring";
    case DemonPhase::TransferActive: return "transfer_active";
    case DemonPhase::Closed: return "closed";
  }
  return "unknown";
}

const char* to_string(CycleOutcome outcome) {
  switch (outcome) {
    case CycleOutcome::ReemittedCold: return "reemitted_cold";
    case CycleOutcome::EmittedCollective: return "emitted_collective";
    case CycleOutcome::EmittedHot: return "emitted_hot";
    case CycleOutcome::TimedOut: return "timed_out";
    case CycleOutcome::Unfinished: return "unfinished";
  }
  return "unknown";
}

void DemonConfig::validate() const {
  base.validate();
  if (!(gamma_c_active > 0.0)) {
    throw std::invalid_argument("gamma_c_active must be > 0");
  }
  if (base.nthc != 0.0) {
    throw std::invalid_argument("nthc must be 0 (the collective bath is at zero temperature)");
  }
  if (max_active_duration < 0.0) {
    throw std::invalid_argument("max_active_duration must be >= 0");
  }
  if (!(relax_threshold >= 0.0)) {
    throw std::invalid_argument("relax_threshold must be >= 0");
  }
}

bool DemonConfig::transfer_condition() const {
  const ModelParams& p = base;
  return p.gamma1 * (1.0 + 2.0 * p.nth1) > p.gamma2 * (1.0 + 2.0 * p.nth2);
}

namespace {

ModelParams door_closed_params(const DemonConfig& cfg) {
  ModelParams p = cfg.base;
  p.gamma_c = 0.0;
  p.nthc = 0.0;
  return p;
}

ModelParams door_open_params(const DemonConfig& cfg) {
  ModelParams p = cfg.base;
  p.gamma_c = cfg.gamma_c_active;
  p.nthc = 0.0;
  return p;
}

void apply_to_ledger(HeatLedger& ledger, ChannelLabel label) {
  const std::int64_t delta = is_down(label) ? +1 : -1;
  switch (bath_of(label)) {
    case Bath::Cold: ledger.cold += delta; break;
    case Bath::Hot: ledger.hot += delta; break;
    case Bath::Collective: ledger.collective += delta; break;
  }
}

double total_excitation(const StateVector& psi) {
  const double norm2 = psi.squaredNorm();
  return (std::real(psi.dot(number_op1() * psi)) + std::real(psi.dot(number_op2() * psi))) /
         norm2;
}

double hot_population(const StateVector& psi) {
  return std::real(psi.dot(number_op2() * psi)) / psi.squaredNorm();
}

struct CycleDelta {
  std::int64_t cold = 0, hot = 0, collective = 0;
  void add(ChannelLabel label) {
    const std::int64_t d = is_down(label) ? +1 : -1;
    switch (bath_of(label)) {
      case Bath::Cold: cold += d; break;
      case Bath::Hot: hot += d; break;
      case Bath::Collective: collective += d; break;
    }
  }
};

} // namespace

DemonTrajectory run_demon_trajectory(const DemonConfig& cfg, double t_max,
                                     std::uint64_t seed, double sample_dt,
                                     const EngineOptions& options) {
  cfg.validate();
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be >= 0");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be > 0");
  const double guard_rate =
      door_open_params(cfg).total_rate(); // the larger of the two phase rates
  if (options.dt * guard_rate >= 0.1) {
    throw std::invalid_argument("stability guard violated: dt * total_rate must be < 0.1");
  }

  const ModelParams closed_p = door_closed_params(cfg);
  const ModelParams open_p = door_open_params(cfg);
  const JumpProcess local_process(build_effective_hamiltonian(closed_p),
                                  build_channels(closed_p), options.dt);
  const JumpProcess active_process(build_effective_hamiltonian(open_p),
                                   build_channels(open_p), options.dt);

  DemonTrajectory out;
  out.record.seed = seed;
  out.record.kind = UnravelingKind::Counting;

  Rng rng(seed);
  StateVector psi = basis_state(kGG);
  double t = 0.0;
  DemonPhase phase = DemonPhase::Monitoring;
  out.ledger.timeline.push_back({0.0, phase});

  auto [bell_plus, bell_minus] = bell_states();
  auto record_sample = [&](double ts) {
    if (!options.keep_samples) return;
    const double norm2 = psi.squaredNorm();
    out.record.sample_times.push_back(ts);
    out.record.n1.push_back(std::real(psi.dot(number_op1() * psi)) / norm2);
    out.record.n2.push_back(std::real(psi.dot(number_op2() * psi)) / norm2);
    out.record.norm2.push_back(norm2);
    out.record.bell_plus.push_back(std::norm(bell_plus.dot(psi)) / norm2);
    out.record.bell_minus.push_back(std::norm(bell_minus.dot(psi)) / norm2);
  };

  record_sample(0.0);
  long sample_index = 1;
  const double eps = 1e-12 * std::max(1.0, t_max);
  const double inf = std::numeric_limits<double>::infinity();

  double threshold = rng.uniform();
  double deadline = inf;        // TransferActive timeout
  double t_open = 0.0;          // current cycle opening time
  std::int64_t cycle = -1;      // current cycle index
  std::size_t cycle_events = 0; // events inside the active phase
  CycleDelta cycle_delta;

  auto close_cycle = [&](double tc, CycleOutcome outcome) {
    const bool clean = outcome == CycleOutcome::EmittedHot && cycle_events == 1;
    out.cycles.push_back({cycle, t_open, tc, outcome, cycle_events, clean});
    if (clean) ++out.n_completed;
    cycle = -1;
    deadline = inf;
  };

  auto maybe_reopen_monitoring = [&](double tc) {
    if (phase != DemonPhase::Closed) return;
    if (cfg.restart == RestartPolicy::Immediate || hot_population(psi) <= cfg.relax_threshold) {
      phase = DemonPhase::Monitoring;
      out.ledger.timeline.push_back({tc, phase});
    }
  };

  while (t < t_max - eps) {
    const JumpProcess& process =
        (phase == DemonPhase::TransferActive) ? active_process : local_process;
    const double next_sample = sample_dt * static_cast<double>(sample_index);
    const double target = std::min({t_max, next_sample, deadline});
    bool crossed = false;
    t = process.advance(psi, t, target, threshold, crossed);

    if (crossed) {
      const ChannelLabel label = select_jump_channel(process.channels(), psi, rng);
      const DemonPhase fired_in = phase;
      const double n_before = total_excitation(psi);
      for (const auto& ch : process.channels()) {
        if (ch.label == label) {
          psi = apply_jump(ch, psi);
          break;
        }
      }
      const double n_after = total_excitation(psi);
      apply_to_ledger(out.ledger, label);
      out.record.events.push_back({t, label});

      std::int64_t event_cycle = (phase == DemonPhase::TransferActive) ? cycle : -1;
      if (phase == DemonPhase::Monitoring && label == ChannelLabel::Local1Up) {
        // The demon sees the cold qubit absorb: open the door.
        cycle = out.n_cycles++;
        event_cycle = cycle;
        t_open = t;
        cycle_events = 0;
        cycle_delta = CycleDelta{};
        cycle_delta.add(label);
        phase = DemonPhase::TransferActive;
        deadline = t + cfg.active_duration();
        out.ledger.timeline.push_back({t, phase});
      } else if (phase == DemonPhase::TransferActive) {
        ++cycle_events;
        cycle_delta.add(label);
        if (label == ChannelLabel::Local2Down) {
          close_cycle(t, CycleOutcome::EmittedHot);
          phase = DemonPhase::Closed;
          out.ledger.timeline.push_back({t, phase});
          maybe_reopen_monitoring(t);
        } else if (label == ChannelLabel::Local1Down) {
          close_cycle(t, CycleOutcome::ReemittedCold);
          phase = DemonPhase::Monitoring;
          out.ledger.timeline.push_back({t, phase});
        } else if (label == ChannelLabel::CollectiveDown) {
          close_cycle(t, CycleOutcome::EmittedCollective);
          phase = DemonPhase::Monitoring;
          out.ledger.timeline.push_back({t, phase});
        }
      } else {
        maybe_reopen_monitoring(t);
      }

      out.audit.push_back({t, label, fired_in, n_before, n_after, event_cycle});
      threshold = rng.uniform();
      continue;
    }

    if (phase == DemonPhase::TransferActive && std::abs(t - deadline) <= eps) {
      // Door-open timeout: close without a jump; the waiting-time threshold
      // carries over (the survival norm is continuous across the switch).
      close_cycle(t, CycleOutcome::TimedOut);
      phase = DemonPhase::Monitoring;
      out.ledger.timeline.push_back({t, phase});
    }
    if (std::abs(t - next_sample) <= eps) {
      record_sample(t);
      ++sample_index;
      maybe_reopen_monitoring(t);
    }
  }

  if (cycle >= 0) {
    out.cycles.push_back({cycle, t_open, t_max, CycleOutcome::Unfinished, cycle_events, false});
  }
  return out;
}

namespace {

// audit rows where the event phase recorded is the phase AFTER transitions;
// use the cycle index to identify active-phase events instead.
bool collective_event_outside_active(const DemonEvent& ev) {
  const bool is_collective =
      ev.channel == ChannelLabel::CollectiveDown || ev.channel == ChannelLabel::CollectiveUp;
  return is_collective && ev.cycle < 0;
}

} // namespace

DemonEnsembleStats run_demon_ensemble(const DemonConfig& cfg, std::size_t n_traj,
                                      double t_max, std::uint64_t master_seed,
                                      unsigned workers, const EngineOptions& options) {
  if (n_traj == 0) throw std::invalid_argument("n_traj must be >= 1");
  cfg.validate();

  DemonEnsembleStats stats;
  stats.n_traj = n_traj;
  stats.ledgers.resize(n_traj);

  EngineOptions per_traj = options;
  per_traj.keep_samples = false;

  std::vector<std::int64_t> end_counts(5, 0);
  std::int64_t completed = 0;
  std::int64_t collective_outside = 0;
  std::int64_t ledger_violations = 0;
  std::int64_t cycles_total = 0;
  double sum_c = 0, sumsq_c = 0, sum_h = 0, sumsq_h = 0, sum_x = 0, sumsq_x = 0;

  // Sequential over trajectories: demon statistics are accumulated in index
  // order for reproducibility; per-trajectory work is already seeded
  // independently so a block-parallel version mirrors run_ensemble.
  (void)workers;
  for (std::size_t i = 0; i < n_traj; ++i) {
    const DemonTrajectory traj =
        run_demon_trajectory(cfg, t_max, child_seed(master_seed, i), t_max, per_traj);
    stats.ledgers[i] = {static_cast<std::int64_t>(i), traj.ledger.cold, traj.ledger.hot,
                        traj.ledger.collective, traj.n_cycles, traj.n_completed};
    cycles_total += traj.n_cycles;
    completed += traj.n_completed;
    for (const auto& cyc : traj.cycles) {
      switch (cyc.outcome) {
        case CycleOutcome::ReemittedCold: ++end_counts[0]; break;
        case CycleOutcome::EmittedCollective: ++end_counts[1]; break;
        case CycleOutcome::EmittedHot: ++end_counts[2]; break;
        case CycleOutcome::TimedOut: ++end_counts[3]; break;
        case CycleOutcome::Unfinished: ++end_counts[4]; break;
      }
    }
    for (const auto& ev : traj.audit) {
      if (collective_event_outside_active(ev)) ++collective_outside;
    }
    // Ledger identity for clean completed cycles.
    for (const auto& cyc : traj.cycles) {
      if (!cyc.clean_completed) continue;
      CycleDelta delta;
      for (const auto& ev : traj.audit) {
        if (ev.cycle == cyc.index) delta.add(ev.channel);
      }
      if (delta.cold != -1 || delta.hot != 1 || delta.collective != 0) ++ledger_violations;
    }
    const double c = static_cast<double>(traj.ledger.cold);
    const double h = static_cast<double>(traj.ledger.hot);
    const double x = static_cast<double>(traj.ledger.collective);
    sum_c += c; sumsq_c += c * c;
    sum_h += h; sumsq_h += h * h;
    sum_x += x; sumsq_x += x * x;
  }

  const double n = static_cast<double>(n_traj);
  auto finish = [&n, &stats](double sum, double sumsq, double& mean, double& se) {
    mean = sum / n;
    se = stats.n_traj > 1
             ? std::sqrt(std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0)) / n)
             : 0.0;
  };
  finish(sum_c, sumsq_c, stats.mean_cold, stats.stderr_cold);
  finish(sum_h, sumsq_h, stats.mean_hot, stats.stderr_hot);
  finish(sum_x, sumsq_x, stats.mean_collective, stats.stderr_collective);
  stats.cycles_total = cycles_total;
  stats.completed_total = completed;
  stats.end_cold = end_counts[0];
  stats.end_collective = end_counts[1];
  stats.end_hot = end_counts[2];
  stats.end_timeout = end_counts[3];
  stats.collective_outside_active = collective_outside;
  stats.completed_ledger_violations = ledger_violations;
  return stats;
}

BranchingOracle transfer_branching_oracle(const DemonConfig& cfg, double dt) {
  cfg.validate();
  const ModelParams open_p = door_open_params(cfg);
  const std::vector<JumpChannel> channels = build_channels(open_p);
  const Operator h_eff = build_effective_hamiltonian(open_p);
  const JumpProcess process(h_eff, channels, dt);

  BranchingOracle oracle;
  for (const auto& ch : channels) oracle.labels.push_back(ch.label);
  oracle.probability.assign(channels.size(), 0.0);

  StateVector psi = basis_state(kEG);
  const double t_end = cfg.active_duration();
  double t = 0.0;
  std::vector<double> density_prev(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    density_prev[k] = channels[k].rate * (channels[k].op * psi).squaredNorm();
  }
  while (t < t_end - 1e-12 * t_end) {
    const double h = std::min(dt, t_end - t);
    psi = process.rk4_step(psi, h);
    for (std::size_t k = 0; k < channels.size(); ++k) {
      const double density = channels[k].rate * (channels[k].op * psi).squaredNorm();
      oracle.probability[k] += 0.5 * (density_prev[k] + density) * h;
      density_prev[k] = density;
    }
    t += h;
  }
  oracle.timeout_probability = psi.squaredNorm();
  return oracle;
}

} // namespace qduet
