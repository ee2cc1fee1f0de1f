#include <doctest.h>

#include <cmath>
#include <map>

#include "qduet/demon.hpp"
#include "test_stats.hpp"

using namespace qduet;
using qduet::testing::binomial_stderr;

namespace {

DemonConfig fig4_config() {
  DemonConfig cfg;
  const double gamma_c_active = 5.0 / 11.0;
  cfg.base.omega1 = cfg.base.omega2 = 10.0 * gamma_c_active;
  cfg.base.gamma1 = 1.0;
  cfg.base.gamma2 = 1.0 / 11.0;
  cfg.base.gamma_c = 0.0;
  cfg.base.nth1 = 0.05;
  cfg.base.nth2 = 0.1;
  cfg.base.nthc = 0.0;
  cfg.gamma_c_active = gamma_c_active;
  return cfg;
}

EngineOptions demon_options() {
  EngineOptions options;
  options.dt = 5e-3;
  return options;
}

} // namespace

TEST_CASE("demon configuration validation") {
  DemonConfig cfg = fig4_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.transfer_condition());

  cfg.gamma_c_active = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = fig4_config();
  cfg.base.nthc = 0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("single demon trajectories") {
  const DemonConfig cfg = fig4_config();
  const DemonTrajectory traj = run_demon_trajectory(cfg, 400.0, 11, 1.0, demon_options());

  SUBCASE("ledger equals the event bookkeeping") {
    std::int64_t cold = 0, hot = 0, collective = 0;
    for (const auto& ev : traj.audit) {
      const std::int64_t d = is_down(ev.channel) ? +1 : -1;
      switch (bath_of(ev.channel)) {
        case Bath::Cold: cold += d; break;
        case Bath::Hot: hot += d; break;
        case Bath::Collective: collective += d; break;
      }
    }
    CHECK(traj.ledger.cold == cold);
    CHECK(traj.ledger.hot == hot);
    CHECK(traj.ledger.collective == collective);
    CHECK(traj.audit.size() == traj.record.events.size());
  }

  SUBCASE("event-by-event balance: one bath quantum against one system excitation") {
    for (const auto& ev : traj.audit) {
      const double system_change = ev.n_after - ev.n_before;
      const double bath_change = is_down(ev.channel) ? +1.0 : -1.0;
      CHECK(std::abs(system_change + bath_change) < 1e-9);
      // reachable demon states are manifold-pure, so the excitation numbers
      // at jumps are integers
      CHECK(std::abs(ev.n_before - std::round(ev.n_before)) < 1e-9);
    }
  }

  SUBCASE("phase machine invariants") {
    // every collective event lies inside a door-open cycle
    for (const auto& ev : traj.audit) {
      if (bath_of(ev.channel) == Bath::Collective) {
        CHECK(ev.phase == DemonPhase::TransferActive);
        CHECK(ev.cycle >= 0);
      }
    }
    // every TransferActive interval in the timeline starts at a Local1Up event
    for (std::size_t k = 1; k < traj.ledger.timeline.size(); ++k) {
      const PhaseInterval& interval = traj.ledger.timeline[k];
      if (interval.phase != DemonPhase::TransferActive) continue;
      bool matched = false;
      for (const auto& ev : traj.audit) {
        if (ev.channel == ChannelLabel::Local1Up &&
            std::abs(ev.time - interval.t_begin) < 1e-12) {
          matched = true;
          break;
        }
      }
      CHECK(matched);
    }
  }

  SUBCASE("completed cycles transfer exactly one quantum cold -> hot") {
    std::size_t completed = 0;
    for (const auto& cyc : traj.cycles) {
      if (!cyc.clean_completed) continue;
      ++completed;
      std::int64_t cold = 0, hot = 0, collective = 0;
      for (const auto& ev : traj.audit) {
        if (ev.cycle != cyc.index) continue;
        const std::int64_t d = is_down(ev.channel) ? +1 : -1;
        switch (bath_of(ev.channel)) {
          case Bath::Cold: cold += d; break;
          case Bath::Hot: hot += d; break;
          case Bath::Collective: collective += d; break;
        }
      }
      CHECK(cold == -1);
      CHECK(hot == 1);
      CHECK(collective == 0);
    }
    CHECK(static_cast<std::int64_t>(completed) == traj.n_completed);
  }

  SUBCASE("deterministic in the seed") {
    const DemonTrajectory again = run_demon_trajectory(cfg, 400.0, 11, 1.0, demon_options());
    CHECK(again.ledger.cold == traj.ledger.cold);
    CHECK(again.ledger.hot == traj.ledger.hot);
    CHECK(again.ledger.collective == traj.ledger.collective);
    REQUIRE(again.audit.size() == traj.audit.size());
    for (std::size_t k = 0; k < traj.audit.size(); ++k) {
      CHECK(again.audit[k].time == traj.audit[k].time);
      CHECK(again.audit[k].channel == traj.audit[k].channel);
    }
  }
}

TEST_CASE("a cycle with the signature event pair books (cold -1, hot +1)") {
  const DemonConfig cfg = fig4_config();
  bool found = false;
  for (std::uint64_t seed = 0; seed < 60 && !found; ++seed) {
    const DemonTrajectory traj = run_demon_trajectory(cfg, 80.0, seed, 1.0, demon_options());
    for (const auto& cyc : traj.cycles) {
      if (!cyc.clean_completed) continue;
      found = true;
      break;
    }
    if (!found) continue;
    // the trajectory contains at least one Local1Up -> Local2Down pair whose
    // phase delta is the single-quantum transfer; verified in detail above
  }
  CHECK(found);
}

TEST_CASE("first-jump branching inside the active phase matches the oracle") {
  const DemonConfig cfg = fig4_config();
  const BranchingOracle oracle = transfer_branching_oracle(cfg);

  double total = oracle.timeout_probability;
  for (double p : oracle.probability) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

  // Monte Carlo: frequencies of the first event inside TransferActive phases
  // that opened from a pure |e,g> state (qubit 2 relaxed at opening).
  std::map<ChannelLabel, std::size_t> first_event_counts;
  std::size_t phases = 0;
  const std::size_t target = 4000;
  for (std::uint64_t seed = 1000; phases < target; ++seed) {
    REQUIRE(seed < 4000);
    const DemonTrajectory traj = run_demon_trajectory(cfg, 2000.0, seed, 2000.0, demon_options());
    for (const auto& cyc : traj.cycles) {
      if (cyc.outcome == CycleOutcome::Unfinished) continue;
      // phase entry state must be |e,g>: the opening jump has n_after = 1
      // and the previous hot population zero; identify via the audit
      const DemonEvent* opener = nullptr;
      const DemonEvent* first_inside = nullptr;
      for (const auto& ev : traj.audit) {
        if (ev.cycle != cyc.index) continue;
        if (ev.channel == ChannelLabel::Local1Up && opener == nullptr &&
            std::abs(ev.time - cyc.t_open) < 1e-12) {
          opener = &ev;
          continue;
        }
        if (opener && !first_inside) {
          first_inside = &ev;
          break;
        }
      }
      if (!opener || !first_inside) continue;
      if (std::abs(opener->n_after - 1.0) > 1e-9) continue; // entry not |e,g>
      ++phases;
      ++first_event_counts[first_inside->channel];
      if (phases >= target) break;
    }
  }

  for (std::size_t k = 0; k < oracle.labels.size(); ++k) {
    const double expected = oracle.probability[k];
    const double observed =
        static_cast<double>(first_event_counts[oracle.labels[k]]) / static_cast<double>(phases);
    CHECK(std::abs(observed - expected) <
          3.5 * binomial_stderr(std::max(expected, 1e-4), phases) + 2e-3);
  }
}

TEST_CASE("demon ensembles cool the cold bath") {
  const DemonConfig cfg = fig4_config();
  const DemonEnsembleStats stats =
      run_demon_ensemble(cfg, 60, 400.0, 2026, 0, demon_options());

  CHECK(stats.cycles_total > 400);
  CHECK(stats.collective_outside_active == 0);
  CHECK(stats.completed_ledger_violations == 0);

  // cold bath net quanta negative with high significance
  CHECK(stats.mean_cold + 3.0 * stats.stderr_cold < 0.0);

  // outcome frequencies: re-emission into the cold bath dominates, then the
  // collective bath, and a small completed-transfer fraction
  const double n = static_cast<double>(stats.end_cold + stats.end_collective +
                                       stats.end_hot + stats.end_timeout);
  CHECK(stats.end_cold / n > 0.6);
  CHECK(stats.end_collective / n > 0.05);
  CHECK(stats.end_hot / n < 0.1);

  // ledger rows are self-consistent
  std::int64_t cycles = 0;
  for (const auto& row : stats.ledgers) cycles += row.n_cycles;
  CHECK(cycles == stats.cycles_total);
}

TEST_CASE("restart policies coincide when the hot qubit relaxes instantly") {
  // A hot-bath emission leaves qubit 2 exactly in |g>, so the relaxation gate
  // is satisfied at entry and both policies yield the same trajectory.
  DemonConfig gated = fig4_config();
  DemonConfig immediate = fig4_config();
  immediate.restart = RestartPolicy::Immediate;
  const DemonTrajectory a = run_demon_trajectory(gated, 300.0, 5, 1.0, demon_options());
  const DemonTrajectory b = run_demon_trajectory(immediate, 300.0, 5, 1.0, demon_options());
  REQUIRE(a.audit.size() == b.audit.size());
  for (std::size_t k = 0; k < a.audit.size(); ++k) {
    CHECK(a.audit[k].time == b.audit[k].time);
    CHECK(a.audit[k].channel == b.audit[k].channel);
  }
}
