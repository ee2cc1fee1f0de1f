#pragma once

// Feedback protocol that turns the collective channel into a Maxwell demon:
// monitor the cold qubit, open the collective "door" when it absorbs an
// excitation, close it after the hot-bath emission, and keep a per-bath
// ledger of exchanged quanta.

#include <cstdint>
#include <string>
#include <vector>

#include "qduet/model.hpp"
#include "qduet/trajectory.hpp"

namespace qduet {

enum class DemonPhase { Monitoring, TransferActive, Closed };
const char* to_string(DemonPhase phase);

enum class RestartPolicy { RelaxationGated, Immediate };

struct DemonConfig {
  // Base model with gamma_c treated as switchable; base.gamma_c is ignored
  // (the door is closed outside TransferActive) and base.nthc must be 0.
  ModelParams base;
  double gamma_c_active = 0.0;
  double max_active_duration = 0.0; // 0: default 20 / gamma_c_active
  RestartPolicy restart = RestartPolicy::RelaxationGated;
  double relax_threshold = 1e-3; // <n2> gate for the relaxation-gated restart

  void validate() const; // throws std::invalid_argument naming the field
  // gtilde1 > gtilde2, the regime where the transfer works.
  bool transfer_condition() const;
  double active_duration() const {
    return max_active_duration > 0.0 ? max_active_duration : 20.0 / gamma_c_active;
  }
};

struct PhaseInterval {
  double t_begin;
  DemonPhase phase;
};

struct HeatLedger {
  // Net quanta per bath: +1 per down jump into the bath, -1 per up jump.
  std::int64_t cold = 0;
  std::int64_t hot = 0;
  std::int64_t collective = 0;
  std::vector<PhaseInterval> timeline;
};

// How a TransferActive phase ended.
enum class CycleOutcome { ReemittedCold, EmittedCollective, EmittedHot, TimedOut, Unfinished };
const char* to_string(CycleOutcome outcome);

// Per-event audit row (for invariant checks and ledger verification).
struct DemonEvent {
  double time;
  ChannelLabel channel;
  DemonPhase phase;        // phase in which the jump fired
  double n_before;         // total excitation expectation just before
  double n_after;          // and just after the jump
  std::int64_t cycle;      // index of the door-opening cycle, -1 outside
};

struct CycleSummary {
  std::int64_t index;
  double t_open;
  double t_close;
  CycleOutcome outcome;
  std::size_t n_events;    // events inside the phase, excluding the opening jump
  bool clean_completed;    // opened by Local1Up, closed by Local2Down, nothing between
};

struct DemonTrajectory {
  TrajectoryRecord record;
  HeatLedger ledger;
  std::vector<DemonEvent> audit;
  std::vector<CycleSummary> cycles;
  std::int64_t n_cycles = 0;
  std::int64_t n_completed = 0; // clean completed cycles
};

// Runs the counting engine with the channel set switched by phase:
// Monitoring/Closed use the four local thermal channels, TransferActive adds
// the collective channel at gamma_c_active. The system starts in |g,g>.
DemonTrajectory run_demon_trajectory(const DemonConfig& cfg, double t_max,
                                     std::uint64_t seed, double sample_dt = 0.05,
                                     const EngineOptions& options = {});

struct DemonLedgerRow {
  std::int64_t trial;
  std::int64_t cold, hot, collective;
  std::int64_t n_cycles, n_completed;
};

struct DemonEnsembleStats {
  std::size_t n_traj = 0;
  double mean_cold = 0.0, stderr_cold = 0.0;
  double mean_hot = 0.0, stderr_hot = 0.0;
  double mean_collective = 0.0, stderr_collective = 0.0;
  std::int64_t cycles_total = 0;
  std::int64_t completed_total = 0;
  std::int64_t end_cold = 0;       // TransferActive phases ended by Local1Down
  std::int64_t end_collective = 0; // by CollectiveDown
  std::int64_t end_hot = 0;        // by Local2Down
  std::int64_t end_timeout = 0;
  std::int64_t collective_outside_active = 0;   // invariant counter, must be 0
  std::int64_t completed_ledger_violations = 0; // invariant counter, must be 0
  std::vector<DemonLedgerRow> ledgers; // per trial
};

DemonEnsembleStats run_demon_ensemble(const DemonConfig& cfg, std::size_t n_traj,
                                      double t_max, std::uint64_t master_seed,
                                      unsigned workers = 0, const EngineOptions& options = {});

// First-jump branching oracle for a TransferActive phase entered in |e,g>:
// P(mu) = rate_mu * int <psi|J^dag J|psi> dt over the no-jump evolution,
// P(timeout) = leftover norm^2. Order matches the active channel list
// returned alongside.
struct BranchingOracle {
  std::vector<ChannelLabel> labels;
  std::vector<double> probability;
  double timeout_probability;
};

BranchingOracle transfer_branching_oracle(const DemonConfig& cfg, double dt = 1e-4);

} // namespace qduet
