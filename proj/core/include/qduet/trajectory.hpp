#pragma once

// Stochastic unravelings of the master equation: counting (quantum-jump)
// trajectories, their displaced-jump variant with a local oscillator of
// amplitude beta, and the diffusive homodyne limit. Deterministic per-seed,
// with a parallel ensemble runner whose output is independent of the worker
// count.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qduet/algebra.hpp"
#include "qduet/model.hpp"
#include "qduet/rng.hpp"
#include "qduet/timeseries.hpp"

namespace qduet {

enum class UnravelingKind { Counting, DisplacedCounting, HomodyneDiffusion };

const char* to_string(UnravelingKind kind);
UnravelingKind unraveling_from_string(const std::string& name);

struct JumpEvent {
  double time;
  ChannelLabel channel;
};

struct TrajectoryRecord {
  std::vector<double> sample_times;
  std::vector<double> n1;         // normalized qubit-1 population
  std::vector<double> n2;         // normalized qubit-2 population
  std::vector<double> norm2;      // squared norm since the last jump (counting)
  std::vector<double> bell_plus;  // |<Psi+|psi>|^2, normalized
  std::vector<double> bell_minus; // |<Psi-|psi>|^2, normalized
  std::vector<JumpEvent> events;  // ordered by time
  std::uint64_t seed = 0;
  UnravelingKind kind = UnravelingKind::Counting;
  double beta = 0.0;
};

struct EngineOptions {
  double dt = 1e-3;            // integrator step
  bool bernoulli_mode = false; // per-step Bernoulli jumps instead of waiting times
  bool keep_samples = true;    // false: record events only (cheap for big ensembles)
};

// One RK4 step of d psi/dt = -i H_eff psi on the unnormalized state.
StateVector evolve_no_jump(const ModelParams& p, const StateVector& psi, double dt);

struct WaitingTimeResult {
  std::optional<double> jump_time; // empty: no jump before the horizon
  StateVector psi;                 // unnormalized state at jump_time or horizon
};

// Waiting-time sampling: draws r uniform in (0,1) and evolves the
// unnormalized state until ||psi||^2 <= r or the horizon is reached.
WaitingTimeResult sample_waiting_time(const ModelParams& p, const StateVector& psi0,
                                      Rng& rng, double horizon, double dt = 1e-3);

// Per-channel weight rate * <psi|J^dag J|psi> (unnormalized psi is fine, the
// selection only uses ratios).
std::vector<double> jump_weights(const std::vector<JumpChannel>& channels,
                                 const StateVector& psi);

// Picks mu with probability proportional to its weight. Throws
// std::domain_error when every weight vanishes.
ChannelLabel select_jump_channel(const std::vector<JumpChannel>& channels,
                                 const StateVector& psi, Rng& rng);

// J psi renormalized to unit norm. Throws std::domain_error on an
// annihilated state.
StateVector apply_jump(const JumpChannel& channel, const StateVector& psi);

// The waiting-time jump engine over an arbitrary (H_eff, channels) pair.
// Shared by the plain counting runs, the displaced-jump unraveling and the
// demon's phase-switched protocol.
class JumpProcess {
 public:
  JumpProcess(Operator h_eff, std::vector<JumpChannel> channels, double dt);

  // Advances the unnormalized state from `t` toward `t_stop`, stopping early
  // at the first ||psi||^2 <= threshold crossing (located inside the step to
  // integrator accuracy). Returns the reached time and sets `crossed`.
  double advance(StateVector& psi, double t, double t_stop, double threshold,
                 bool& crossed) const;

  StateVector rk4_step(const StateVector& psi, double h) const;

  // Exactly dark (all jump weights zero) and an eigenstate of H_eff: nothing
  // can ever happen again.
  bool stationary(const StateVector& psi) const;

  const std::vector<JumpChannel>& channels() const { return channels_; }
  const Operator& effective_hamiltonian() const { return h_eff_; }
  double dt() const { return dt_; }

 private:
  Operator h_eff_;
  std::vector<JumpChannel> channels_;
  double dt_;
};

// Displaced-jump ingredients: operators J + beta and the compensated
// effective Hamiltonian
//   H_eff(beta) = H - (i/2) sum rate [ beta (J - J^dag) + (J+beta)^dag (J+beta) ],
// which averages back to the unchanged master equation and reduces to the
// plain counting engine at beta = 0.
std::vector<JumpChannel> displaced_channels(const std::vector<JumpChannel>& channels,
                                            double beta);
Operator displaced_effective_hamiltonian(const Operator& h,
                                         const std::vector<JumpChannel>& channels,
                                         double beta);

TrajectoryRecord run_counting_trajectory(const ModelParams& p, const StateVector& psi0,
                                         double t_max, double sample_dt,
                                         std::uint64_t seed,
                                         const EngineOptions& options = {});

// DisplacedCounting: counting engine on the displaced ingredients above.
// HomodyneDiffusion: Euler-Maruyama on the standard diffusive state
// equation, one real noise increment per channel per step (variance = step).
TrajectoryRecord run_homodyne_trajectory(const ModelParams& p, const StateVector& psi0,
                                         double t_max, double sample_dt,
                                         std::uint64_t seed, UnravelingKind kind,
                                         double beta, const EngineOptions& options = {});

TrajectoryRecord run_trajectory(const ModelParams& p, const StateVector& psi0,
                                double t_max, double sample_dt, std::uint64_t seed,
                                UnravelingKind kind, double beta,
                                const EngineOptions& options = {});

// Final-state classification by total excitation number.
enum class FinalClass { Ground = 0, OneExcitation = 1, TwoExcitations = 2, Mixed = 3 };

struct EnsembleResult {
  std::size_t n_traj = 0;
  UnravelingKind kind = UnravelingKind::Counting;
  std::vector<double> sample_times;
  std::vector<double> n1_mean, n1_stderr;
  std::vector<double> n2_mean, n2_stderr;
  std::vector<double> norm2_mean;
  // Per-channel jump counts per sample-grid bin; bin k covers
  // [k*sample_dt, (k+1)*sample_dt).
  double bin_width = 0.0;
  std::vector<std::array<std::int64_t, 6>> jump_counts;
  // Per-trajectory summaries, indexed by trajectory.
  std::vector<double> first_jump_time; // -1 when no jump happened
  std::vector<FinalClass> final_class;
};

// Trajectory i uses child_seed(master_seed, i); block-wise accumulation makes
// the result bitwise independent of `workers` (0 = hardware concurrency).
EnsembleResult run_ensemble(const ModelParams& p, const StateVector& psi0,
                            std::size_t n_traj, double t_max, double sample_dt,
                            std::uint64_t master_seed, UnravelingKind kind = UnravelingKind::Counting,
                            double beta = 0.0, unsigned workers = 0,
                            const EngineOptions& options = {});

// Full per-trajectory records (events always; samples when
// options.keep_samples). Parallel, order-independent.
std::vector<TrajectoryRecord> run_records(const ModelParams& p, const StateVector& psi0,
                                          std::size_t n_traj, double t_max,
                                          double sample_dt, std::uint64_t master_seed,
                                          UnravelingKind kind = UnravelingKind::Counting,
                                          double beta = 0.0, unsigned workers = 0,
                                          const EngineOptions& options = {});

} // namespace qduet
