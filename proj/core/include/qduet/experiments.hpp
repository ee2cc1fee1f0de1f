#pragma once

// Implementations behind the CLI subcommands: each runs one experiment from
// a validated RunConfig and emits CSV/JSON data files plus a manifest.
// Kept in the library so the orchestration is directly testable.

#include <string>
#include <vector>

#include "qduet/run_config.hpp"

namespace qduet {

struct ExperimentResult {
  std::vector<std::string> data_files;
  std::string manifest_file;
};

// Master-equation populations: columns t, n1, n2, trace, purity.
ExperimentResult run_lindblad_experiment(RunConfig cfg);

// Single trajectory: <out> with t, n1, n2, norm2 and <out stem>_events with
// t_jump, channel.
ExperimentResult run_trajectory_experiment(RunConfig cfg);

// Ensemble means: t, n1_mean, n1_stderr, n2_mean, n2_stderr.
ExperimentResult run_ensemble_experiment(RunConfig cfg);

// Local-jump histogram: bin_start, bin_end, count_q1, count_q2, frac_q1,
// frac_q2, low_stats_flag. Detector thinning per cfg.histogram.
ExperimentResult run_histogram_experiment(RunConfig cfg);

// Postselection: <out stem>_lme and <out stem>_traj, each t, n1, n2, survival.
ExperimentResult run_postselect_experiment(RunConfig cfg);

// Closed-form no-jump evolution from |e,g>: t, n1, n2, survival; the
// infinite-time transfer fidelity goes to the manifest. Requires zero
// temperature.
ExperimentResult run_analytic_experiment(RunConfig cfg);

// Demon ledgers (trial, cold_net, hot_net, collective_net, n_cycles,
// n_completed_cycles) plus <out stem>_phases (t, phase) for trial 0.
ExperimentResult run_demon_experiment(RunConfig cfg);

} // namespace qduet
