#pragma once

// Post-processing witnesses: local-jump histograms, postselection at the
// master-equation and trajectory level, ensemble statistics, and
// detector-efficiency thinning.

#include <span>
#include <vector>

#include "qduet/lindblad.hpp"
#include "qduet/rng.hpp"
#include "qduet/trajectory.hpp"

namespace qduet {

struct HistogramSeries {
  std::vector<double> bin_edges; // size = bins + 1
  std::vector<std::int64_t> count_local1;
  std::vector<std::int64_t> count_local2;
  std::vector<double> fraction_local1; // NaN in empty bins
  std::vector<double> fraction_local2;
  std::vector<bool> low_stats; // fewer than 10 events in the bin

  std::size_t bins() const { return count_local1.size(); }
};

// Counts only the local down-jumps (the collective detector is not needed)
// per time bin across all records; fractions are per-bin. Bins cover
// [0, t_max) in steps of bin_width, the last bin absorbing t == t_max.
HistogramSeries jump_histogram(std::span<const TrajectoryRecord> records,
                               double bin_width, double t_max);

// Expected bin fractions from the master equation: per bin,
//   f1 = int gamma1 <n1> dt / int (gamma1 <n1> + gamma2 <n2>) dt
// with unconditional sector populations (conditional populations weighted by
// survival). The independent oracle for the histogram witness.
HistogramSeries expected_histogram(const ModelParams& p, const DensityMatrix& rho0,
                                   double bin_width, double t_max, double dt = 1e-3);

// Each Local1Down (Local2Down) event is kept independently with probability
// eff1 (eff2); all other channels are untouched.
std::vector<TrajectoryRecord> thin_by_efficiency(std::span<const TrajectoryRecord> records,
                                                 double eff1, double eff2, Rng& rng);

struct PostselectedSeries {
  std::vector<double> times;
  std::vector<double> n1;
  std::vector<double> n2;
  std::vector<double> survival; // Tr[(n1+n2) rho], the postselection weight
};

// Zero-temperature postselection on "at least one excitation": removes the
// |g,g> population and renormalizes by the one-excitation weight. Requires
// no |e,e> population and no coherences between excitation sectors (enforced
// on the data); throws std::domain_error when the denominator falls below
// 1e-12 ("fully decayed").
PostselectedSeries postselect_lme(const DensityMatrixSeries& series);

struct PostselectSummary {
  double n1_mean;
  double n2_mean;
  double surviving_fraction;
  std::size_t survivors;
};

// Averages observables at time t over the records with no jump before t.
// Throws std::runtime_error when no trajectory survives.
PostselectSummary postselect_trajectories(std::span<const TrajectoryRecord> records,
                                          double t);

// Pointwise mean of n1, n2 across records sharing a sample grid, with
// standard-error bands (columns n1, n1_stderr, n2, n2_stderr).
TimeSeries ensemble_average(std::span<const TrajectoryRecord> records);

} // namespace qduet
