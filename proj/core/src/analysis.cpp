#include "qduet/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qduet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kLowStatsThreshold = 10;

} // namespace

HistogramSeries jump_histogram(std::span<const TrajectoryRecord> records,
                               double bin_width, double t_max) {
  if (records.empty()) throw std::invalid_argument("jump_histogram: records are empty");
  if (!(bin_width > 0.0)) throw std::invalid_argument("jump_histogram: bin_width must be > 0");
  const auto bins = static_cast<std::size_t>(std::ceil(t_max / bin_width - 1e-9));
  if (bins == 0) throw std::invalid_argument("jump_histogram: t_max must exceed bin_width");

  HistogramSeries h;
  h.bin_edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.bin_edges[k] = bin_width * static_cast<double>(k);
  h.count_local1.assign(bins, 0);
  h.count_local2.assign(bins, 0);

  for (const auto& rec : records) {
    for (const auto& ev : rec.events) {
      if (ev.channel != ChannelLabel::Local1Down && ev.channel != ChannelLabel::Local2Down)
        continue;
      if (ev.time > t_max) continue;
      auto k = static_cast<std::size_t>(ev.time / bin_width);
      if (k >= bins) k = bins - 1;
      if (ev.channel == ChannelLabel::Local1Down)
        ++h.count_local1[k];
      else
        ++h.count_local2[k];
    }
  }

  h.fraction_local1.assign(bins, kNaN);
  h.fraction_local2.assign(bins, kNaN);
  h.low_stats.assign(bins, false);
  for (std::size_t k = 0; k < bins; ++k) {
    const std::int64_t total = h.count_local1[k] + h.count_local2[k];
    h.low_stats[k] = total < kLowStatsThreshold;
    if (total > 0) {
      h.fraction_local1[k] = static_cast<double>(h.count_local1[k]) / static_cast<double>(total);
      h.fraction_local2[k] = static_cast<double>(h.count_local2[k]) / static_cast<double>(total);
    }
  }
  return h;
}

HistogramSeries expected_histogram(const ModelParams& p, const DensityMatrix& rho0,
                                   double bin_width, double t_max, double dt) {
  const auto bins = static_cast<std::size_t>(std::ceil(t_max / bin_width - 1e-9));
  HistogramSeries h;
  h.bin_edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.bin_edges[k] = bin_width * static_cast<double>(k);
  h.count_local1.assign(bins, 0);
  h.count_local2.assign(bins, 0);
  h.low_stats.assign(bins, false);
  h.fraction_local1.assign(bins, kNaN);
  h.fraction_local2.assign(bins, kNaN);

  // Expected local jump densities gamma_i <n_i>(t) accumulated per bin with
  // a trapezoid rule on the integrator grid.
  std::vector<double> w1(bins, 0.0), w2(bins, 0.0);
  const TimeSeries series = integrate(p, rho0, dt, dt, t_max);
  const std::size_t c1 = series.column("n1");
  const std::size_t c2 = series.column("n2");
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double t_mid = 0.5 * (series.times[i] + series.times[i + 1]);
    const double step = series.times[i + 1] - series.times[i];
    auto k = static_cast<std::size_t>(t_mid / bin_width);
    if (k >= bins) k = bins - 1;
    w1[k] += 0.5 * (series.rows[i][c1] + series.rows[i + 1][c1]) * p.gamma1 * step;
    w2[k] += 0.5 * (series.rows[i][c2] + series.rows[i + 1][c2]) * p.gamma2 * step;
  }
  for (std::size_t k = 0; k < bins; ++k) {
    const double total = w1[k] + w2[k];
    if (total > 0.0) {
      h.fraction_local1[k] = w1[k] / total;
      h.fraction_local2[k] = w2[k] / total;
    }
  }
  return h;
}

std::vector<TrajectoryRecord> thin_by_efficiency(std::span<const TrajectoryRecord> records,
                                                 double eff1, double eff2, Rng& rng) {
  if (!(eff1 >= 0.0 && eff1 <= 1.0)) throw std::invalid_argument("eff1 must be in [0,1]");
  if (!(eff2 >= 0.0 && eff2 <= 1.0)) throw std::invalid_argument("eff2 must be in [0,1]");

  std::vector<TrajectoryRecord> out(records.begin(), records.end());
  for (auto& rec : out) {
    std::vector<JumpEvent> kept;
    kept.reserve(rec.events.size());
    for (const auto& ev : rec.events) {
      double eff = 1.0;
      if (ev.channel == ChannelLabel::Local1Down) eff = eff1;
      if (ev.channel == ChannelLabel::Local2Down) eff = eff2;
      if (eff >= 1.0 || rng.uniform() < eff) kept.push_back(ev);
    }
    rec.events = std::move(kept);
  }
  return out;
}

PostselectedSeries postselect_lme(const DensityMatrixSeries& series) {
  PostselectedSeries out;
  const Operator n1 = number_op1();
  const Operator n2 = number_op2();
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const DensityMatrix& rho = series.states[i];

    // Validity domain: nothing above one excitation, no coherences between
    // excitation sectors.
    if (std::abs(rho(kEE, kEE)) > 1e-9) {
      throw std::domain_error("postselect_lme: |e,e> population outside the validity domain");
    }
    double cross = 0.0;
    for (int a : {kGE, kEG}) {
      cross = std::max(cross, std::abs(rho(a, kGG)));
      cross = std::max(cross, std::abs(rho(kGG, a)));
      cross = std::max(cross, std::abs(rho(a, kEE)));
      cross = std::max(cross, std::abs(rho(kEE, a)));
    }
    if (cross > 1e-9) {
      throw std::domain_error("postselect_lme: cross-sector coherences present");
    }

    DensityMatrix numerator = rho;
    numerator(kGG, kGG) -= rho(kGG, kGG);
    const double weight = std::real(((n1 + n2) * rho).trace());
    if (weight < 1e-12) {
      throw std::domain_error("postselect_lme: fully decayed; postselection undefined");
    }
    const DensityMatrix rho_ps = numerator / weight;
    const double v1 = std::real((n1 * rho_ps).trace());
    const double v2 = std::real((n2 * rho_ps).trace());
    if (std::abs(v1 + v2 - 1.0) > 1e-9) {
      throw std::runtime_error("postselect_lme: excitation normalization check failed");
    }
    out.times.push_back(series.times[i]);
    out.n1.push_back(v1);
    out.n2.push_back(v2);
    out.survival.push_back(weight);
  }
  return out;
}

PostselectSummary postselect_trajectories(std::span<const TrajectoryRecord> records,
                                          double t) {
  if (records.empty()) {
    throw std::invalid_argument("postselect_trajectories: records are empty");
  }
  double s1 = 0.0, s2 = 0.0;
  std::size_t survivors = 0;
  for (const auto& rec : records) {
    bool jumped = false;
    for (const auto& ev : rec.events) {
      if (ev.time < t) {
        jumped = true;
        break;
      }
    }
    if (jumped) continue;
    // Sample index at time t (grid sampling; take the nearest grid point).
    if (rec.sample_times.empty()) {
      throw std::invalid_argument("postselect_trajectories: records carry no samples");
    }
    std::size_t best = 0;
    double best_dist = std::abs(rec.sample_times[0] - t);
    for (std::size_t k = 1; k < rec.sample_times.size(); ++k) {
      const double dist = std::abs(rec.sample_times[k] - t);
      if (dist < best_dist) {
        best = k;
        best_dist = dist;
      }
    }
    if (best_dist > 1e-9 * std::max(1.0, t)) {
      throw std::invalid_argument("postselect_trajectories: t is not on the sample grid");
    }
    s1 += rec.n1[best];
    s2 += rec.n2[best];
    ++survivors;
  }
  if (survivors == 0) {
    throw std::runtime_error("postselect_trajectories: insufficient statistics (no survivors)");
  }
  const auto n = static_cast<double>(survivors);
  return {s1 / n, s2 / n, n / static_cast<double>(records.size()), survivors};
}

TimeSeries ensemble_average(std::span<const TrajectoryRecord> records) {
  if (records.empty()) throw std::invalid_argument("ensemble_average: records are empty");
  const auto& grid = records.front().sample_times;
  for (const auto& rec : records) {
    if (rec.sample_times.size() != grid.size()) {
      throw std::invalid_argument("ensemble_average: records do not share a sample grid");
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (std::abs(rec.sample_times[k] - grid[k]) > 1e-12 * std::max(1.0, grid[k])) {
        throw std::invalid_argument("ensemble_average: records do not share a sample grid");
      }
    }
  }

  TimeSeries out;
  out.names = {"n1", "n1_stderr", "n2", "n2_stderr"};
  const double n = static_cast<double>(records.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0;
    for (const auto& rec : records) {
      s1 += rec.n1[k];
      s1sq += rec.n1[k] * rec.n1[k];
      s2 += rec.n2[k];
      s2sq += rec.n2[k] * rec.n2[k];
    }
    const double m1 = s1 / n;
    const double m2 = s2 / n;
    double e1 = 0.0, e2 = 0.0;
    if (records.size() > 1) {
      e1 = std::sqrt(std::max(0.0, (s1sq - n * m1 * m1) / (n - 1.0)) / n);
      e2 = std::sqrt(std::max(0.0, (s2sq - n * m2 * m2) / (n - 1.0)) / n);
    }
    out.times.push_back(grid[k]);
    out.rows.push_back({m1, e1, m2, e2});
  }
  return out;
}

} // namespace qduet
