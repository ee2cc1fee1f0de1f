#include "qduet/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "qduet/analysis.hpp"
#include "qduet/csv.hpp"
#include "qduet/lindblad.hpp"

#include <json.hpp>

#ifndef QDUET_VERSION
#define QDUET_VERSION "0.0.0"
#endif

namespace qduet {

using nlohmann::json;

namespace {

struct PathParts {
  std::string stem;
  std::string ext;
};

PathParts split_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) {
    return {path, ""};
  }
  return {path.substr(0, dot), path.substr(dot)};
}

struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Optional last column of strings (channel names, phases); empty if unused.
  std::string text_column;
  std::vector<std::string> text_cells;
};

void write_table(const Table& table, const std::string& path, const std::string& format) {
  if (format == "json") {
    json root;
    root["comments"] = table.comments;
    json cols = table.columns;
    if (!table.text_column.empty()) cols.push_back(table.text_column);
    root["columns"] = cols;
    json rows = json::array();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      json row = table.rows[i];
      if (!table.text_column.empty()) row.push_back(table.text_cells[i]);
      rows.push_back(row);
    }
    root["rows"] = rows;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << root.dump(2) << "\n";
    return;
  }
  CsvWriter csv(path);
  for (const auto& line : table.comments) csv.comment(line);
  std::vector<std::string> cols = table.columns;
  if (!table.text_column.empty()) cols.push_back(table.text_column);
  csv.schema(cols);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<std::string> cells;
    cells.reserve(cols.size());
    for (double v : table.rows[i]) cells.push_back(format_real(v));
    if (!table.text_column.empty()) cells.push_back(table.text_cells[i]);
    csv.raw_row(cells);
  }
  csv.close();
}

class ExperimentEmitter {
 public:
  ExperimentEmitter(const char* subcommand, RunConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const double scale = normalize_units(cfg_);
    manifest_.subcommand = subcommand;
    manifest_.version = QDUET_VERSION;
    manifest_.prng = kPrngDescription;
    manifest_.time_unit = scale > 0.0 ? "gamma_c*t" : "absolute";
    start_ = std::chrono::steady_clock::now();
  }

  void emit(const Table& table, const std::string& path) {
    Table stamped = table;
    stamped.comments.insert(stamped.comments.begin(),
                            "time unit: " + manifest_.time_unit);
    write_table(stamped, path, cfg_.output.format);
    result_.data_files.push_back(path);
  }

  void extra(const std::string& key, const std::string& value) {
    manifest_.extra.emplace_back(key, value);
  }

  ExperimentResult finish() {
    manifest_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest_.config_json = to_json_string(cfg_);
    for (const auto& path : result_.data_files) {
      manifest_.outputs.push_back({path, fnv1a64_hex(path)});
    }
    result_.manifest_file = write_manifest(manifest_, cfg_.output.path);
    return result_;
  }

  const RunConfig& cfg() const { return cfg_; }

 private:
  RunConfig& cfg_;
  RunManifest manifest_;
  ExperimentResult result_;
  std::chrono::steady_clock::time_point start_;
};

DensityMatrix initial_eg_projector() {
  const StateVector psi = basis_state(kEG);
  return psi * psi.adjoint();
}

EngineOptions engine_options(const RunConfig& cfg) {
  EngineOptions options;
  options.dt = cfg.numerics.dt;
  return options;
}

} // namespace

ExperimentResult run_lindblad_experiment(RunConfig cfg) {
  ExperimentEmitter emitter("lindblad", cfg);
  const RunConfig& c = emitter.cfg();
  const TimeSeries series = integrate(c.model, initial_eg_projector(), c.numerics.dt,
                                      c.numerics.sample_dt, c.numerics.t_max);
  Table table;
  table.columns = {"t", "n1", "n2", "trace", "purity"};
  for (std::size_t i = 0; i < series.size(); ++i) {
    table.rows.push_back({series.times[i], series.rows[i][0], series.rows[i][1],
                          series.rows[i][2], series.rows[i][3]});
  }
  emitter.emit(table, c.output.path);
  return emitter.finish();
}

ExperimentResult run_trajectory_experiment(RunConfig cfg) {
  ExperimentEmitter emitter("trajectory", cfg);
  const RunConfig& c = emitter.cfg();
  const TrajectoryRecord record = run_trajectory(
      c.model, basis_state(kEG), c.numerics.t_max, c.numerics.sample_dt,
      c.ensemble.master_seed, c.unraveling.kind,
      c.unraveling.kind == UnravelingKind::DisplacedCounting ? c.unraveling.beta : 0.0,
      engine_options(c));

  Table table;
  table.comments = {std::string("unraveling: ") + to_string(record.kind)};
  table.columns = {"t", "n1", "n2", "norm2"};
  for (std::size_t i = 0; i < record.sample_times.size(); ++i) {
    table.rows.push_back({record.sample_times[i], record.n1[i], record.n2[i],
                          record.norm2[i]});
  }
  emitter.emit(table, c.output.path);

  const PathParts parts = split_path(c.output.path);
  Table events;
  events.columns = {"t_jump"};
  events.text_column = "channel";
  for (const auto& ev : record.events) {
    events.rows.push_back({ev.time});
    events.text_cells.push_back(to_string(ev.channel));
  }
  emitter.emit(events, parts.stem + "_events" + parts.ext);
  return emitter.finish();
}

ExperimentResult run_ensemble_experiment(RunConfig cfg) {
  ExperimentEmitter emitter("ensemble", cfg);
  const RunConfig& c = emitter.cfg();
  const EnsembleResult ensemble = run_ensemble(
      c.model, basis_state(kEG), c.ensemble.n_traj, c.numerics.t_max,
      c.numerics.sample_dt, c.ensemble.master_seed, c.unraveling.kind,
      c.unraveling.kind == UnravelingKind::Counting ? 0.0 : c.unraveling.beta,
      c.ensemble.workers, engine_options(c));

  Table table;
  table.comments = {std::string("unraveling: ") + to_string(ensemble.kind),
                    "n_traj: " + std::to_string(ensemble.n_traj)};
  table.columns = {"t", "n1_mean", "n1_stderr", "n2_mean", "n2_stderr"};
  for (std::size_t i = 0; i < ensemble.sample_times.size(); ++i) {
    table.rows.push_back({ensemble.sample_times[i], ensemble.n1_mean[i],
                          ensemble.n1_stderr[i], ensemble.n2_mean[i],
                          ensemble.n2_stderr[i]});
  }
  emitter.emit(table, c.output.path);
  return emitter.finish();
}

ExperimentResult run_histogram_experiment(RunConfig cfg) {
  ExperimentEmitter emitter("histogram", cfg);
  const RunConfig& c = emitter.cfg();
  EngineOptions options = engine_options(c);
  options.keep_samples = false;
  std::vector<TrajectoryRecord> records = run_records(
      c.model, basis_state(kEG), c.ensemble.n_traj, c.numerics.t_max,
      c.numerics.sample_dt, c.ensemble.master_seed, UnravelingKind::Counting, 0.0,
      c.ensemble.workers, options);

  if (c.histogram.eff1 < 1.0 || c.histogram.eff2 < 1.0) {
    Rng thinning_rng(splitmix64(c.ensemble.master_seed ^ 0x7468696e6e696e67ULL));
    records = thin_by_efficiency(records, c.histogram.eff1, c.histogram.eff2, thinning_rng);
  }

  const HistogramSeries hist =
      jump_histogram(records, c.histogram.bin_width, c.numerics.t_max);

  Table table;
  table.comments = {"n_traj: " + std::to_string(c.ensemble.n_traj),
                    "eff1: " + format_real(c.histogram.eff1) +
                        ", eff2: " + format_real(c.histogram.eff2)};
  table.columns = {"bin_start", "bin_end",  "count_q1", "count_q2",
                   "frac_q1",   "frac_q2", "low_stats_flag"};
  for (std::size_t k = 0; k < hist.bins(); ++k) {
    table.rows.push_back({hist.bin_edges[k], hist.bin_edges[k + 1],
                          static_cast<double>(hist.count_local1[k]),
                          static_cast<double>(hist.count_local2[k]),
                          hist.fraction_local1[k], hist.fraction_local2[k],
                          hist.low_stats[k] ? 1.0 : 0.0});
  }
  emitter.emit(table, c.output.path);
  return emitter.finish();
}

ExperimentResult run_postselect_experiment(RunConfig cfg) {
  ExperimentEmitter emitter("postselect", cfg);
  const RunConfig& c = emitter.cfg();
  if (!c.model.zero_temperature()) {
    throw ConfigError("postselect requires zero temperature (nth1 = nth2 = nthc = 0)");
  }

  const DensityMatrixSeries states =
      integrate_states(c.model, initial_eg_projector(), c.numerics.dt,
                       c.numerics.sample_dt, c.numerics.t_max);
  const PostselectedSeries lme = postselect_lme(states);

  const PathParts parts = split_path(c.output.path);
  Table lme_table;
  lme_table.columns = {"t", "n1", "n2", "survival"};
  for (std::size_t i = 0; i < lme.times.size(); ++i) {
    lme_table.rows.push_back({lme.times[i], lme.n1[i], lme.n2[i], lme.survival[i]});
  }
  emitter.emit(lme_table, parts.stem + "_lme" + parts.ext);

  const std::vector<TrajectoryRecord> records = run_records(
      c.model, basis_state(kEG), c.ensemble.n_traj, c.numerics.t_max,
      c.numerics.sample_dt, c.ensemble.master_seed, UnravelingKind::Counting, 0.0,
      c.ensemble.workers, engine_options(c));

  Table traj_table;
  traj_table.comments = {"n_traj: " + std::to_string(c.ensemble.n_traj),
                         "rows with no surviving trajectory carry nan"};
  traj_table.columns = {"t", "n1", "n2", "survival"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : lme.times) {
    try {
      const PostselectSummary s = postselect_trajectories(records, t);
      traj_table.rows.push_back({t, s.n1_mean, s.n2_mean, s.surviving_fraction});
    } catch (const std::runtime_error&) {
      traj_table.rows.push_back({t, nan, nan, 0.0});
    }
  }
  emitter.emit(traj_table, parts.stem + "_traj" + parts.ext);
  return emitter.finish();
}

ExperimentResult run_analytic_experiment(RunConfig cfg) {
  ExperimentEmitter emitter("analytic", cfg);
  const RunConfig& c = emitter.cfg();
  if (!c.model.zero_temperature()) {
    throw ConfigError("analytic requires zero temperature (nth1 = nth2 = nthc = 0)");
  }

  Table table;
  table.columns = {"t", "n1", "n2", "survival"};
  const long samples =
      static_cast<long>(std::floor(c.numerics.t_max / c.numerics.sample_dt + 1e-9));
  for (long k = 0; k <= samples; ++k) {
    const double t = std::min(c.numerics.sample_dt * static_cast<double>(k),
                              c.numerics.t_max);
    const StateVector psi = analytic_no_jump_state(c.model, t);
    const double norm2 = psi.squaredNorm();
    table.rows.push_back({t, std::norm(psi(kEG)) / norm2, std::norm(psi(kGE)) / norm2,
                          norm2});
  }

  double fidelity = std::numeric_limits<double>::quiet_NaN();
  if (c.model.omega1 == c.model.omega2) {
    fidelity = transfer_fidelity_infinite(c.model);
  }
  table.comments = {"transfer_fidelity_infinite: " + format_real(fidelity)};
  emitter.emit(table, c.output.path);
  emitter.extra("transfer_fidelity_infinite", format_real(fidelity));
  return emitter.finish();
}

ExperimentResult run_demon_experiment(RunConfig cfg) {
  ExperimentEmitter emitter("demon", cfg);
  const RunConfig& c = emitter.cfg();
  const DemonConfig demon = demon_config(c);
  try {
    demon.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("demon: ") + err.what());
  }

  const DemonEnsembleStats stats =
      run_demon_ensemble(demon, c.ensemble.n_traj, c.numerics.t_max,
                         c.ensemble.master_seed, c.ensemble.workers, engine_options(c));

  Table ledger;
  ledger.comments = {"restart policy: " + c.demon.restart};
  if (!demon.transfer_condition()) {
    ledger.comments.push_back(
        "warning: effective transfer condition gtilde1 > gtilde2 not satisfied");
  }
  ledger.columns = {"trial",   "cold_net",  "hot_net",
                    "collective_net", "n_cycles", "n_completed_cycles"};
  for (const auto& row : stats.ledgers) {
    ledger.rows.push_back({static_cast<double>(row.trial), static_cast<double>(row.cold),
                           static_cast<double>(row.hot),
                           static_cast<double>(row.collective),
                           static_cast<double>(row.n_cycles),
                           static_cast<double>(row.n_completed)});
  }
  emitter.emit(ledger, c.output.path);

  // Phase timeline for trial 0.
  const DemonTrajectory first = run_demon_trajectory(
      demon, c.numerics.t_max, child_seed(c.ensemble.master_seed, 0),
      c.numerics.sample_dt, engine_options(c));
  const PathParts parts = split_path(c.output.path);
  Table phases;
  phases.columns = {"t"};
  phases.text_column = "phase";
  for (const auto& interval : first.ledger.timeline) {
    phases.rows.push_back({interval.t_begin});
    phases.text_cells.push_back(to_string(interval.phase));
  }
  emitter.emit(phases, parts.stem + "_phases" + parts.ext);

  emitter.extra("mean_cold_net", format_real(stats.mean_cold));
  emitter.extra("stderr_cold_net", format_real(stats.stderr_cold));
  emitter.extra("mean_hot_net", format_real(stats.mean_hot));
  emitter.extra("mean_collective_net", format_real(stats.mean_collective));
  emitter.extra("cycles_total", std::to_string(stats.cycles_total));
  emitter.extra("completed_total", std::to_string(stats.completed_total));
  emitter.extra("cycles_end_cold", std::to_string(stats.end_cold));
  emitter.extra("cycles_end_collective", std::to_string(stats.end_collective));
  emitter.extra("cycles_end_hot", std::to_string(stats.end_hot));
  emitter.extra("cycles_end_timeout", std::to_string(stats.end_timeout));
  return emitter.finish();
}

} // namespace qduet
