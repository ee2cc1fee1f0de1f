#pragma once

// Run configuration for the CLI: a single flat JSON file with documented
// keys, figure presets, strict validation (unknown keys rejected), and the
// per-run manifest.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "qduet/demon.hpp"
#include "qduet/model.hpp"
#include "qduet/trajectory.hpp"

namespace qduet {

// Configuration problems exit the CLI with code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericsConfig {
  double dt = 1e-3;
  double sample_dt = 0.05;
  double t_max = 8.0;
};

struct EnsembleConfig {
  std::uint64_t n_traj = 1000;
  std::uint64_t master_seed = 1;
  unsigned workers = 0; // 0: hardware concurrency
};

struct UnravelingConfig {
  UnravelingKind kind = UnravelingKind::Counting;
  double beta = 10.0; // DisplacedCounting local-oscillator amplitude
};

struct DemonSection {
  double gamma_c_active = 0.0; // 0: demon subcommand unavailable
  double max_active_duration = 0.0;
  std::string restart = "relaxation_gated"; // or "immediate"
};

struct HistogramSection {
  double bin_width = 0.5; // in the run's time unit
  double eff1 = 1.0;      // detector efficiencies for thinning
  double eff2 = 1.0;
};

struct OutputConfig {
  std::string path = "out.csv";
  std::string format = "csv"; // or "json"
};

struct RunConfig {
  ModelParams model;
  NumericsConfig numerics;
  EnsembleConfig ensemble;
  UnravelingConfig unraveling;
  DemonSection demon;
  HistogramSection histogram;
  OutputConfig output;

  void validate() const; // throws ConfigError naming the offending field
};

// Caption-exact parameter sets. Known names: fig2, fig3, fig4, alt_083.
RunConfig preset(const std::string& name);

// Strict parsing (unknown keys rejected); fields absent from the JSON keep
// the values from `base`, so presets/files/flags can be layered.
RunConfig load_config(const std::string& path, const RunConfig& base = {});
RunConfig parse_config(const std::string& json_text, const RunConfig& base = {});
std::string to_json_string(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

// Rates are stored in units of gamma_c whenever gamma_c > 0 (times then mean
// gamma_c * t); otherwise absolute. Returns the scale that was divided out.
double normalize_units(RunConfig& cfg);

DemonConfig demon_config(const RunConfig& cfg);

struct ManifestEntry {
  std::string path;
  std::string digest; // fnv1a64 hex
};

struct RunManifest {
  std::string subcommand;
  std::string version;
  std::string prng;
  std::string time_unit; // "gamma_c*t" or "absolute"
  double wall_seconds = 0.0;
  std::string config_json;
  std::vector<ManifestEntry> outputs;
  std::vector<std::pair<std::string, std::string>> extra; // free-form fields
};

// Writes "<output stem>.manifest.json" next to the data files.
std::string write_manifest(const RunManifest& manifest, const std::string& output_path);

} // namespace qduet
