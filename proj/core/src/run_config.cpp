#include "qduet/run_config.hpp"

#include <fstream>
#include <sstream>

#include "qduet/csv.hpp"

#include <json.hpp>

namespace qduet {

using nlohmann::json;

namespace {

void check_positive(double v, const char* field) {
  if (!(v > 0.0)) throw ConfigError(std::string(field) + " must be > 0");
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  throw ConfigError("unknown key \"" + key + "\" in section \"" + section + "\"");
}

void expect_keys(const json& obj, const std::string& section,
                 std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) unknown_key(section, item.key());
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return obj[key].get<double>();
}

std::uint64_t get_unsigned(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer()) {
    throw ConfigError(std::string(key) + " must be a nonnegative integer");
  }
  const auto v = obj[key].get<std::int64_t>();
  if (v < 0) throw ConfigError(std::string(key) + " must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
  return obj[key].get<std::string>();
}

} // namespace

void RunConfig::validate() const {
  try {
    model.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("model: ") + err.what());
  }
  check_positive(numerics.dt, "numerics.dt");
  check_positive(numerics.sample_dt, "numerics.sample_dt");
  if (!(numerics.t_max >= 0.0)) throw ConfigError("numerics.t_max must be >= 0");
  if (numerics.dt * model.total_rate() >= 0.1) {
    throw ConfigError("numerics.dt violates the stability guard dt * total_rate < 0.1");
  }
  if (ensemble.n_traj == 0) throw ConfigError("ensemble.n_traj must be >= 1");
  if (unraveling.kind == UnravelingKind::DisplacedCounting && !(unraveling.beta > 0.0)) {
    throw ConfigError("unraveling.beta must be > 0 for displaced_counting");
  }
  if (demon.gamma_c_active < 0.0) throw ConfigError("demon.gamma_c_active must be >= 0");
  if (demon.restart != "relaxation_gated" && demon.restart != "immediate") {
    throw ConfigError("demon.restart must be \"relaxation_gated\" or \"immediate\"");
  }
  check_positive(histogram.bin_width, "histogram.bin_width");
  if (histogram.eff1 < 0.0 || histogram.eff1 > 1.0) {
    throw ConfigError("histogram.eff1 must be in [0,1]");
  }
  if (histogram.eff2 < 0.0 || histogram.eff2 > 1.0) {
    throw ConfigError("histogram.eff2 must be in [0,1]");
  }
  if (output.format != "csv" && output.format != "json") {
    throw ConfigError("output.format must be \"csv\" or \"json\"");
  }
  if (output.path.empty()) throw ConfigError("output.path must not be empty");
}

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  cfg.numerics.dt = 1e-3;
  cfg.numerics.sample_dt = 0.05;
  cfg.numerics.t_max = 8.0;

  if (name == "fig2") {
    cfg.model = {10.0, 10.0, 0.2, 0.2, 1.0, 0.0, 0.0, 0.0};
  } else if (name == "fig3") {
    cfg.model = {10.0, 10.0, 2.2, 0.2, 1.0, 0.0, 0.0, 0.0};
  } else if (name == "alt_083") {
    cfg.model = {10.0, 10.0, 1.0, 0.1, 1.0, 0.0, 0.0, 0.0};
  } else if (name == "fig4") {
    // Demon configuration in units of gamma1: gamma2 = gamma1/11, door-open
    // gamma_c = 5 gamma1/11 (the fig3 ratios), omega = 10 gamma_c_active.
    const double gamma_c_active = 5.0 / 11.0;
    const double omega = 10.0 * gamma_c_active;
    cfg.model = {omega, omega, 1.0, 1.0 / 11.0, 0.0, 0.05, 0.1, 0.0};
    cfg.demon.gamma_c_active = gamma_c_active;
    cfg.numerics.dt = 5e-3;
    cfg.numerics.sample_dt = 0.1;
    cfg.numerics.t_max = 400.0;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return cfg;
}

RunConfig parse_config(const std::string& json_text, const RunConfig& base) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  expect_keys(root, "root",
              {"model", "numerics", "ensemble", "unraveling", "demon", "histogram", "output"});

  RunConfig cfg = base;
  if (root.contains("model")) {
    const json& m = root["model"];
    expect_keys(m, "model",
                {"omega1", "omega2", "gamma1", "gamma2", "gamma_c", "nth1", "nth2", "nthc"});
    cfg.model.omega1 = get_number(m, "omega1", cfg.model.omega1);
    cfg.model.omega2 = get_number(m, "omega2", cfg.model.omega2);
    cfg.model.gamma1 = get_number(m, "gamma1", cfg.model.gamma1);
    cfg.model.gamma2 = get_number(m, "gamma2", cfg.model.gamma2);
    cfg.model.gamma_c = get_number(m, "gamma_c", cfg.model.gamma_c);
    cfg.model.nth1 = get_number(m, "nth1", cfg.model.nth1);
    cfg.model.nth2 = get_number(m, "nth2", cfg.model.nth2);
    cfg.model.nthc = get_number(m, "nthc", cfg.model.nthc);
  }
  if (root.contains("numerics")) {
    const json& n = root["numerics"];
    expect_keys(n, "numerics", {"dt", "sample_dt", "t_max"});
    cfg.numerics.dt = get_number(n, "dt", cfg.numerics.dt);
    cfg.numerics.sample_dt = get_number(n, "sample_dt", cfg.numerics.sample_dt);
    cfg.numerics.t_max = get_number(n, "t_max", cfg.numerics.t_max);
  }
  if (root.contains("ensemble")) {
    const json& e = root["ensemble"];
    expect_keys(e, "ensemble", {"n_traj", "master_seed", "workers"});
    cfg.ensemble.n_traj = get_unsigned(e, "n_traj", cfg.ensemble.n_traj);
    cfg.ensemble.master_seed = get_unsigned(e, "master_seed", cfg.ensemble.master_seed);
    cfg.ensemble.workers =
        static_cast<unsigned>(get_unsigned(e, "workers", cfg.ensemble.workers));
  }
  if (root.contains("unraveling")) {
    const json& u = root["unraveling"];
    expect_keys(u, "unraveling", {"kind", "beta"});
    const std::string kind = get_string(u, "kind", to_string(cfg.unraveling.kind));
    try {
      cfg.unraveling.kind = unraveling_from_string(kind);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(err.what());
    }
    cfg.unraveling.beta = get_number(u, "beta", cfg.unraveling.beta);
  }
  if (root.contains("demon")) {
    const json& d = root["demon"];
    expect_keys(d, "demon", {"gamma_c_active", "max_active_duration", "restart"});
    cfg.demon.gamma_c_active = get_number(d, "gamma_c_active", cfg.demon.gamma_c_active);
    cfg.demon.max_active_duration =
        get_number(d, "max_active_duration", cfg.demon.max_active_duration);
    cfg.demon.restart = get_string(d, "restart", cfg.demon.restart);
  }
  if (root.contains("histogram")) {
    const json& h = root["histogram"];
    expect_keys(h, "histogram", {"bin_width", "eff1", "eff2"});
    cfg.histogram.bin_width = get_number(h, "bin_width", cfg.histogram.bin_width);
    cfg.histogram.eff1 = get_number(h, "eff1", cfg.histogram.eff1);
    cfg.histogram.eff2 = get_number(h, "eff2", cfg.histogram.eff2);
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    expect_keys(o, "output", {"path", "format"});
    cfg.output.path = get_string(o, "path", cfg.output.path);
    cfg.output.format = get_string(o, "format", cfg.output.format);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), base);
}

std::string to_json_string(const RunConfig& cfg) {
  json root;
  root["model"] = {{"omega1", cfg.model.omega1},   {"omega2", cfg.model.omega2},
                   {"gamma1", cfg.model.gamma1},   {"gamma2", cfg.model.gamma2},
                   {"gamma_c", cfg.model.gamma_c}, {"nth1", cfg.model.nth1},
                   {"nth2", cfg.model.nth2},       {"nthc", cfg.model.nthc}};
  root["numerics"] = {{"dt", cfg.numerics.dt},
                      {"sample_dt", cfg.numerics.sample_dt},
                      {"t_max", cfg.numerics.t_max}};
  root["ensemble"] = {{"n_traj", cfg.ensemble.n_traj},
                      {"master_seed", cfg.ensemble.master_seed},
                      {"workers", cfg.ensemble.workers}};
  root["unraveling"] = {{"kind", to_string(cfg.unraveling.kind)},
                        {"beta", cfg.unraveling.beta}};
  root["demon"] = {{"gamma_c_active", cfg.demon.gamma_c_active},
                   {"max_active_duration", cfg.demon.max_active_duration},
                   {"restart", cfg.demon.restart}};
  root["histogram"] = {{"bin_width", cfg.histogram.bin_width},
                       {"eff1", cfg.histogram.eff1},
                       {"eff2", cfg.histogram.eff2}};
  root["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
  return root.dump(2) + "\n";
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << to_json_string(cfg);
}

double normalize_units(RunConfig& cfg) {
  const double scale = cfg.model.gamma_c;
  if (scale <= 0.0 || scale == 1.0) return scale > 0.0 ? 1.0 : 0.0;
  cfg.model.gamma1 /= scale;
  cfg.model.gamma2 /= scale;
  cfg.model.gamma_c = 1.0;
  cfg.model.omega1 /= scale;
  cfg.model.omega2 /= scale;
  cfg.demon.gamma_c_active /= scale;
  cfg.demon.max_active_duration *= scale;
  cfg.numerics.dt *= scale;
  cfg.numerics.sample_dt *= scale;
  cfg.numerics.t_max *= scale;
  cfg.histogram.bin_width *= scale;
  return scale;
}

DemonConfig demon_config(const RunConfig& cfg) {
  DemonConfig demon;
  demon.base = cfg.model;
  demon.base.gamma_c = 0.0;
  demon.gamma_c_active = cfg.demon.gamma_c_active;
  demon.max_active_duration = cfg.demon.max_active_duration;
  demon.restart = cfg.demon.restart == "immediate" ? RestartPolicy::Immediate
                                                   : RestartPolicy::RelaxationGated;
  return demon;
}

std::string write_manifest(const RunManifest& manifest, const std::string& output_path) {
  json root;
  root["subcommand"] = manifest.subcommand;
  root["version"] = manifest.version;
  root["prng"] = manifest.prng;
  root["time_unit"] = manifest.time_unit;
  root["wall_seconds"] = manifest.wall_seconds;
  root["config"] = json::parse(manifest.config_json);
  json outputs = json::array();
  for (const auto& entry : manifest.outputs) {
    outputs.push_back({{"path", entry.path}, {"fnv1a64", entry.digest}});
  }
  root["outputs"] = outputs;
  for (const auto& [key, value] : manifest.extra) {
    // numeric strings stay strings; consumers parse as needed
    root[key] = value;
  }

  std::string manifest_path = output_path;
  const auto dot = manifest_path.find_last_of('.');
  if (dot != std::string::npos && manifest_path.find('/', dot) == std::string::npos) {
    manifest_path = manifest_path.substr(0, dot);
  }
  manifest_path += ".manifest.json";

  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + manifest_path);
  out << root.dump(2) << "\n";
  return manifest_path;
}

} // namespace qduet
