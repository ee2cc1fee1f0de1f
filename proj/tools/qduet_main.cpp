// qduet command line: dissipative two-qubit trajectory experiments.
//
// Exit codes: 0 success, 2 configuration/validation problem, 3 runtime
// numeric failure.

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qduet/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset_name;
  std::uint64_t seed = 0;
  std::uint64_t n_traj = 0;
  double t_max = 0.0;
  double dt = 0.0;
  std::string out_path;
  std::string format;
  unsigned workers = 0;

  CLI::App* sub = nullptr;

  void attach(CLI::App* s) {
    sub = s;
    s->add_option("--config", config_path, "JSON config file (layered over --preset)");
    s->add_option("--preset", preset_name, "parameter preset: fig2|fig3|fig4|alt_083");
    s->add_option("--seed", seed, "ensemble master seed");
    s->add_option("--n-traj", n_traj, "number of trajectories");
    s->add_option("--t-max", t_max, "evolution horizon");
    s->add_option("--dt", dt, "integrator step");
    s->add_option("--out", out_path, "output file path");
    s->add_option("--format", format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--workers", workers, "ensemble worker threads (0 = auto)");
  }

  qduet::RunConfig build() const {
    qduet::RunConfig cfg;
    if (!preset_name.empty()) cfg = qduet::preset(preset_name);
    if (!config_path.empty()) cfg = qduet::load_config(config_path, cfg);
    if (sub->count("--seed")) cfg.ensemble.master_seed = seed;
    if (sub->count("--n-traj")) cfg.ensemble.n_traj = n_traj;
    if (sub->count("--t-max")) cfg.numerics.t_max = t_max;
    if (sub->count("--dt")) cfg.numerics.dt = dt;
    if (sub->count("--out")) cfg.output.path = out_path;
    if (sub->count("--format")) cfg.output.format = format;
    if (sub->count("--workers")) cfg.ensemble.workers = workers;
    cfg.validate();
    return cfg;
  }
};

void report(const qduet::ExperimentResult& result) {
  for (const auto& path : result.data_files) std::cout << "wrote " << path << "\n";
  std::cout << "wrote " << result.manifest_file << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qduet: quantum-trajectory simulator for two dissipatively coupled qubits"};
  app.require_subcommand(1);

  CommonFlags lindblad_flags, trajectory_flags, ensemble_flags, histogram_flags,
      postselect_flags, analytic_flags, demon_flags;

  lindblad_flags.attach(
      app.add_subcommand("lindblad", "integrate the master equation (t, n1, n2, trace, purity)"));
  trajectory_flags.attach(
      app.add_subcommand("trajectory", "run one stochastic trajectory plus its jump events"));
  ensemble_flags.attach(
      app.add_subcommand("ensemble", "trajectory ensemble means with standard errors"));
  histogram_flags.attach(
      app.add_subcommand("histogram", "local-jump time histogram across an ensemble"));
  postselect_flags.attach(app.add_subcommand(
      "postselect", "no-decay postselection, master-equation and trajectory variants"));
  analytic_flags.attach(app.add_subcommand(
      "analytic", "closed-form no-jump populations, survival and transfer fidelity"));
  demon_flags.attach(app.add_subcommand(
      "demon", "feedback-switched collective channel with per-bath heat ledgers"));

  auto* preset_cmd = app.add_subcommand("preset", "print a preset configuration as JSON");
  std::string preset_name;
  std::string preset_out;
  preset_cmd->add_option("name", preset_name, "fig2|fig3|fig4|alt_083")->required();
  preset_cmd->add_option("--out", preset_out, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (preset_cmd->parsed()) {
      const qduet::RunConfig cfg = qduet::preset(preset_name);
      if (preset_out.empty()) {
        std::cout << qduet::to_json_string(cfg);
      } else {
        qduet::save_config(cfg, preset_out);
        std::cout << "wrote " << preset_out << "\n";
      }
      return 0;
    }
    if (lindblad_flags.sub->parsed()) {
      report(qduet::run_lindblad_experiment(lindblad_flags.build()));
      return 0;
    }
    if (trajectory_flags.sub->parsed()) {
      report(qduet::run_trajectory_experiment(trajectory_flags.build()));
      return 0;
    }
    if (ensemble_flags.sub->parsed()) {
      report(qduet::run_ensemble_experiment(ensemble_flags.build()));
      return 0;
    }
    if (histogram_flags.sub->parsed()) {
      report(qduet::run_histogram_experiment(histogram_flags.build()));
      return 0;
    }
    if (postselect_flags.sub->parsed()) {
      report(qduet::run_postselect_experiment(postselect_flags.build()));
      return 0;
    }
    if (analytic_flags.sub->parsed()) {
      report(qduet::run_analytic_experiment(analytic_flags.build()));
      return 0;
    }
    if (demon_flags.sub->parsed()) {
      const qduet::RunConfig cfg = demon_flags.build();
      if (!qduet::demon_config(cfg).transfer_condition()) {
        std::cerr << "warning: gtilde1 <= gtilde2, the transfer condition is not met\n";
      }
      report(qduet::run_demon_experiment(cfg));
      return 0;
    }
  } catch (const qduet::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "runtime error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
