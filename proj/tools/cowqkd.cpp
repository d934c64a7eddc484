// Command-line front end: single-point rates, distance sweeps, parameter
// optimization, bound-engine comparison and Monte Carlo self-validation,
// all emitting the common CSV schema (or a plain-text report).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cowqkd/runner.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::optional<std::string> lengths;
  std::optional<std::string> rounds;
  std::optional<double> eta;
  std::optional<double> mu;
  std::optional<double> t_b;
  std::optional<double> p_d1;
  std::optional<double> p_d2;
  std::optional<double> e_d;
  std::optional<double> f_ec;
  std::optional<double> p_dark;
  std::optional<double> eta_det;
  std::optional<double> eps_cor;
  std::optional<double> eps_sec;
  std::optional<double> route_prob;
  std::optional<std::string> basis;
  std::optional<std::string> engine;
  std::optional<std::string> phase_trials;
  std::optional<bool> optimize;
  std::optional<int> opt_budget;
  std::optional<double> opt_mu_lo;
  std::optional<double> opt_mu_hi;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> mc_rounds;
  std::optional<double> mc_trials;
};

void add_common_options(CLI::App* cmd, CliOverrides& over) {
  cmd->add_option("--config", over.config_path, "key = value config file");
  cmd->add_option("--L", over.lengths, "fiber lengths in km, comma separated");
  cmd->add_option("--eta", over.eta, "direct channel transmittance instead of --L");
  cmd->add_option("--N", over.rounds, "round counts, comma separated");
  cmd->add_option("--mu", over.mu, "mean photon number");
  cmd->add_option("--t-B", over.t_b, "beam-splitter transmittance toward the data line");
  cmd->add_option("--p-d1", over.p_d1, "pulsed-decoy probability");
  cmd->add_option("--p-d2", over.p_d2, "vacuum-decoy probability");
  cmd->add_option("--e-d", over.e_d, "misalignment error rate");
  cmd->add_option("--f-ec", over.f_ec, "error-correction efficiency");
  cmd->add_option("--p-dark", over.p_dark, "dark-count probability per window");
  cmd->add_option("--eta-det", over.eta_det, "detector efficiency");
  cmd->add_option("--eps-cor", over.eps_cor, "correctness failure bound");
  cmd->add_option("--eps-sec", over.eps_sec, "secrecy failure bound");
  cmd->add_option("--basis", over.basis, "passive|active");
  cmd->add_option("--route-prob", over.route_prob,
                  "active-mode data-line routing probability (defaults to t_B)");
  cmd->add_option("--engine", over.engine, "kato|azuma");
  cmd->add_option("--phase-trials", over.phase_trials,
                  "sifted|total expected phase-error click convention");
  cmd->add_flag("--optimize,!--no-optimize", over.optimize, "optimize free parameters");
  cmd->add_option("--opt-budget", over.opt_budget, "objective evaluation budget per point");
  cmd->add_option("--opt-mu-lo", over.opt_mu_lo, "lower bound of the mu search box");
  cmd->add_option("--opt-mu-hi", over.opt_mu_hi, "upper bound of the mu search box");
  cmd->add_option("--out", over.out_path, "output path (default: standard output)");
  cmd->add_option("--seed", over.seed, "random seed");
  cmd->add_option("--mc-rounds", over.mc_rounds, "montecarlo sampling rounds (<= 1e8)");
  cmd->add_option("--mc-trials", over.mc_trials, "coverage trials per p value");
}

cowqkd::RunConfig build_config(const CliOverrides& over) {
  using cowqkd::apply_config_line;
  cowqkd::RunConfig config = cowqkd::default_config();
  if (!over.config_path.empty()) {
    config = cowqkd::parse_config_file(over.config_path, config);
  }
  const std::string where = "command line";
  if (over.lengths) apply_config_line(config, "L", *over.lengths, where);
  if (over.eta) apply_config_line(config, "eta", std::to_string(*over.eta), where);
  if (over.rounds) apply_config_line(config, "N", *over.rounds, where);
  if (over.mu) config.params.mu = *over.mu;
  if (over.t_b) config.params.t_b = *over.t_b;
  if (over.p_d1) config.params.p_d1 = *over.p_d1;
  if (over.p_d2) config.params.p_d2 = *over.p_d2;
  if (over.e_d) config.params.e_mis = *over.e_d;
  if (over.f_ec) config.params.f_ec = *over.f_ec;
  if (over.p_dark) config.params.detector.p_dark = *over.p_dark;
  if (over.eta_det) config.params.detector.eta_det = *over.eta_det;
  if (over.eps_cor || over.eps_sec) {
    config.budget = cowqkd::epsilon_budget(
        over.eps_sec ? *over.eps_sec : config.budget.eps_sec,
        over.eps_cor ? *over.eps_cor : config.budget.eps_cor);
  }
  if (over.route_prob) config.params.active_route_prob = *over.route_prob;
  if (over.basis) apply_config_line(config, "basis", *over.basis, where);
  if (over.engine) apply_config_line(config, "engine", *over.engine, where);
  if (over.phase_trials) apply_config_line(config, "phase_trials", *over.phase_trials, where);
  if (over.optimize) config.optimize_params = *over.optimize;
  if (over.opt_budget) config.opt.eval_budget = *over.opt_budget;
  if (over.opt_mu_lo) config.opt.mu.lo = *over.opt_mu_lo;
  if (over.opt_mu_hi) config.opt.mu.hi = *over.opt_mu_hi;
  if (over.out_path) config.out_path = *over.out_path;
  if (over.seed) config.seed = *over.seed;
  if (over.mc_rounds) config.mc_rounds = *over.mc_rounds;
  if (over.mc_trials) config.mc_trials = static_cast<std::int64_t>(*over.mc_trials);
  return config;
}

int dispatch(const std::string& command, const cowqkd::RunConfig& config) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!config.out_path.empty()) {
    file.open(config.out_path);
    if (!file) {
      throw cowqkd::ConfigError(config.out_path + ": cannot open output path for writing");
    }
    out = &file;
  }
  if (command == "rate") return cowqkd::cmd_rate(config, *out);
  if (command == "sweep") return cowqkd::cmd_sweep(config, *out);
  if (command == "optimize") return cowqkd::cmd_optimize(config, *out);
  if (command == "compare-bounds") return cowqkd::cmd_compare_bounds(config, *out);
  if (command == "montecarlo") return cowqkd::cmd_montecarlo(config, *out);
  throw cowqkd::ConfigError("unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coherent-one-way QKD finite-key rate calculator"};
  app.require_subcommand(1);

  CliOverrides over;
  const char* names[] = {"rate", "sweep", "optimize", "compare-bounds", "montecarlo"};
  const char* descriptions[] = {
      "evaluate the finite-key pipeline at the configured points",
      "alias of rate for (L, N) grids",
      "optimize free parameters per grid point",
      "run the sweep with both bound engines and emit paired rows",
      "sample counts, run the pipeline on them and self-validate",
  };
  for (int i = 0; i < 5; ++i) {
    auto* cmd = app.add_subcommand(names[i], descriptions[i]);
    add_common_options(cmd, over);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = build_config(over);
    return dispatch(app.get_subcommands().front()->get_name(), config);
  } catch (const cowqkd::ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return cowqkd::kExitConfigError;
  } catch (const std::invalid_argument& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return cowqkd::kExitConfigError;
  } catch (const std::exception& error) {
    std::cerr << "internal error: " << error.what() << "\n";
    return cowqkd::kExitNumericalError;
  }
}
