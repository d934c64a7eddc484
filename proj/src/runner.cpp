#include "cowqkd/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cowqkd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double parsed = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + value + "'");
  }
}

std::vector<double> parse_list(const std::string& value, const std::string& where) {
  std::vector<double> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(item, where));
  }
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

bool parse_bool(const std::string& value, const std::string& where) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(where + ": not a boolean: '" + value + "'");
}

std::string format(const char* fmt, double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, fmt, v);
  return buffer;
}

ChannelScenario scenario_for(const RunConfig& config, double length_km) {
  if (config.eta_direct) return ChannelScenario::from_transmittance(*config.eta_direct);
  return ChannelScenario::from_length_km(length_km);
}

}  // namespace

RunConfig default_config() {
  RunConfig config;
  config.lengths_km = {50.0};
  config.rounds_list = {1e11};
  config.params = ProtocolParams{};
  config.params.mu = 0.002;
  config.params.t_b = 0.5;
  config.params.p_d1 = 0.05;
  config.params.p_d2 = 0.05;
  config.budget = epsilon_budget(1e-10, 1e-15);
  config.opt.mu = ParamRange{1e-5, 1.0};
  return config;
}

void apply_config_line(RunConfig& config, const std::string& key, const std::string& value,
                       const std::string& where) {
  if (key == "L" || key == "lengths") {
    config.lengths_km = parse_list(value, where);
    config.eta_direct.reset();
  } else if (key == "eta") {
    config.eta_direct = parse_double(value, where);
  } else if (key == "N" || key == "rounds") {
    config.rounds_list = parse_list(value, where);
  } else if (key == "mu") {
    config.params.mu = parse_double(value, where);
  } else if (key == "t_B") {
    config.params.t_b = parse_double(value, where);
  } else if (key == "p_d1") {
    config.params.p_d1 = parse_double(value, where);
  } else if (key == "p_d2") {
    config.params.p_d2 = parse_double(value, where);
  } else if (key == "e_d") {
    config.params.e_mis = parse_double(value, where);
  } else if (key == "f_ec") {
    config.params.f_ec = parse_double(value, where);
  } else if (key == "p_dark") {
    config.params.detector.p_dark = parse_double(value, where);
  } else if (key == "eta_det") {
    config.params.detector.eta_det = parse_double(value, where);
  } else if (key == "basis") {
    if (value == "passive") {
      config.params.basis = BasisMode::kPassive;
    } else if (value == "active") {
      config.params.basis = BasisMode::kActive;
    } else {
      throw ConfigError(where + ": basis must be passive|active");
    }
  } else if (key == "route_prob") {
    config.params.active_route_prob = parse_double(value, where);
  } else if (key == "eps_cor") {
    config.budget = epsilon_budget(config.budget.eps_sec, parse_double(value, where));
  } else if (key == "eps_sec") {
    config.budget = epsilon_budget(parse_double(value, where), config.budget.eps_cor);
  } else if (key == "engine") {
    if (value == "kato") {
      config.engine = BoundEngine::kKato;
    } else if (value == "azuma") {
      config.engine = BoundEngine::kAzuma;
    } else {
      throw ConfigError(where + ": engine must be kato|azuma");
    }
  } else if (key == "phase_trials") {
    if (value == "sifted") {
      config.convention = PhaseTrialConvention::kSifted;
    } else if (value == "total") {
      config.convention = PhaseTrialConvention::kTotal;
    } else {
      throw ConfigError(where + ": phase_trials must be sifted|total");
    }
  } else if (key == "optimize") {
    config.optimize_params = parse_bool(value, where);
  } else if (key == "opt_budget") {
    config.opt.eval_budget = static_cast<int>(parse_double(value, where));
  } else if (key == "opt_free") {
    config.opt.free_mu = config.opt.free_t_b = false;
    config.opt.free_p_d1 = config.opt.free_p_d2 = false;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
      item = trim(item);
      if (item == "mu") {
        config.opt.free_mu = true;
      } else if (item == "t_B") {
        config.opt.free_t_b = true;
      } else if (item == "p_d1") {
        config.opt.free_p_d1 = true;
      } else if (item == "p_d2") {
        config.opt.free_p_d2 = true;
      } else {
        throw ConfigError(where + ": unknown free variable '" + item + "'");
      }
    }
  } else if (key == "opt_mu_lo") {
    config.opt.mu.lo = parse_double(value, where);
  } else if (key == "opt_mu_hi") {
    config.opt.mu.hi = parse_double(value, where);
  } else if (key == "opt_tb_lo") {
    config.opt.t_b.lo = parse_double(value, where);
  } else if (key == "opt_tb_hi") {
    config.opt.t_b.hi = parse_double(value, where);
  } else if (key == "opt_pd1_lo") {
    config.opt.p_d1.lo = parse_double(value, where);
  } else if (key == "opt_pd1_hi") {
    config.opt.p_d1.hi = parse_double(value, where);
  } else if (key == "opt_pd2_lo") {
    config.opt.p_d2.lo = parse_double(value, where);
  } else if (key == "opt_pd2_hi") {
    config.opt.p_d2.hi = parse_double(value, where);
  } else if (key == "out") {
    config.out_path = value;
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_double(value, where));
  } else if (key == "mc_rounds") {
    config.mc_rounds = parse_double(value, where);
  } else if (key == "mc_trials") {
    config.mc_trials = static_cast<std::int64_t>(parse_double(value, where));
  } else {
    throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream file(path);
  if (!file) throw ConfigError(path + ": cannot open config file");
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + ": expected 'key = value'");
    apply_config_line(base, key, value, where);
  }
  return base;
}

std::string csv_header(bool with_q00) {
  std::string header =
      "L_km,eta,N,mu,t_B,p_d1,p_d2,e_d,n_z,E_z,Ep_upper,leak_EC,key_length,"
      "rate_per_pulse,engine,aborted";
  if (with_q00) header += ",q00_upper_M0";
  return header;
}

std::string csv_row(const SweepRow& row, bool with_q00) {
  std::string out;
  out += format("%.6g", row.length_km) + ",";
  out += format("%.10g", row.eta) + ",";
  char n_buf[32];
  std::snprintf(n_buf, sizeof n_buf, "%lld", static_cast<long long>(row.n_rounds));
  out += std::string(n_buf) + ",";
  out += format("%.10g", row.params.mu) + ",";
  out += format("%.10g", row.params.t_b) + ",";
  out += format("%.10g", row.params.p_d1) + ",";
  out += format("%.10g", row.params.p_d2) + ",";
  out += format("%.10g", row.params.e_mis) + ",";
  out += format("%.10g", row.result.n_z) + ",";
  out += format("%.10g", row.result.e_z) + ",";
  out += format("%.10g", row.result.e_p_upper) + ",";
  out += format("%.10g", row.result.leak_ec) + ",";
  char l_buf[32];
  std::snprintf(l_buf, sizeof l_buf, "%lld", static_cast<long long>(row.result.key_length));
  out += std::string(l_buf) + ",";
  out += format("%.10g", row.result.rate_per_pulse) + ",";
  out += row.engine == BoundEngine::kKato ? "kato," : "azuma,";
  out += row.result.aborted ? "1" : "0";
  if (with_q00) out += "," + format("%.10g", row.q00_upper_m0);
  return out;
}

std::vector<SweepRow> run_sweep(const RunConfig& config, BoundEngine engine) {
  if (config.lengths_km.empty() && !config.eta_direct) {
    throw ConfigError("config: distance grid is empty");
  }
  if (config.rounds_list.empty()) {
    throw ConfigError("config: round-count grid is empty");
  }
  const std::vector<double> lengths =
      config.eta_direct ? std::vector<double>{scenario_for(config, 0.0).length_km()}
                        : config.lengths_km;

  const std::size_t n_points = config.rounds_list.size() * lengths.size();
  std::vector<SweepRow> rows(n_points);

  // Exceptions cannot unwind out of the parallel region; the first one (in
  // grid order) is stashed and rethrown afterwards.
  std::exception_ptr first_error = nullptr;

#pragma omp parallel for schedule(dynamic) collapse(2)
  for (std::size_t ni = 0; ni < config.rounds_list.size(); ++ni) {
    for (std::size_t li = 0; li < lengths.size(); ++li) {
      try {
        const auto scenario = ChannelScenario::from_length_km(lengths[li]);
        const double eta = system_transmittance(scenario);

        ProtocolParams params = config.params;
        params.n_rounds = static_cast<std::int64_t>(config.rounds_list[ni]);

        SweepRow row;
        row.length_km = lengths[li];
        row.eta = eta;
        row.n_rounds = params.n_rounds;
        row.engine = engine;

        if (config.optimize_params) {
          OptimizationSpec spec = config.opt;
          const auto opt = optimize(params, scenario, spec, config.budget, engine,
                                    config.convention);
          row.params = opt.params;
          row.result = opt.result;
        } else {
          validate_params(params);
          row.params = params;
          row.result = finite_key_rate(expected_counts(params, eta), params, config.budget,
                                       engine, config.convention);
        }
        row.q00_upper_m0 = row.result.trace.decoy.q_upper[kRowVacuum][kM0];
        rows[ni * lengths.size() + li] = row;
      } catch (...) {
#pragma omp critical
        if (!first_error) first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

namespace {

int emit_rows(const std::vector<SweepRow>& rows, bool with_q00, std::ostream& out) {
  out << csv_header(with_q00) << "\n";
  bool any_positive = false;
  for (const auto& row : rows) {
    out << csv_row(row, with_q00) << "\n";
    if (!row.result.aborted && row.result.key_length > 0) any_positive = true;
  }
  return any_positive ? kExitOk : kExitAbortEverywhere;
}

}  // namespace

int cmd_rate(const RunConfig& config, std::ostream& out) {
  return emit_rows(run_sweep(config, config.engine), false, out);
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  return emit_rows(run_sweep(config, config.engine), false, out);
}

int cmd_optimize(const RunConfig& config, std::ostream& out) {
  RunConfig forced = config;
  forced.optimize_params = true;
  return emit_rows(run_sweep(forced, config.engine), false, out);
}

int cmd_compare_bounds(const RunConfig& config, std::ostream& out) {
  const auto kato_rows = run_sweep(config, BoundEngine::kKato);
  const auto azuma_rows = run_sweep(config, BoundEngine::kAzuma);
  out << csv_header(true) << "\n";
  bool any_positive = false;
  for (std::size_t i = 0; i < kato_rows.size(); ++i) {
    out << csv_row(kato_rows[i], true) << "\n";
    out << csv_row(azuma_rows[i], true) << "\n";
    if (!kato_rows[i].result.aborted || !azuma_rows[i].result.aborted) any_positive = true;
  }
  return any_positive ? kExitOk : kExitAbortEverywhere;
}

}  // namespace cowqkd
