#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cowqkd/optimizer.hpp"
#include "cowqkd/security.hpp"

namespace cowqkd {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAbortEverywhere = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

struct RunConfig {
  std::vector<double> lengths_km;
  std::optional<double> eta_direct;   // alternative to a length grid
  std::vector<double> rounds_list;    // N values
  ProtocolParams params;              // template; n_rounds filled per point
  SecurityBudget budget{};
  BoundEngine engine = BoundEngine::kKato;
  PhaseTrialConvention convention = PhaseTrialConvention::kSifted;
  bool optimize_params = false;
  OptimizationSpec opt{};
  std::string out_path;               // empty: standard output
  std::uint64_t seed = 1;
  double mc_rounds = 1e7;             // montecarlo sampling size (<= 1e8)
  std::int64_t mc_trials = 100000;    // coverage trials per p value
};

// Thrown on malformed configs; carries a "file:line: message" diagnostic.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig default_config();
void apply_config_line(RunConfig& config, const std::string& key, const std::string& value,
                       const std::string& where);
RunConfig parse_config_file(const std::string& path, RunConfig base);

// One evaluated grid point, in the stable CSV column order.
struct SweepRow {
  double length_km = 0.0;
  double eta = 0.0;
  std::int64_t n_rounds = 0;
  ProtocolParams params;
  KeyRateResult result;
  BoundEngine engine = BoundEngine::kKato;
  double q00_upper_m0 = 0.0;  // emitted by compare-bounds only
};

std::string csv_header(bool with_q00 = false);
std::string csv_row(const SweepRow& row, bool with_q00 = false);

// Evaluates the (N, L) grid with OpenMP; rows come back in deterministic
// grid order (N outer, L inner) regardless of scheduling.
std::vector<SweepRow> run_sweep(const RunConfig& config, BoundEngine engine);

int cmd_rate(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_optimize(const RunConfig& config, std::ostream& out);
int cmd_compare_bounds(const RunConfig& config, std::ostream& out);
int cmd_montecarlo(const RunConfig& config, std::ostream& out);

}  // namespace cowqkd
