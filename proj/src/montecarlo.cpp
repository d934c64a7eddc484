#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cowqkd/coverage.hpp"
#include "cowqkd/rng.hpp"
#include "cowqkd/runner.hpp"

namespace cowqkd {

namespace {

struct CellCheck {
  std::string name;
  double observed;
  double expected;
  double sigma;

  // 5 sigma plus a two-count slack so near-empty Poisson cells (vacuum-decoy
  // dark clicks) are judged sensibly.
  bool pass() const { return std::abs(observed - expected) <= 5.0 * sigma + 2.0; }
};

double binomial_sigma(double n, double p) {
  return std::sqrt(std::max(n * p * (1.0 - p), 0.0));
}

void print_check(std::ostream& out, const CellCheck& check) {
  char line[160];
  std::snprintf(line, sizeof line, "  %-22s observed=%.6g expected=%.6g sigma=%.6g [%s]",
                check.name.c_str(), check.observed, check.expected, check.sigma,
                check.pass() ? "ok" : "VIOLATION");
  out << line << "\n";
}

const char* state_name(int w) {
  switch (w) {
    case 0: return "bit0";
    case 1: return "bit1";
    case 2: return "decoy_pulsed";
    default: return "decoy_vacuum";
  }
}

}  // namespace

int cmd_montecarlo(const RunConfig& config, std::ostream& out) {
  if (!(config.mc_rounds >= 1.0 && config.mc_rounds <= 1e8)) {
    throw ConfigError("config: mc_rounds must lie in [1, 1e8]");
  }
  const double length =
      config.eta_direct ? ChannelScenario::from_transmittance(*config.eta_direct).length_km()
                        : (config.lengths_km.empty() ? 10.0 : config.lengths_km.front());
  const auto scenario = ChannelScenario::from_length_km(length);
  const double eta = system_transmittance(scenario);

  ProtocolParams params = config.params;
  params.n_rounds = static_cast<std::int64_t>(config.mc_rounds);
  validate_params(params);

  char header[160];
  std::snprintf(header, sizeof header,
                "montecarlo: N=%lld L=%.6g km eta=%.6g seed=%llu engine=%s",
                static_cast<long long>(params.n_rounds), length, eta,
                static_cast<unsigned long long>(config.seed),
                config.engine == BoundEngine::kKato ? "kato" : "azuma");
  out << header << "\n";

  const ClickCounts sampled = simulate_counts(params, eta, config.seed);
  const RealCounts expected = expected_counts(params, eta);
  const GainTable gains = expected_gains(params, eta);

  bool all_ok = true;

  out << "count consistency (5 sigma binomial envelopes):\n";
  std::vector<CellCheck> checks;
  const double n = static_cast<double>(params.n_rounds);
  const std::array<double, kNumStates> p_send{params.p_z(), params.p_z(), params.p_d1,
                                              params.p_d2};
  for (int w = 0; w < kNumStates; ++w) {
    checks.push_back({std::string("sent[") + state_name(w) + "]",
                      static_cast<double>(sampled.sent[w]), expected.sent[w],
                      binomial_sigma(n, p_send[w])});
  }
  for (int w = 0; w < kNumStates; ++w) {
    const double sent = static_cast<double>(sampled.sent[w]);
    for (int det = 0; det < 2; ++det) {
      checks.push_back({std::string("mon[") + state_name(w) + "][M" + std::to_string(det) + "]",
                        static_cast<double>(sampled.mon[w][det]),
                        sent * gains.q_mon[w][det],
                        binomial_sigma(sent, gains.q_mon[w][det])});
    }
  }
  const double signal_rounds =
      static_cast<double>(sampled.sent[0] + sampled.sent[1]);
  checks.push_back({"n_z", static_cast<double>(sampled.data_clicks),
                    signal_rounds * gains.q_z_sig,
                    binomial_sigma(signal_rounds, gains.q_z_sig)});
  const double wrong_given_click =
      gains.q_z_sig > 0.0 ? gains.q_z_wrongslot / gains.q_z_sig : 0.0;
  checks.push_back({"n_z_err", static_cast<double>(sampled.data_errors),
                    static_cast<double>(sampled.data_clicks) * wrong_given_click,
                    binomial_sigma(static_cast<double>(sampled.data_clicks),
                                   wrong_given_click)});
  for (const auto& check : checks) {
    print_check(out, check);
    all_ok = all_ok && check.pass();
  }

  // Key-rate agreement: the sampled-counts key length must fall inside the
  // interval spanned by the pipeline evaluated at every +-5 sigma corner of
  // the click-count cells.
  const KeyRateResult from_samples = finite_key_rate(to_real(sampled), params, config.budget,
                                                     config.engine, config.convention);
  const KeyRateResult from_expected =
      finite_key_rate(expected, params, config.budget, config.engine, config.convention);

  std::int64_t lo = from_expected.key_length;
  std::int64_t hi = from_expected.key_length;
  for (int mask = 0; mask < (1 << 10); ++mask) {
    RealCounts corner = expected;
    int bit = 0;
    for (int w = 0; w < kNumStates; ++w) {
      for (int det = 0; det < 2; ++det, ++bit) {
        const double sigma = binomial_sigma(corner.sent[w], gains.q_mon[w][det]);
        corner.mon[w][det] = std::max(
            corner.mon[w][det] + ((mask >> bit) & 1 ? 5.0 : -5.0) * sigma, 0.0);
      }
    }
    const double sig_n = corner.sent[0] + corner.sent[1];
    const double sigma_z = binomial_sigma(sig_n, gains.q_z_sig);
    corner.data_clicks =
        std::max(corner.data_clicks + ((mask >> 8) & 1 ? 5.0 : -5.0) * sigma_z, 1.0);
    const double sigma_err = binomial_sigma(corner.data_clicks, wrong_given_click);
    corner.data_errors = std::clamp(
        corner.data_errors + ((mask >> 9) & 1 ? 5.0 : -5.0) * sigma_err, 0.0,
        corner.data_clicks);
    const KeyRateResult at_corner =
        finite_key_rate(corner, params, config.budget, config.engine, config.convention);
    lo = std::min(lo, at_corner.key_length);
    hi = std::max(hi, at_corner.key_length);
  }
  const bool envelope_ok = from_samples.key_length >= lo && from_samples.key_length <= hi;
  all_ok = all_ok && envelope_ok;

  char rate_line[200];
  std::snprintf(rate_line, sizeof rate_line,
                "key length: sampled=%lld expected=%lld envelope=[%lld, %lld] [%s]",
                static_cast<long long>(from_samples.key_length),
                static_cast<long long>(from_expected.key_length), static_cast<long long>(lo),
                static_cast<long long>(hi), envelope_ok ? "ok" : "VIOLATION");
  out << rate_line << "\n";
  std::snprintf(rate_line, sizeof rate_line,
                "rate per pulse: sampled=%.10g expected=%.10g Ep: sampled=%.6g expected=%.6g",
                from_samples.rate_per_pulse, from_expected.rate_per_pulse,
                from_samples.e_p_upper, from_expected.e_p_upper);
  out << rate_line << "\n";

  out << "concentration coverage (k=1000, eps=0.01):\n";
  std::uint64_t coverage_index = 0;
  for (double p : {0.001, 0.1, 0.5}) {
    const auto coverage =
        kato_coverage(p, 1000, 0.01, config.mc_trials,
                      Rng::substream_seed(config.seed, 1000 + coverage_index));
    ++coverage_index;
    char line[200];
    std::snprintf(line, sizeof line,
                  "  p=%.3g violations: upE=%.5f loE=%.5f upO=%.5f loO=%.5f "
                  "threshold=%.5f [%s]",
                  p, coverage.violation_fraction(0), coverage.violation_fraction(1),
                  coverage.violation_fraction(2), coverage.violation_fraction(3),
                  coverage.threshold(3.0), coverage.pass() ? "ok" : "VIOLATION");
    out << line << "\n";
    all_ok = all_ok && coverage.pass();
  }

  out << (all_ok ? "PASS" : "FAIL") << "\n";
  return all_ok ? kExitOk : kExitAbortEverywhere;
}

}  // namespace cowqkd
