#include "cowqkd/security.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cowqkd {

namespace {

constexpr std::array<SentState, 2> kDecoyStates{SentState::kDecoyPulsed,
                                                SentState::kDecoyVacuum};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Expected-case phase-error bound: the X-basis bit-error expression with the
// decoy-derived bounds substituted for the unknown X-state gains and the
// observed signal-state monitoring gains inserted directly.
double expected_phase_error(const PhaseGainBounds& pg,
                            const std::array<std::array<double, 2>, 2>& q_signal,
                            double mu) {
  const auto norm = normalization_factors(mu);
  const double m0_sum = q_signal[0][kM0] + q_signal[1][kM0];
  const double denom =
      2.0 * (q_signal[0][kM0] + q_signal[0][kM1] + q_signal[1][kM0] + q_signal[1][kM1]);
  if (!(denom > 0.0)) {
    throw std::invalid_argument("phase_error_upper: no monitoring-line signal clicks");
  }
  return (norm.n_plus * (pg.q0x_m1_upper - pg.q0x_m0_lower) + 2.0 * m0_sum) / denom;
}

std::array<std::array<double, 2>, 2> signal_gains_from_counts(const RealCounts& counts) {
  std::array<std::array<double, 2>, 2> q{};
  for (int bit = 0; bit < 2; ++bit) {
    const double sent = counts.sent[bit];
    if (!(sent > 0.0)) {
      throw std::invalid_argument("phase_error_upper: signal state never sent");
    }
    q[bit][kM0] = counts.mon[bit][kM0] / sent;
    q[bit][kM1] = counts.mon[bit][kM1] / sent;
  }
  return q;
}

}  // namespace

BoundedExpectations bound_expected_counts(const RealCounts& counts,
                                          const SecurityBudget& budget, BoundEngine engine) {
  BoundedExpectations be;
  for (int row = 0; row < 2; ++row) {
    const int w = state_index(kDecoyStates[row]);
    const double sent = counts.sent[w];
    if (!(sent > 0.0)) {
      throw std::invalid_argument("bound_expected_counts: decoy state never sent");
    }
    for (int det = 0; det < 2; ++det) {
      const double observed = counts.mon[w][det];
      ConcentrationBound bound;
      if (engine == BoundEngine::kKato) {
        bound = kato_upper_expected(observed, sent, budget.eps1);
      } else {
        const double dev = azuma_deviation(sent, budget.eps1);
        bound = ConcentrationBound{BoundDirection::kUpperOnExpected, 0.0,
                                   dev / std::sqrt(sent), dev, budget.eps1,
                                   std::min(observed + dev, sent)};
      }
      be.upper_bounds[row][det] = bound;
      be.n_upper[row][det] = bound.bound_value;
      be.q_upper[row][det] = clamp01(bound.bound_value / sent);
    }
    const double observed = counts.mon[w][kM0];
    ConcentrationBound lower;
    if (engine == BoundEngine::kKato) {
      lower = kato_lower_expected(observed, sent, budget.eps1);
    } else {
      const double dev = azuma_deviation(sent, budget.eps1);
      lower = ConcentrationBound{BoundDirection::kLowerOnExpected, 0.0,
                                 dev / std::sqrt(sent), dev, budget.eps1,
                                 std::max(observed - dev, 0.0)};
    }
    be.lower_bounds[row] = lower;
    be.n_lower[row] = lower.bound_value;
    be.q_lower[row] = clamp01(lower.bound_value / sent);
  }
  return be;
}

PhaseGainBounds phase_gain_bounds(const BoundedExpectations& be, double mu) {
  if (!(mu > 0.0)) {
    throw std::invalid_argument("phase_gain_bounds: mu must be positive");
  }
  const auto norm = normalization_factors(mu);
  const double exp_mu = std::exp(mu);
  const double exp_half = std::exp(0.5 * mu);

  const double root_pulsed_m1 = std::sqrt(be.q_upper[kRowPulsed][kM1]);
  const double root_vacuum_m1 = std::sqrt(be.q_upper[kRowVacuum][kM1]);
  const double coherent_sum = exp_half * root_pulsed_m1 + root_vacuum_m1 / exp_half;
  const double upper =
      (coherent_sum * coherent_sum +
       norm.n_minus * (exp_mu * norm.n_minus / 4.0 + exp_mu * root_pulsed_m1 + root_vacuum_m1)) /
      norm.n_plus;

  const double root_pulsed_m0 = std::sqrt(be.q_upper[kRowPulsed][kM0]);
  const double root_vacuum_m0 = std::sqrt(be.q_upper[kRowVacuum][kM0]);
  const double lower =
      (exp_mu * be.q_lower[kRowPulsed] + be.q_lower[kRowVacuum] / exp_mu -
       2.0 * std::sqrt(be.q_upper[kRowVacuum][kM0] * be.q_upper[kRowPulsed][kM0])) /
          norm.n_plus -
      (norm.n_minus / norm.n_plus) * (exp_mu * root_pulsed_m0 + root_vacuum_m0);

  return PhaseGainBounds{std::min(upper, 1.0), std::max(lower, 0.0)};
}

PhaseErrorEstimate phase_error_upper(const RealCounts& counts, const PhaseGainBounds& pg,
                                     double mu, const SecurityBudget& budget,
                                     PhaseTrialConvention convention) {
  const double n_z = counts.data_clicks;
  if (!(n_z > 0.0)) {
    throw std::invalid_argument("phase_error_upper: n_z must be positive");
  }
  const auto q_signal = signal_gains_from_counts(counts);
  const double ep_expected = expected_phase_error(pg, q_signal, mu);

  const double trial_base = convention == PhaseTrialConvention::kSifted
                                ? n_z
                                : counts.total_rounds();
  // The observed click count can never exceed n_z, so an expected value past
  // n_z is clamped there; the resulting bound is vacuous and aborts below.
  const double expected_clicks = std::clamp(trial_base * ep_expected, 0.0, n_z);
  const auto converted = kato_observed_bound(expected_clicks, n_z, budget.eps2,
                                             BoundDirection::kUpperOnObserved);

  PhaseErrorEstimate est;
  est.ep_expected = ep_expected;
  est.deviation = converted.deviation;
  const double raw = converted.bound_value / n_z;
  est.aborted = raw > 0.5;
  est.ep_upper = std::clamp(raw, 0.0, 0.5);
  return est;
}

KeyRateResult key_length(double n_z, double e_p_upper, double e_z,
                         const SecurityBudget& budget, double f_ec, double total_rounds) {
  if (!(n_z >= 0.0)) {
    throw std::invalid_argument("key_length: n_z must be >= 0");
  }
  if (!(e_p_upper >= 0.0 && e_p_upper <= 0.5) || !(e_z >= 0.0 && e_z <= 0.5)) {
    throw std::invalid_argument("key_length: error rates must lie in [0, 0.5]");
  }
  KeyRateResult result;
  result.n_z = n_z;
  result.e_p_upper = e_p_upper;
  result.e_z = e_z;
  result.leak_ec = f_ec * n_z * binary_entropy(e_z);
  const double raw = n_z * (1.0 - binary_entropy(e_p_upper)) - result.leak_ec -
                     std::log2(2.0 / budget.eps_cor) -
                     2.0 * std::log2(1.0 / (2.0 * budget.eps0));
  if (raw > 0.0) {
    result.key_length = static_cast<std::int64_t>(std::floor(raw));
  } else {
    result.key_length = 0;
    result.aborted = true;
  }
  if (result.key_length == 0) result.aborted = true;
  result.rate_per_pulse =
      total_rounds > 0.0 ? static_cast<double>(result.key_length) / (2.0 * total_rounds) : 0.0;
  return result;
}

KeyRateResult finite_key_rate(const RealCounts& counts, const ProtocolParams& params,
                              const SecurityBudget& budget, BoundEngine engine,
                              PhaseTrialConvention convention) {
  const double total_rounds = counts.total_rounds();
  const double n_z = counts.data_clicks;

  KeyRateResult result;
  result.trace.budget =
      BudgetAudit{budget.eps_smooth, budget.eps0, budget.eps1, 6, budget.eps2};
  // Fewer than one expected sifted click cannot yield a key; abort before
  // the conversion bound, whose trial count must be >= 1.
  if (!(n_z >= 1.0)) {
    result.aborted = true;
    result.e_p_upper = 0.5;
    result.n_z = std::max(n_z, 0.0);
    return result;
  }

  const auto be = bound_expected_counts(counts, budget, engine);
  const auto pg = phase_gain_bounds(be, params.mu);
  const auto pe = phase_error_upper(counts, pg, params.mu, budget, convention);
  const double e_z = std::clamp(counts.data_errors / n_z, 0.0, 0.5);

  result = key_length(n_z, pe.ep_upper, e_z, budget, params.f_ec, total_rounds);
  if (pe.aborted) {
    result.key_length = 0;
    result.rate_per_pulse = 0.0;
    result.aborted = true;
  }
  result.trace.decoy = be;
  result.trace.phase_gains = pg;
  result.trace.phase_error = pe;
  result.trace.signal_mon_gains = signal_gains_from_counts(counts);
  result.trace.budget =
      BudgetAudit{budget.eps_smooth, budget.eps0, budget.eps1, 6, budget.eps2};
  return result;
}

double asymptotic_key_rate(const ProtocolParams& params, double eta) {
  const GainTable gains = expected_gains(params, eta);

  BoundedExpectations be;
  for (int row = 0; row < 2; ++row) {
    const int w = state_index(kDecoyStates[row]);
    for (int det = 0; det < 2; ++det) {
      be.q_upper[row][det] = gains.q_mon[w][det];
    }
    be.q_lower[row] = gains.q_mon[w][kM0];
  }
  const auto pg = phase_gain_bounds(be, params.mu);

  std::array<std::array<double, 2>, 2> q_signal{};
  for (int bit = 0; bit < 2; ++bit) {
    q_signal[bit][kM0] = gains.q_mon[bit][kM0];
    q_signal[bit][kM1] = gains.q_mon[bit][kM1];
  }
  if (!(gains.q_z_sig > 0.0)) return 0.0;

  double ep;
  try {
    ep = expected_phase_error(pg, q_signal, params.mu);
  } catch (const std::invalid_argument&) {
    return 0.0;
  }
  if (ep >= 0.5) return 0.0;
  ep = std::max(ep, 0.0);
  const double e_z = std::clamp(gains.q_z_wrongslot / gains.q_z_sig, 0.0, 0.5);
  const double bracket =
      1.0 - binary_entropy(ep) - params.f_ec * binary_entropy(e_z);
  if (bracket <= 0.0) return 0.0;
  return params.p_z() * gains.q_z_sig * bracket;
}

}  // namespace cowqkd
