#include "cowqkd/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <stdexcept>

namespace cowqkd {

namespace {

void check_inputs(double sum, double trials, double eps, const char* who) {
  if (!(trials >= 1.0) || !std::isfinite(trials)) {
    throw std::invalid_argument(std::string(who) + ": trials must be >= 1");
  }
  if (!(sum >= 0.0 && sum <= trials)) {
    throw std::invalid_argument(std::string(who) + ": sum must lie in [0, trials]");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": eps must lie in (0, 1)");
  }
}

struct OptimalPair {
  double a;
  double b;
  double deviation;
};

// Closed-form minimizer of [b + a (2 Gamma/k - 1)] sqrt(k) subject to the
// failure-probability constraint. Powers of k are factored out first so the
// largest intermediate scales like k ln^2(eps) even at k ~ 1e11.
OptimalPair kato_optimal(double gamma, double k, double eps, bool lower) {
  const double log_eps = std::log(eps);  // negative
  const double frac = gamma / k;         // in [0, 1]
  const double spread = 9.0 * k * frac * (1.0 - frac) - 2.0 * log_eps;  // > 0
  const double disc = -log_eps * spread;
  if (!(disc >= 0.0)) {
    throw std::runtime_error("kato_optimal: negative discriminant (internal numerical assertion)");
  }
  const double sqrt_k = std::sqrt(k);
  const double even_part = 72.0 * k * frac * (1.0 - frac) * log_eps - 16.0 * log_eps * log_eps;
  const double odd_part =
      9.0 * std::numbers::sqrt2 * k * (1.0 - 2.0 * frac) * std::sqrt(disc);
  const double numer = lower ? -(even_part - odd_part) : (even_part + odd_part);
  const double denom = (9.0 * k - 8.0 * log_eps) * spread;
  const double a = 0.75 * sqrt_k * numer / denom;

  const double cross = lower ? -24.0 * a * sqrt_k : 24.0 * a * sqrt_k;
  const double radicand = 18.0 * a * a * k - (16.0 * a * a + cross + 9.0 * k) * log_eps;
  if (!(radicand >= 0.0)) {
    throw std::runtime_error("kato_optimal: negative radicand (internal numerical assertion)");
  }
  const double b = std::sqrt(radicand) / (3.0 * std::sqrt(2.0 * k));
  // b >= |a| makes the true deviation non-negative; the subtraction can leave
  // a tiny negative residue at the saturated corners.
  const double deviation = std::max((b + a * (2.0 * frac - 1.0)) * sqrt_k, 0.0);
  return {a, b, deviation};
}

}  // namespace

ConcentrationBound kato_upper_expected(double observed_sum, double trials, double eps) {
  check_inputs(observed_sum, trials, eps, "kato_upper_expected");
  const auto opt = kato_optimal(observed_sum, trials, eps, /*lower=*/false);
  return ConcentrationBound{BoundDirection::kUpperOnExpected, opt.a, opt.b, opt.deviation,
                            eps, std::min(observed_sum + opt.deviation, trials)};
}

ConcentrationBound kato_lower_expected(double observed_sum, double trials, double eps) {
  check_inputs(observed_sum, trials, eps, "kato_lower_expected");
  const auto opt = kato_optimal(observed_sum, trials, eps, /*lower=*/true);
  return ConcentrationBound{BoundDirection::kLowerOnExpected, opt.a, opt.b, opt.deviation,
                            eps, std::max(observed_sum - opt.deviation, 0.0)};
}

ConcentrationBound kato_observed_bound(double expected_sum, double trials, double eps,
                                       BoundDirection direction) {
  check_inputs(expected_sum, trials, eps, "kato_observed_bound");
  if (direction != BoundDirection::kUpperOnObserved &&
      direction != BoundDirection::kLowerOnObserved) {
    throw std::invalid_argument("kato_observed_bound: direction must be on the observed value");
  }
  const double log_inv = std::log(1.0 / eps);
  const double deviation = std::sqrt(0.5 * trials * log_inv);
  const double b = std::sqrt(0.5 * log_inv);
  const double value = direction == BoundDirection::kUpperOnObserved
                           ? std::min(expected_sum + deviation, trials)
                           : std::max(expected_sum - deviation, 0.0);
  return ConcentrationBound{direction, 0.0, b, deviation, eps, value};
}

double azuma_deviation(double trials, double eps) {
  if (!(trials >= 1.0)) {
    throw std::invalid_argument("azuma_deviation: trials must be >= 1");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("azuma_deviation: eps must lie in (0, 1)");
  }
  return std::sqrt(2.0 * trials * std::log(1.0 / eps));
}

}  // namespace cowqkd
