#pragma once

namespace cowqkd {

enum class BoundDirection {
  kUpperOnExpected,  // observed sum -> upper bound on the expected sum
  kLowerOnExpected,  // observed sum -> lower bound on the expected sum
  kUpperOnObserved,  // expected sum -> upper bound on the observed sum
  kLowerOnObserved,  // expected sum -> lower bound on the observed sum
};

// One application of a martingale concentration bound to a sum of k
// [0,1]-valued random variables. The linear-correction parameters satisfy
// b >= |a|; a == 0 for the fixed-form conversions and the Azuma baseline.
struct ConcentrationBound {
  BoundDirection direction;
  double a = 0.0;
  double b = 0.0;
  double deviation = 0.0;     // additive term before clamping
  double failure_prob = 0.0;
  double bound_value = 0.0;   // clamped into [0, trials]
};

// Tight bounds with the closed-form optimal (a, b) pair. Counts are taken as
// reals: expected counts are generally non-integer and nothing in the bound
// requires integrality. The observed sum must lie in [0, trials], trials >= 1,
// and 0 < eps < 1.
ConcentrationBound kato_upper_expected(double observed_sum, double trials, double eps);
ConcentrationBound kato_lower_expected(double observed_sum, double trials, double eps);

// Fixed a = 0 form used when the observed value is not yet known:
// deviation sqrt(k ln(1/eps) / 2) around the expected sum. Direction must be
// kUpperOnObserved or kLowerOnObserved.
ConcentrationBound kato_observed_bound(double expected_sum, double trials, double eps,
                                       BoundDirection direction);

// One-sided Azuma-Hoeffding deviation sqrt(2 k ln(1/eps)) for differences
// bounded by 1; baseline for engine comparisons.
double azuma_deviation(double trials, double eps);

}  // namespace cowqkd
