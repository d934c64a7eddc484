#pragma once

#include <array>
#include <cstdint>

namespace cowqkd {

// Monte Carlo check that the four bound shapes cover the true expected sum
// (k * p for i.i.d. Bernoulli trials) with failure frequency <= epsilon.
// Violations are indexed by BoundDirection order: upper-on-expected,
// lower-on-expected, upper-on-observed, lower-on-observed.
struct CoverageResult {
  double p = 0.0;
  std::int64_t k = 0;
  double epsilon = 0.0;
  std::int64_t trials = 0;
  std::array<std::int64_t, 4> violations{};

  double violation_fraction(int which) const {
    return static_cast<double>(violations[which]) / static_cast<double>(trials);
  }
  // epsilon plus n_sigma binomial standard deviations of the frequency.
  double threshold(double n_sigma) const;
  bool pass(double n_sigma = 3.0) const;
};

CoverageResult kato_coverage(double p, std::int64_t k, double epsilon,
                             std::int64_t trials, std::uint64_t seed);
CoverageResult kato_coverage_serial(double p, std::int64_t k, double epsilon,
                                    std::int64_t trials, std::uint64_t seed);

}  // namespace cowqkd
