#include "cowqkd/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cowqkd/concentration.hpp"
#include "cowqkd/rng.hpp"

namespace cowqkd {

namespace {

constexpr std::int64_t kTrialChunk = 1 << 10;

struct BoundTables {
  std::vector<double> upper_expected;  // indexed by Gamma
  std::vector<double> lower_expected;
  double observed_delta = 0.0;
};

BoundTables precompute(std::int64_t k, double epsilon) {
  BoundTables tables;
  tables.upper_expected.resize(static_cast<std::size_t>(k) + 1);
  tables.lower_expected.resize(static_cast<std::size_t>(k) + 1);
  for (std::int64_t gamma = 0; gamma <= k; ++gamma) {
    const double g = static_cast<double>(gamma);
    const double kk = static_cast<double>(k);
    tables.upper_expected[gamma] = kato_upper_expected(g, kk, epsilon).bound_value;
    tables.lower_expected[gamma] = kato_lower_expected(g, kk, epsilon).bound_value;
  }
  tables.observed_delta = std::sqrt(0.5 * static_cast<double>(k) * std::log(1.0 / epsilon));
  return tables;
}

std::array<std::int64_t, 4> run_chunk(const BoundTables& tables, double p, std::int64_t k,
                                      double true_mean, std::uint64_t seed,
                                      std::uint64_t chunk_index, std::int64_t trials) {
  Rng rng(Rng::substream_seed(seed, chunk_index));
  std::array<std::int64_t, 4> violations{};
  for (std::int64_t t = 0; t < trials; ++t) {
    std::int64_t gamma = 0;
    for (std::int64_t i = 0; i < k; ++i) gamma += rng.uniform() < p ? 1 : 0;
    const double g = static_cast<double>(gamma);
    if (true_mean > tables.upper_expected[gamma]) violations[0] += 1;
    if (true_mean < tables.lower_expected[gamma]) violations[1] += 1;
    if (g > true_mean + tables.observed_delta) violations[2] += 1;
    if (g < true_mean - tables.observed_delta) violations[3] += 1;
  }
  return violations;
}

}  // namespace

double CoverageResult::threshold(double n_sigma) const {
  const double sigma =
      std::sqrt(epsilon * (1.0 - epsilon) / static_cast<double>(trials));
  return epsilon + n_sigma * sigma;
}

bool CoverageResult::pass(double n_sigma) const {
  for (int i = 0; i < 4; ++i) {
    if (violation_fraction(i) > threshold(n_sigma)) return false;
  }
  return true;
}

CoverageResult kato_coverage_serial(double p, std::int64_t k, double epsilon,
                                    std::int64_t trials, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0) || k < 1 || trials < 1) {
    throw std::invalid_argument("kato_coverage: bad arguments");
  }
  const BoundTables tables = precompute(k, epsilon);
  const double true_mean = static_cast<double>(k) * p;
  CoverageResult result{p, k, epsilon, trials, {}};
  const std::int64_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t n = std::min<std::int64_t>(kTrialChunk, trials - c * kTrialChunk);
    const auto part =
        run_chunk(tables, p, k, true_mean, seed, static_cast<std::uint64_t>(c), n);
    for (int i = 0; i < 4; ++i) result.violations[i] += part[i];
  }
  return result;
}

CoverageResult kato_coverage(double p, std::int64_t k, double epsilon, std::int64_t trials,
                             std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0) || k < 1 || trials < 1) {
    throw std::invalid_argument("kato_coverage: bad arguments");
  }
  const BoundTables tables = precompute(k, epsilon);
  const double true_mean = static_cast<double>(k) * p;
  CoverageResult result{p, k, epsilon, trials, {}};
  const std::int64_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
#pragma omp parallel
  {
    std::array<std::int64_t, 4> local{};
#pragma omp for schedule(static) nowait
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::int64_t n = std::min<std::int64_t>(kTrialChunk, trials - c * kTrialChunk);
      const auto part =
          run_chunk(tables, p, k, true_mean, seed, static_cast<std::uint64_t>(c), n);
      for (int i = 0; i < 4; ++i) local[i] += part[i];
    }
#pragma omp critical
    for (int i = 0; i < 4; ++i) result.violations[i] += local[i];
  }
  return result;
}

}  // namespace cowqkd
