#include <cmath>
#include <stdexcept>
#include <limits>

#include <doctest.h>

#include "cowqkd/model.hpp"
#include "cowqkd/rng.hpp"
#include "support/mpfr_oracle.hpp"

using namespace cowqkd;

namespace {

ProtocolParams reference_defaults() {
  ProtocolParams p;
  p.mu = 0.005;
  p.t_b = 0.5;
  p.p_d1 = 0.05;
  p.p_d2 = 0.05;
  p.n_rounds = 1000;
  p.detector.p_dark = 2e-8;
  p.detector.eta_det = 0.7;
  p.e_mis = 0.01;
  p.f_ec = 1.1;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("binary entropy endpoints and maximum") {
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.01) == doctest::Approx(0.0807931358959112).epsilon(1e-12));
  CHECK_THROWS_AS(binary_entropy(-0.001), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy(1.001), std::invalid_argument);
}

TEST_CASE("binary entropy symmetry and monotonicity") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform();
    CHECK(binary_entropy(x) == doctest::Approx(binary_entropy(1.0 - x)).epsilon(1e-13));
  }
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double h = binary_entropy(0.5 * i / 100.0);
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("binary entropy matches the high-precision oracle") {
  for (double x : {1e-9, 1e-4, 0.01, 0.1, 0.25, 0.3333, 0.499, 0.5}) {
    CHECK(binary_entropy(x) == doctest::Approx(oracle::binary_entropy(x)).epsilon(1e-10));
  }
}

TEST_CASE("normalization factors") {
  const auto at_zero = normalization_factors(0.0);
  CHECK(at_zero.n_plus == 4.0);
  CHECK(at_zero.n_minus == 0.0);

  const auto at_large = normalization_factors(1e4);
  CHECK(at_large.n_plus == doctest::Approx(2.0));
  CHECK(at_large.n_minus == doctest::Approx(2.0));

  const auto at_tenth = normalization_factors(0.1);
  CHECK(at_tenth.n_plus == doctest::Approx(3.8096748360719191).epsilon(1e-13));
  CHECK(at_tenth.n_minus == doctest::Approx(0.1903251639280809).epsilon(1e-13));
  CHECK(at_tenth.n_plus == doctest::Approx(oracle::norm_plus(0.1)).epsilon(1e-12));

  CHECK_THROWS_AS(normalization_factors(-0.1), std::invalid_argument);
}

TEST_CASE("normalization factors sum to 4 within one ulp") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const double mu = 10.0 * rng.uniform();
    const auto n = normalization_factors(mu);
    CHECK(std::abs(n.n_plus + n.n_minus - 4.0) <= 4.0 * std::numeric_limits<double>::epsilon());
    CHECK(n.n_plus > 2.0);
    CHECK(n.n_plus <= 4.0);
    CHECK(n.n_minus >= 0.0);
    CHECK(n.n_minus < 2.0);
  }
}

TEST_CASE("epsilon budget default partition") {
  const auto budget = epsilon_budget(1e-10, 1e-15);
  CHECK(budget.eps_smooth == doctest::Approx(1e-11).epsilon(1e-14));
  CHECK(budget.eps0 == doctest::Approx(1e-11).epsilon(1e-14));
  CHECK(budget.eps1 == doctest::Approx(1e-11).epsilon(1e-14));
  CHECK(budget.eps2 == doctest::Approx(1e-11).epsilon(1e-14));
  const double sum = (2.0 * budget.eps_smooth + budget.eps0) + 6.0 * budget.eps1 + budget.eps2;
  CHECK(sum == budget.eps_sec);
  CHECK(budget.eps_sec == 1e-10);

  const auto coarse = epsilon_budget(1.0, 0.5);
  CHECK(coarse.eps_smooth == doctest::Approx(0.1));

  const double two_pow = std::pow(2.0, -27);
  const auto dps_style = epsilon_budget(two_pow, two_pow);
  CHECK(dps_style.eps1 == doctest::Approx(two_pow / 10.0).epsilon(1e-14));
  const double sum2 =
      (2.0 * dps_style.eps_smooth + dps_style.eps0) + 6.0 * dps_style.eps1 + dps_style.eps2;
  CHECK(sum2 == two_pow);
}

TEST_CASE("epsilon budget sum identity is exact for random inputs") {
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    const double eps_sec = std::pow(10.0, -15.0 * rng.uniform() - 0.1);
    const auto budget = epsilon_budget(eps_sec, 1e-15);
    const double sum =
        (2.0 * budget.eps_smooth + budget.eps0) + 6.0 * budget.eps1 + budget.eps2;
    CHECK(sum == eps_sec);
  }
}

TEST_CASE("epsilon budget rejects bad inputs") {
  CHECK_THROWS_AS(epsilon_budget(0.0, 1e-15), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_budget(-1e-10, 1e-15), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_budget(1e-10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_budget(1.5, 1e-15), std::invalid_argument);
}

TEST_CASE("custom epsilon partition derives its total") {
  const auto budget = epsilon_budget_custom(1e-15, 1e-11, 2e-11, 5e-12, 1e-11);
  const double sum =
      (2.0 * budget.eps_smooth + budget.eps0) + 6.0 * budget.eps1 + budget.eps2;
  CHECK(sum == budget.eps_sec);
}

TEST_CASE("validate_params accepts the reference settings") {
  CHECK_NOTHROW(validate_params(reference_defaults()));
}

TEST_CASE("validate_params names the violated invariant") {
  auto p = reference_defaults();
  p.p_d1 = 0.6;
  p.p_d2 = 0.5;
  CHECK_THROWS_WITH_AS(validate_params(p), "params: decoy probabilities sum >= 1",
                       std::invalid_argument);

  p = reference_defaults();
  p.t_b = 1.0;
  CHECK_THROWS_WITH_AS(validate_params(p), "params: t_B must lie strictly inside (0,1)",
                       std::invalid_argument);

  p = reference_defaults();
  p.mu = 0.0;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);

  p = reference_defaults();
  p.e_mis = 0.6;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);

  p = reference_defaults();
  p.f_ec = 0.99;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);

  p = reference_defaults();
  p.detector.eta_det = 0.0;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);

  p = reference_defaults();
  p.n_rounds = 0;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);

  p = reference_defaults();
  p.active_route_prob = 1.5;
  CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
}

TEST_CASE("derived signal probability") {
  auto p = reference_defaults();
  CHECK(p.p_z() == doctest::Approx(0.45));
  p.active_route_prob = 0.7;
  CHECK(p.route_prob() == 0.7);
  p.active_route_prob.reset();
  CHECK(p.route_prob() == p.t_b);
}

TEST_SUITE_END();
