#include "bprelab/env_laws.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bprelab/rng.hpp"
#include "doctest.h"

using namespace bprelab;
using namespace bprelab::env_laws;

TEST_CASE("positivity index: closed-form values") {
  CHECK(positivity_index_rho({1.0, 0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(positivity_index_rho({1.5, 0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-14));
  // alpha = 1.5, beta = 0.5: tan(3 pi / 4) = -1, so rho = 1/2 - atan(1/2)/(1.5 pi).
  CHECK(positivity_index_rho({1.5, 0.5, 1.0}) ==
        doctest::Approx(0.4016109215663778).epsilon(1e-12));
  CHECK(positivity_index_rho({1.5, 0.5, 1.0}) == doctest::Approx(0.40161).epsilon(1e-5));
  // Gaussian corner: rho = 1/2.
  CHECK(positivity_index_rho({2.0, 0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("positivity index: rejects inadmissible parameters") {
  CHECK_THROWS_AS(positivity_index_rho({0.5, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(positivity_index_rho({1.0, 0.3, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(positivity_index_rho({2.0, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(positivity_index_rho({2.3, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(positivity_index_rho({-1.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("positivity index: beta reflection") {
  for (const double alpha : {0.4, 0.8, 1.2, 1.5, 1.9}) {
    for (const double beta : {0.1, 0.3, 0.7, 0.9}) {
      const double plus = positivity_index_rho({alpha, beta, 1.0});
      const double minus = positivity_index_rho({alpha, -beta, 1.0});
      CHECK(plus + minus == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(plus > 0.0);
      CHECK(plus < 1.0);
    }
  }
}

TEST_CASE("condition A flag") {
  CHECK(StabilityParams{1.5, 0.5, 1.0}.condition_a());
  CHECK_FALSE(StabilityParams{2.0, 0.0, 1.0}.condition_a());
  CHECK_FALSE(StabilityParams{1.5, 1.0, 1.0}.condition_a());
  CHECK(StabilityParams{1.5, 1.0, 1.0}.admissible());
}

TEST_CASE("two-point law: support and survival atoms") {
  const EnvironmentLaw law = TwoPoint{std::log(2.0), 0.5};
  Rng rng = derive_rng(1, 2);
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_increment(law, rng);
    CHECK((x == std::log(2.0) || x == -std::log(2.0)));
  }
  const EnvironmentLaw atom = TwoPoint{1.0, 0.3};
  CHECK(survival_function(atom, 0.0) == doctest::Approx(0.3));
  CHECK(survival_function(atom, -1e9) == doctest::Approx(1.0));
  CHECK(survival_function(atom, 1.0) == doctest::Approx(0.0));
  CHECK(lower_tail(atom, 0.0) == doctest::Approx(0.7));
}

TEST_CASE("two-sided Pareto: closed-form survival") {
  const EnvironmentLaw law = TwoSidedPareto{1.5, 0.5, 1.0, 0.0};
  CHECK(survival_function(law, 4.0) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(survival_function(law, -1e12) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(survival_function(law, 0.5) == doctest::Approx(0.5));  // inner plateau
  CHECK(lower_tail(law, -4.0) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(two_sided_survival(law, 4.0) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("survival function is nonincreasing") {
  const std::vector<EnvironmentLaw> laws = {
      TwoPoint{0.7, 0.4}, TwoSidedPareto{1.5, 0.5, 1.0, 0.0},
      TwoSidedPareto::with_zero_mean(1.5, 0.7, 1.0), BoundedUniform{-1.0, 1.0}};
  Rng rng = derive_rng(3, 1);
  for (const auto& law : laws) {
    for (int i = 0; i < 200; ++i) {
      const double x = 10.0 * (uniform01(rng) - 0.5);
      const double y = x + 5.0 * uniform01(rng);
      CHECK(survival_function(law, x) >= survival_function(law, y) - 1e-15);
    }
  }
}

TEST_CASE("two-sided Pareto: empirical tail splits into p and q") {
  const double p = 0.3;
  const EnvironmentLaw law = TwoSidedPareto{1.5, p, 1.0, 0.0};
  const double x = scaling_sequence_cn(law, 200);
  Rng rng = derive_rng(4, 1);
  std::int64_t n_left = 0;
  std::int64_t n_both = 0;
  const std::int64_t n = 2'000'000;
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = sample_increment(law, rng);
    if (std::abs(v) > x) {
      ++n_both;
      if (v < -x) ++n_left;
    }
  }
  const double q_hat = static_cast<double>(n_left) / static_cast<double>(n_both);
  const double se = std::sqrt(0.7 * 0.3 / static_cast<double>(n_both));
  CHECK(std::abs(q_hat - 0.7) <= 3.0 * se);
}

TEST_CASE("two-sided Pareto: |X| tail matches the pure power law") {
  const EnvironmentLaw law = TwoSidedPareto{1.5, 0.5, 1.0, 0.0};
  Rng rng = derive_rng(4, 2);
  const double x = 5.0;
  const double expect = std::pow(x, -1.5);
  std::int64_t hits = 0;
  const std::int64_t n = 1'000'000;
  for (std::int64_t i = 0; i < n; ++i) {
    if (std::abs(sample_increment(law, rng)) > x) ++hits;
  }
  const double p_hat = static_cast<double>(hits) / static_cast<double>(n);
  const double se = std::sqrt(expect * (1.0 - expect) / static_cast<double>(n));
  CHECK(std::abs(p_hat - expect) <= 3.0 * se);
}

TEST_CASE("centered Pareto has mean zero when alpha > 1") {
  const auto law = TwoSidedPareto::with_zero_mean(1.5, 0.7, 1.0);
  // E|Y| = alpha/(alpha-1) x_min = 3, sign mean 0.4, so centering = 1.2.
  CHECK(law.centering == doctest::Approx(1.2).epsilon(1e-12));
  Rng rng = derive_rng(5, 1);
  double sum = 0.0;
  const std::int64_t n = 4'000'000;
  for (std::int64_t i = 0; i < n; ++i) sum += sample_increment(EnvironmentLaw{law}, rng);
  // alpha = 1.5 sums converge slowly; just pin the scale of the average.
  CHECK(std::abs(sum / static_cast<double>(n)) < 0.15);
}

TEST_CASE("bounded uniform: symmetric mean") {
  const EnvironmentLaw law = BoundedUniform{-1.0, 1.0};
  Rng rng = derive_rng(6, 1);
  double sum = 0.0;
  const std::int64_t n = 1'000'000;
  for (std::int64_t i = 0; i < n; ++i) sum += sample_increment(law, rng);
  CHECK(std::abs(sum / static_cast<double>(n)) < 0.01);
}

TEST_CASE("quantile scaling sequence: closed forms and monotonicity") {
  const EnvironmentLaw law = TwoSidedPareto{1.5, 0.5, 1.0, 0.0};
  const double c1000 = scaling_sequence_cn(law, 1000);
  CHECK(c1000 == doctest::Approx(std::pow(500.0, 2.0 / 3.0)).epsilon(1e-9));
  CHECK(c1000 == doctest::Approx(62.996).epsilon(1e-3));
  // The quantile property: survival is at most 1/n at c_n, above it just below.
  CHECK(survival_function(law, c1000) <= 1.0 / 1000.0 + 1e-15);
  CHECK(survival_function(law, c1000 * 0.999) > 1.0 / 1000.0);
  CHECK(scaling_sequence_cn(law, 2) == doctest::Approx(1.0));

  const std::vector<EnvironmentLaw> laws = {
      law, TwoPoint{1.0, 0.5}, BoundedUniform{-1.0, 1.0}};
  for (const auto& l : laws) {
    for (std::int64_t n = 4; n <= 4096; n *= 2) {
      CHECK(scaling_sequence_cn(l, 2 * n) >= scaling_sequence_cn(l, n));
    }
  }
  CHECK_THROWS_AS(scaling_sequence_cn(law, 0), std::invalid_argument);
}

TEST_CASE("stable norming: exact left-tail constant for pure power laws") {
  // n P(X < -c_n) = q (2 - alpha) / alpha exactly under this norming.
  for (const double p : {0.5, 0.7}) {
    const EnvironmentLaw law = TwoSidedPareto{1.5, p, 1.0, 0.0};
    for (const std::int64_t n : {100, 500, 2000, 100000}) {
      const double cn = stable_norming_cn(law, n);
      const double lhs = static_cast<double>(n) * lower_tail(law, -cn);
      const double rhs = (1.0 - p) * (2.0 - 1.5) / 1.5;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(stable_norming_cn(EnvironmentLaw{TwoPoint{1.0, 0.5}}, 10),
                  std::domain_error);
  CHECK_THROWS_AS(stable_norming_cn(EnvironmentLaw{BoundedUniform{}}, 10),
                  std::domain_error);
}

TEST_CASE("tail profile: constants and norming table") {
  const EnvironmentLaw law = TwoSidedPareto{1.5, 0.7, 1.0, 0.0};
  const auto profile = tail_profile(law, {10, 100, 1000});
  CHECK(profile.alpha == doctest::Approx(1.5));
  CHECK(profile.p == doctest::Approx(0.7));
  CHECK(profile.q == doctest::Approx(0.3));
  CHECK(profile.beta == doctest::Approx(0.4));
  CHECK(profile.rho == doctest::Approx(positivity_index_rho({1.5, 0.4, 1.0})));
  double prev = 0.0;
  for (const auto& [n, cn] : profile.cn_table) {
    CHECK(cn >= prev);
    prev = cn;
  }
  CHECK_THROWS_AS(tail_profile(EnvironmentLaw{TwoPoint{1.0, 0.5}}),
                  std::domain_error);
}

TEST_CASE("exactly stable law: calibration, sampling, and flagging") {
  const StabilityParams cauchy{1.0, 0.0, 1.0};
  const EnvironmentLaw uncalibrated = ExactStable{cauchy, nullptr};
  CHECK_THROWS_AS(survival_function(uncalibrated, 0.0), std::runtime_error);

  Rng rng = derive_rng(7, 1);
  const auto table = calibrate_stable(cauchy, 1'000'000, rng);
  const EnvironmentLaw law = ExactStable{cauchy, table};
  // Standard Cauchy quartile: P(X > 1) = 1/4, median 0.
  CHECK(survival_function(law, 0.0) == doctest::Approx(0.5).epsilon(0.01));
  CHECK(survival_function(law, 1.0) == doctest::Approx(0.25).epsilon(0.02));

  const StabilityParams sym{1.5, 0.0, 1.0};
  Rng rng2 = derive_rng(7, 2);
  const auto table2 = calibrate_stable(sym, 500'000, rng2);
  const EnvironmentLaw law2 = ExactStable{sym, table2};
  CHECK(survival_function(law2, 0.0) == doctest::Approx(0.5).epsilon(0.01));
  const auto profile = tail_profile(law2);
  CHECK(profile.rho == doctest::Approx(0.5));
  CHECK(stable_norming_cn(law2, 100) > 0.0);
}
