#include "bprelab/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bprelab/rng.hpp"
#include "doctest.h"

using namespace bprelab;
using namespace bprelab::estimators;

TEST_CASE("mean_ci: constants and the two-sample case") {
  const std::vector<double> constant(10, 3.25);
  const auto c = mean_ci(constant);
  CHECK(c.mean == doctest::Approx(3.25));
  CHECK(c.stderr_ == doctest::Approx(0.0));
  CHECK(c.ci_low == doctest::Approx(3.25));

  // {0, 1}: sample sd (n-1 denominator) is 1/sqrt(2), so stderr s/sqrt(n) = 1/2.
  const std::vector<double> pair{0.0, 1.0};
  const auto e = mean_ci(pair);
  CHECK(e.mean == doctest::Approx(0.5));
  CHECK(e.stderr_ == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(e.ci_low <= e.mean);
  CHECK(e.ci_high >= e.mean);

  CHECK_THROWS_AS(mean_ci(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("mean_ci: width shrinks like 1/sqrt(n)") {
  Rng rng = derive_rng(11, 1);
  const auto width = [&rng](std::int64_t n) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) xs.push_back(uniform01(rng));
    const auto e = mean_ci(xs);
    return e.ci_high - e.ci_low;
  };
  const double w1 = width(40'000);
  const double w2 = width(160'000);
  CHECK(w1 / w2 == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("moment pooling reproduces the single-pass estimate") {
  Rng rng = derive_rng(11, 2);
  std::vector<double> all;
  for (int i = 0; i < 10'000; ++i) all.push_back(uniform01(rng) * 3.0 - 1.0);
  const auto whole = mean_ci(all);
  const std::span<const double> head(all.data(), 4000);
  const std::span<const double> tail(all.data() + 4000, all.size() - 4000);
  const McEstimate parts[] = {mean_ci(head), mean_ci(tail)};
  const auto pooled = pool_estimates(parts);
  CHECK(pooled.mean == doctest::Approx(whole.mean).epsilon(1e-12));
  CHECK(pooled.stderr_ == doctest::Approx(whole.stderr_).epsilon(1e-10));
}

TEST_CASE("ratio_ci: identical paired inputs give width zero") {
  std::vector<double> xs{10.4, 11.3, 12.2, 10.9, 11.7};
  const auto r = ratio_ci(xs, xs, true);
  CHECK(r.mean == doctest::Approx(1.0));
  CHECK(r.stderr_ < 1e-8);  // exact cancellation up to roundoff
}

TEST_CASE("ratio_ci: independent Bernoulli rates") {
  Rng rng = derive_rng(12, 1);
  std::vector<double> num;
  std::vector<double> den;
  for (int i = 0; i < 100'000; ++i) {
    num.push_back(uniform01(rng) < 0.2 ? 1.0 : 0.0);
    den.push_back(uniform01(rng) < 0.4 ? 1.0 : 0.0);
  }
  const auto r = ratio_ci(num, den, false);
  CHECK(r.ci_low <= 0.5);
  CHECK(r.ci_high >= 0.5);
  CHECK(r.mean == doctest::Approx(0.5).epsilon(0.05));

  // Paired and independent agree when there is no actual covariance.
  const auto rp = ratio_ci(num, den, true);
  CHECK(std::abs(rp.mean - r.mean) < 1e-12);
  CHECK(rp.ci_low <= 0.5);
  CHECK(rp.ci_high >= 0.5);
}

TEST_CASE("ratio_ci: refuses unstable denominators") {
  Rng rng = derive_rng(12, 2);
  std::vector<double> num;
  std::vector<double> den;
  for (int i = 0; i < 100; ++i) {
    num.push_back(1.0 + uniform01(rng));
    den.push_back(uniform01(rng) - 0.5);  // mean ~0, well under 5 sigma
  }
  CHECK_THROWS_AS(ratio_ci(num, den, false), std::invalid_argument);
}

TEST_CASE("self_normalized: exact cases") {
  const std::vector<WeightedSample> toy{{1.0, 3.0}, {2.0, 1.0}};
  const auto r = self_normalized(toy, [](double v) { return v; });
  CHECK(r.estimate.mean == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(r.ess == doctest::Approx(16.0 / 10.0).epsilon(1e-14));

  const auto constant = self_normalized(toy, [](double) { return 7.5; });
  CHECK(constant.estimate.mean == doctest::Approx(7.5));
  CHECK(constant.estimate.stderr_ == doctest::Approx(0.0));

  const std::vector<WeightedSample> zeros{{1.0, 0.0}, {2.0, 0.0}};
  CHECK_THROWS_AS(self_normalized(zeros, [](double v) { return v; }),
                  std::invalid_argument);
}

TEST_CASE("self_normalized: unit weights reduce to mean_ci") {
  Rng rng = derive_rng(13, 1);
  std::vector<double> xs;
  std::vector<WeightedSample> ws;
  for (int i = 0; i < 5000; ++i) {
    const double v = uniform01(rng);
    xs.push_back(v);
    ws.push_back({v, 1.0});
  }
  const auto plain = mean_ci(xs);
  const auto sn = self_normalized(ws, [](double v) { return v; });
  CHECK(sn.estimate.mean == doctest::Approx(plain.mean).epsilon(1e-12));
  CHECK(sn.estimate.stderr_ == doctest::Approx(plain.stderr_).epsilon(1e-3));
  CHECK(sn.ess == doctest::Approx(5000.0));
}

TEST_CASE("ks_two_sample: exact endpoints and symmetry") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  CHECK(ks_two_sample(a, a, 0.5).statistic == doctest::Approx(0.0));
  const std::vector<double> b{10.0, 11.0, 12.0};
  const auto d = ks_two_sample(a, b, 0.5);
  CHECK(d.statistic == doctest::Approx(1.0));
  CHECK_FALSE(d.pass);
  const std::vector<double> c{0.5, 2.5, 9.0};
  CHECK(ks_two_sample(a, c, 1.0).statistic ==
        doctest::Approx(ks_two_sample(c, a, 1.0).statistic));
}

TEST_CASE("ks_two_sample: same-law draws stay under 0.03") {
  int below = 0;
  const int reruns = 40;
  for (int rep = 0; rep < reruns; ++rep) {
    Rng rng = derive_rng(14, static_cast<std::uint64_t>(rep));
    std::vector<double> a;
    std::vector<double> b;
    for (int i = 0; i < 10'000; ++i) a.push_back(uniform01(rng));
    for (int i = 0; i < 10'000; ++i) b.push_back(uniform01(rng));
    if (ks_two_sample(a, b, 0.03).pass) ++below;
  }
  CHECK(below >= 38);  // 95% of reruns
}

TEST_CASE("weighted ks agrees with plain ks on unit weights") {
  Rng rng = derive_rng(14, 100);
  std::vector<double> a;
  std::vector<double> b;
  std::vector<WeightedSample> wa;
  std::vector<WeightedSample> wb;
  for (int i = 0; i < 3000; ++i) {
    const double x = uniform01(rng);
    const double y = uniform01(rng) * 1.1;
    a.push_back(x);
    b.push_back(y);
    wa.push_back({x, 1.0});
    wb.push_back({y, 1.0});
  }
  CHECK(ks_two_sample(wa, wb, 1.0).statistic ==
        doctest::Approx(ks_two_sample(a, b, 1.0).statistic).epsilon(1e-12));
}

TEST_CASE("powerlaw_slope_fit: exact, noisy, and contract paths") {
  std::vector<SlopePoint> exact;
  for (const double n : {50.0, 100.0, 200.0, 400.0, 800.0}) {
    exact.push_back({n, std::pow(n, -1.5), 0.0});
  }
  const auto fit = powerlaw_slope_fit(exact);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-10));

  Rng rng = derive_rng(15, 1);
  std::vector<SlopePoint> noisy;
  for (const double n : {50.0, 100.0, 200.0, 400.0, 800.0}) {
    const double p = 2.0 * std::pow(n, -1.5);
    const double noise = 1.0 + 0.01 * (2.0 * uniform01(rng) - 1.0);
    noisy.push_back({n, p * noise, 0.01 * p});
  }
  const auto nfit = powerlaw_slope_fit(noisy);
  CHECK(nfit.slope == doctest::Approx(-1.5).epsilon(0.034));  // +-0.05 absolute

  std::vector<SlopePoint> three(exact.begin(), exact.begin() + 3);
  CHECK_THROWS_AS(powerlaw_slope_fit(three), std::invalid_argument);

  // Underpowered points are excluded and reported.
  std::vector<SlopePoint> mixed = exact;
  mixed.push_back({1600.0, 1e-6, 1e-6});
  const auto mfit = powerlaw_slope_fit(mixed);
  CHECK(mfit.excluded_n.size() == 1);
  CHECK(mfit.excluded_n[0] == doctest::Approx(1600.0));
  CHECK(mfit.slope == doctest::Approx(-1.5).epsilon(1e-10));
}

TEST_CASE("wilson interval basics") {
  const auto wi = wilson_interval(250, 1000);
  CHECK(wi.estimate == doctest::Approx(0.25));
  CHECK(wi.ci_low > 0.2);
  CHECK(wi.ci_high < 0.3);
  CHECK(wi.ci_low <= wi.estimate);
  CHECK(wi.estimate <= wi.ci_high);
  const auto zero = wilson_interval(0, 100);
  CHECK(zero.estimate == doctest::Approx(0.0));
  CHECK(zero.ci_high > 0.0);
  CHECK_THROWS_AS(wilson_interval(1, 0), std::invalid_argument);
}
