#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bprelab::estimators {

/// Point estimate with normal-approximation uncertainty.
struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t n_samples = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Builds the 95% normal CI around mean +- 1.96 stderr.
McEstimate make_estimate(double mean, double stderr_, std::int64_t n);

/// Sample mean, stderr = s/sqrt(n) with the n-1 variance, normal 95% CI.
/// Throws std::invalid_argument for n < 2.
McEstimate mean_ci(std::span<const double> samples);

/// Streaming variant from sufficient statistics (sum, sum of squares, n).
McEstimate mean_ci_from_moments(double sum, double sum_sq, std::int64_t n);

/// Exact pooling of estimates produced from disjoint sample streams (the
/// underlying moments are reconstructed, so the result equals a single pass
/// over the union).
McEstimate pool_estimates(std::span<const McEstimate> parts);

/// Delta-method CI for mean(num)/mean(den). With paired=true the samples are
/// matched by index and the covariance term is included. Refuses denominators
/// whose mean is within 5 stderr of zero.
McEstimate ratio_ci(std::span<const double> num, std::span<const double> den,
                    bool paired);

/// Delta method on two already-summarized estimates (covariance of the two
/// means passed explicitly, zero for independent runs).
McEstimate ratio_from_estimates(const McEstimate& num, const McEstimate& den,
                                double mean_covariance = 0.0);

struct WeightedSample {
  double value = 0.0;
  double weight = 0.0;
};

struct SelfNormalized {
  McEstimate estimate;
  double ess = 0.0;  // (sum w)^2 / sum w^2
};

/// Self-normalized importance estimate sum(w f(v)) / sum(w) with the
/// delta-method stderr and the effective sample size of the weights.
/// Throws std::invalid_argument if all weights vanish.
SelfNormalized self_normalized(std::span<const WeightedSample> samples,
                               const std::function<double(double)>& f);

double effective_sample_size(std::span<const WeightedSample> samples);

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Sup-distance between the two weighted empirical CDFs. Plain samples are
/// the unit-weight special case. No asymptotic p-value is attached; the
/// caller supplies the pass threshold.
KsResult ks_two_sample(std::span<const WeightedSample> a,
                       std::span<const WeightedSample> b, double threshold);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double threshold);

struct SlopePoint {
  double n = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double intercept = 0.0;
  std::vector<double> excluded_n;  // points with estimate <= 3 stderr
};

/// Weighted least squares of log(estimate) on log(n). Underpowered points
/// (estimate <= 3 stderr) are excluded and reported; fewer than 4 surviving
/// points is an error.
SlopeFit powerlaw_slope_fit(std::span<const SlopePoint> points);

struct WilsonInterval {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t successes = 0;
  std::int64_t trials = 0;
};

/// Wilson score interval for a Bernoulli proportion at z = 1.96.
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials);

}  // namespace bprelab::estimators
