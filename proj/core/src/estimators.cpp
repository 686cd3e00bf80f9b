#include "bprelab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bprelab::estimators {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

McEstimate make_estimate(double mean, double stderr_, std::int64_t n) {
  McEstimate e;
  e.mean = mean;
  e.stderr_ = stderr_;
  e.n_samples = n;
  e.ci_low = mean - kZ95 * stderr_;
  e.ci_high = mean + kZ95 * stderr_;
  return e;
}

McEstimate mean_ci(std::span<const double> samples) {
  const auto n = static_cast<std::int64_t>(samples.size());
  if (n < 2) throw std::invalid_argument("mean_ci: need at least 2 samples");
  double sum = 0.0;
  for (const double x : samples) sum += x;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const double x : samples) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(n - 1);
  return make_estimate(mean, std::sqrt(var / static_cast<double>(n)), n);
}

McEstimate mean_ci_from_moments(double sum, double sum_sq, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("mean_ci_from_moments: need n >= 2");
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  double var = (sum_sq - dn * mean * mean) / (dn - 1.0);
  if (var < 0.0) var = 0.0;  // roundoff on near-constant samples
  return make_estimate(mean, std::sqrt(var / dn), n);
}

McEstimate pool_estimates(std::span<const McEstimate> parts) {
  if (parts.empty()) throw std::invalid_argument("pool_estimates: no parts");
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;
  for (const auto& e : parts) {
    const double dn = static_cast<double>(e.n_samples);
    const double part_sum = e.mean * dn;
    const double part_var = e.stderr_ * e.stderr_ * dn;  // s^2 of the sample
    sum += part_sum;
    sum_sq += part_var * (dn - 1.0) + part_sum * part_sum / dn;
    n += e.n_samples;
  }
  return mean_ci_from_moments(sum, sum_sq, n);
}

namespace {

McEstimate ratio_delta(double mn, double vn, double md, double vd, double cov,
                       std::int64_t n) {
  const double sd_den = std::sqrt(vd);
  if (std::abs(md) <= 5.0 * sd_den) {
    throw std::invalid_argument("ratio_ci: denominator not separated from 0 (need >5 sigma)");
  }
  const double r = mn / md;
  double var_r;
  if (mn == 0.0) {
    var_r = vn / (md * md);
  } else {
    const double rel = vn / (mn * mn) + vd / (md * md) - 2.0 * cov / (mn * md);
    var_r = r * r * rel;
  }
  if (!(var_r >= 0.0)) var_r = 0.0;
  return make_estimate(r, std::sqrt(var_r), n);
}

}  // namespace

McEstimate ratio_ci(std::span<const double> num, std::span<const double> den,
                    bool paired) {
  if (num.size() < 2 || den.size() < 2) {
    throw std::invalid_argument("ratio_ci: need at least 2 samples on each side");
  }
  if (paired && num.size() != den.size()) {
    throw std::invalid_argument("ratio_ci: paired samples must have equal length");
  }
  const McEstimate en = mean_ci(num);
  const McEstimate ed = mean_ci(den);
  double cov = 0.0;
  if (paired) {
    const auto n = static_cast<double>(num.size());
    double s = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
      s += (num[i] - en.mean) * (den[i] - ed.mean);
    }
    cov = s / (n - 1.0) / n;  // covariance of the two sample means
  }
  const auto n_eff = static_cast<std::int64_t>(std::min(num.size(), den.size()));
  return ratio_delta(en.mean, en.stderr_ * en.stderr_, ed.mean,
                     ed.stderr_ * ed.stderr_, cov, n_eff);
}

McEstimate ratio_from_estimates(const McEstimate& num, const McEstimate& den,
                                double mean_covariance) {
  return ratio_delta(num.mean, num.stderr_ * num.stderr_, den.mean,
                     den.stderr_ * den.stderr_, mean_covariance,
                     std::min(num.n_samples, den.n_samples));
}

double effective_sample_size(std::span<const WeightedSample> samples) {
  double sw = 0.0;
  double sw2 = 0.0;
  for (const auto& s : samples) {
    sw += s.weight;
    sw2 += s.weight * s.weight;
  }
  if (sw2 <= 0.0) return 0.0;
  return sw * sw / sw2;
}

SelfNormalized self_normalized(std::span<const WeightedSample> samples,
                               const std::function<double(double)>& f) {
  if (samples.empty()) throw std::invalid_argument("self_normalized: empty input");
  double sw = 0.0;
  double swf = 0.0;
  for (const auto& s : samples) {
    if (s.weight < 0.0) throw std::invalid_argument("self_normalized: negative weight");
    sw += s.weight;
    swf += s.weight * f(s.value);
  }
  if (sw <= 0.0) throw std::invalid_argument("self_normalized: all weights are zero");
  const double r = swf / sw;
  // Delta-method variance of the normalized estimate:
  // sum w_i^2 (f_i - r)^2 / (sum w)^2.
  double s2 = 0.0;
  for (const auto& s : samples) {
    const double d = f(s.value) - r;
    s2 += s.weight * s.weight * d * d;
  }
  SelfNormalized out;
  out.estimate = make_estimate(r, std::sqrt(s2) / sw,
                               static_cast<std::int64_t>(samples.size()));
  out.ess = effective_sample_size(samples);
  return out;
}

namespace {

KsResult weighted_ks(std::vector<WeightedSample> a, std::vector<WeightedSample> b,
                     double threshold) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_two_sample: empty sample");
  }
  const auto by_value = [](const WeightedSample& x, const WeightedSample& y) {
    return x.value < y.value;
  };
  std::sort(a.begin(), a.end(), by_value);
  std::sort(b.begin(), b.end(), by_value);
  double wa = 0.0;
  double wb = 0.0;
  for (const auto& s : a) wa += s.weight;
  for (const auto& s : b) wb += s.weight;
  if (wa <= 0.0 || wb <= 0.0) {
    throw std::invalid_argument("ks_two_sample: total weight is zero");
  }
  double ca = 0.0;
  double cb = 0.0;
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j >= b.size() || (i < a.size() && a[i].value <= b[j].value)) {
      v = a[i].value;
    } else {
      v = b[j].value;
    }
    // Advance both CDFs past all points equal to v before comparing, so ties
    // across samples do not create spurious gaps.
    while (i < a.size() && a[i].value == v) ca += a[i++].weight;
    while (j < b.size() && b[j].value == v) cb += b[j++].weight;
    d = std::max(d, std::abs(ca / wa - cb / wb));
  }
  KsResult res;
  res.statistic = d;
  res.threshold = threshold;
  res.pass = d < threshold;
  return res;
}

}  // namespace

KsResult ks_two_sample(std::span<const WeightedSample> a,
                       std::span<const WeightedSample> b, double threshold) {
  return weighted_ks(std::vector<WeightedSample>(a.begin(), a.end()),
                     std::vector<WeightedSample>(b.begin(), b.end()), threshold);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double threshold) {
  std::vector<WeightedSample> wa;
  std::vector<WeightedSample> wb;
  wa.reserve(a.size());
  wb.reserve(b.size());
  for (const double x : a) wa.push_back({x, 1.0});
  for (const double x : b) wb.push_back({x, 1.0});
  return weighted_ks(std::move(wa), std::move(wb), threshold);
}

SlopeFit powerlaw_slope_fit(std::span<const SlopePoint> points) {
  if (points.size() < 4) {
    throw std::invalid_argument("powerlaw_slope_fit: need at least 4 points");
  }
  SlopeFit fit;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  for (const auto& p : points) {
    if (!(p.estimate > 3.0 * p.stderr_) || p.estimate <= 0.0 || p.n <= 0.0) {
      fit.excluded_n.push_back(p.n);
      continue;
    }
    x.push_back(std::log(p.n));
    y.push_back(std::log(p.estimate));
    // Relative error maps to additive error on the log scale.
    const double sigma = std::max(p.stderr_ / p.estimate, 1e-12);
    w.push_back(1.0 / (sigma * sigma));
  }
  if (x.size() < 4) {
    throw std::invalid_argument("powerlaw_slope_fit: fewer than 4 usable points");
  }
  double sw = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.stderr_ = std::sqrt(1.0 / sxx);
  fit.ci_low = fit.slope - kZ95 * fit.stderr_;
  fit.ci_high = fit.slope + kZ95 * fit.stderr_;
  return fit;
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be positive");
  WilsonInterval wi;
  wi.successes = successes;
  wi.trials = trials;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  wi.estimate = p;
  wi.stderr_ = std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n);
  wi.ci_low = std::max(0.0, center - half);
  wi.ci_high = std::min(1.0, center + half);
  return wi;
}

}  // namespace bprelab::estimators
