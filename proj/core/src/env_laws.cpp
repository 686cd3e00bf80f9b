#include "bprelab/env_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bprelab/numeric.hpp"

namespace bprelab::env_laws {

namespace {

constexpr double kPi = std::numbers::pi;

// Smallest positive value used to clamp degenerate quantiles (e.g. c_1 of a
// bounded law, where the defining set reaches all the way down to zero).
constexpr double kPositiveFloor = std::numeric_limits<double>::min();

// min{x : f(x) <= target} for a nonincreasing f, by bracketing and bisection.
template <typename F>
double invert_nonincreasing(F&& f, double target, double lo, double hi,
                            double rel_tol = 1e-9) {
  while (f(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("tail inversion failed to bracket");
  }
  while (hi - lo > rel_tol * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

bool StabilityParams::admissible() const noexcept {
  const double ab = std::abs(beta);
  if (alpha > 0.0 && alpha < 1.0) return ab < 1.0;
  if (alpha > 1.0 && alpha < 2.0) return ab <= 1.0;
  if (alpha == 1.0 || alpha == 2.0) return beta == 0.0;
  return false;
}

bool StabilityParams::condition_a() const noexcept {
  return admissible() && alpha < 2.0 && std::abs(beta) < 1.0;
}

double positivity_index_rho(const StabilityParams& params) {
  if (!params.admissible()) {
    throw std::invalid_argument("positivity_index_rho: (alpha, beta) not admissible");
  }
  if (params.alpha == 1.0) return 0.5;
  const double rho =
      0.5 + std::atan(params.beta * std::tan(kPi * params.alpha / 2.0)) /
                (kPi * params.alpha);
  return rho;
}

TwoSidedPareto TwoSidedPareto::with_zero_mean(double alpha, double p, double x_min) {
  TwoSidedPareto law{alpha, p, x_min, 0.0};
  if (alpha > 1.0) {
    // E|Y| = alpha x_min / (alpha - 1), sign mean p - q.
    law.centering = (2.0 * p - 1.0) * alpha * x_min / (alpha - 1.0);
  }
  return law;
}

StableCalibration::StableCalibration(std::vector<double> sorted_sample)
    : sample_(std::move(sorted_sample)) {
  if (sample_.size() < 2) {
    throw std::invalid_argument("StableCalibration: sample too small");
  }
  if (!std::is_sorted(sample_.begin(), sample_.end())) {
    std::sort(sample_.begin(), sample_.end());
  }
}

double StableCalibration::survival(double x) const {
  const auto it = std::upper_bound(sample_.begin(), sample_.end(), x);
  return static_cast<double>(sample_.end() - it) / static_cast<double>(sample_.size());
}

double StableCalibration::lower_tail(double x) const {
  const auto it = std::lower_bound(sample_.begin(), sample_.end(), x);
  return static_cast<double>(it - sample_.begin()) / static_cast<double>(sample_.size());
}

double StableCalibration::quantile(double u) const {
  if (u <= 0.0) return sample_.front();
  if (u >= 1.0) return sample_.back();
  const auto idx = static_cast<std::size_t>(u * static_cast<double>(sample_.size()));
  return sample_[std::min(idx, sample_.size() - 1)];
}

namespace {

double sample_stable_standard(const StabilityParams& params, Rng& rng) {
  // Polar/exponential transformation. V uniform on (-pi/2, pi/2), W standard
  // exponential; the returned variate has characteristic function
  // exp{-|t|^alpha (1 - i beta sgn(t) tan(pi alpha/2))}.
  const double alpha = params.alpha;
  const double beta = params.beta;
  const double v = kPi * (uniform01(rng) - 0.5);
  const double w = -std::log(uniform_pos(rng));
  if (alpha == 1.0) {
    // beta = 0 in the admissible set: standard Cauchy.
    return std::tan(v);
  }
  const double bt = beta * std::tan(kPi * alpha / 2.0);
  const double b = std::atan(bt) / alpha;
  const double s = std::pow(1.0 + bt * bt, 0.5 / alpha);
  const double num = std::sin(alpha * (v + b));
  const double den = std::pow(std::cos(v), 1.0 / alpha);
  const double tail = std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  return s * (num / den) * tail;
}

}  // namespace

double sample_increment(const EnvironmentLaw& law, Rng& rng) {
  return std::visit(
      [&rng](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, TwoPoint>) {
          return uniform01(rng) < l.w ? l.a : -l.a;
        } else if constexpr (std::is_same_v<T, TwoSidedPareto>) {
          const double mag = l.x_min * std::pow(uniform_pos(rng), -1.0 / l.alpha);
          const double sign = uniform01(rng) < l.p ? 1.0 : -1.0;
          return sign * mag - l.centering;
        } else if constexpr (std::is_same_v<T, BoundedUniform>) {
          return l.lo + (l.hi - l.lo) * uniform01(rng);
        } else {
          const double std_draw = sample_stable_standard(l.params, rng);
          return std::pow(l.params.scale, 1.0 / l.params.alpha) * std_draw;
        }
      },
      law);
}

double survival_function(const EnvironmentLaw& law, double x) {
  return std::visit(
      [x](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, TwoPoint>) {
          if (x < -l.a) return 1.0;
          if (x < l.a) return l.w;
          return 0.0;
        } else if constexpr (std::is_same_v<T, TwoSidedPareto>) {
          const double t = x + l.centering;
          if (t >= l.x_min) return l.p * std::pow(t / l.x_min, -l.alpha);
          if (t >= -l.x_min) return l.p;
          return 1.0 - l.q() * std::pow(-t / l.x_min, -l.alpha);
        } else if constexpr (std::is_same_v<T, BoundedUniform>) {
          if (x < l.lo) return 1.0;
          if (x >= l.hi) return 0.0;
          return (l.hi - x) / (l.hi - l.lo);
        } else {
          if (!l.calibration) {
            throw std::runtime_error(
                "survival_function: ExactStable requires a calibration table");
          }
          return l.calibration->survival(x);
        }
      },
      law);
}

double lower_tail(const EnvironmentLaw& law, double x) {
  return std::visit(
      [x](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, TwoPoint>) {
          if (x <= -l.a) return 0.0;
          if (x <= l.a) return 1.0 - l.w;
          return 1.0;
        } else if constexpr (std::is_same_v<T, TwoSidedPareto>) {
          const double t = x + l.centering;
          if (t <= -l.x_min) return l.q() * std::pow(-t / l.x_min, -l.alpha);
          if (t <= l.x_min) return l.q();
          return 1.0 - l.p * std::pow(t / l.x_min, -l.alpha);
        } else if constexpr (std::is_same_v<T, BoundedUniform>) {
          if (x <= l.lo) return 0.0;
          if (x > l.hi) return 1.0;
          return (x - l.lo) / (l.hi - l.lo);
        } else {
          if (!l.calibration) {
            throw std::runtime_error(
                "lower_tail: ExactStable requires a calibration table");
          }
          return l.calibration->lower_tail(x);
        }
      },
      law);
}

double two_sided_survival(const EnvironmentLaw& law, double x) {
  return survival_function(law, x) + lower_tail(law, -x);
}

double scaling_sequence_cn(const EnvironmentLaw& law, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("scaling_sequence_cn: n >= 1 required");
  const double target = 1.0 / static_cast<double>(n);
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, TwoPoint>) {
          // Survival drops to zero at the atom +a; the plateau below it has
          // mass w, so the tail edge is the answer for every n with w n > 1
          // and remains the clamp otherwise.
          return l.a;
        } else if constexpr (std::is_same_v<T, TwoSidedPareto>) {
          const double pn = l.p * static_cast<double>(n);
          const double edge = l.x_min - l.centering;
          if (pn <= 1.0) return std::max(edge, kPositiveFloor);
          return std::max(l.x_min * std::pow(pn, 1.0 / l.alpha) - l.centering,
                          std::max(edge, kPositiveFloor));
        } else if constexpr (std::is_same_v<T, BoundedUniform>) {
          const double x = l.hi - (l.hi - l.lo) * target;
          return std::max(x, kPositiveFloor);
        } else {
          const EnvironmentLaw self = l;
          const double x = invert_nonincreasing(
              [&](double y) { return survival_function(self, y); }, target,
              0.0, 1.0);
          return std::max(x, kPositiveFloor);
        }
      },
      law);
}

double stable_norming_cn(const EnvironmentLaw& law, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("stable_norming_cn: n >= 1 required");
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, TwoSidedPareto>) {
          const double target =
              (2.0 - l.alpha) / (l.alpha * static_cast<double>(n));
          if (l.centering == 0.0) {
            // P(|X| > x) = (x / x_min)^-alpha exactly.
            const double x = l.x_min * std::pow(target, -1.0 / l.alpha);
            return std::max(x, l.x_min);
          }
          const EnvironmentLaw self = l;
          return invert_nonincreasing(
              [&](double y) { return two_sided_survival(self, y); }, target,
              0.0, l.x_min);
        } else if constexpr (std::is_same_v<T, ExactStable>) {
          const double target =
              (2.0 - l.params.alpha) / (l.params.alpha * static_cast<double>(n));
          const EnvironmentLaw self = l;
          return invert_nonincreasing(
              [&](double y) { return two_sided_survival(self, y); }, target,
              0.0, 1.0);
        } else {
          throw std::domain_error(
              "stable_norming_cn: law has no heavy-tail profile");
        }
      },
      law);
}

TailProfile tail_profile(const EnvironmentLaw& law,
                         const std::vector<std::int64_t>& n_grid) {
  TailProfile profile;
  if (const auto* pareto = std::get_if<TwoSidedPareto>(&law)) {
    profile.alpha = pareto->alpha;
    profile.p = pareto->p;
    profile.q = pareto->q();
    profile.beta = pareto->p - pareto->q();
    profile.rho = positivity_index_rho({pareto->alpha, profile.beta, 1.0});
  } else if (const auto* stable = std::get_if<ExactStable>(&law)) {
    profile.alpha = stable->params.alpha;
    profile.beta = stable->params.beta;
    profile.p = 0.5 * (1.0 + stable->params.beta);
    profile.q = 1.0 - profile.p;
    profile.rho = positivity_index_rho(stable->params);
  } else {
    throw std::domain_error("tail_profile: law has no heavy-tail profile");
  }
  for (const std::int64_t n : n_grid) {
    profile.cn_table[n] = stable_norming_cn(law, n);
  }
  return profile;
}

std::shared_ptr<const StableCalibration> calibrate_stable(
    const StabilityParams& params, std::int64_t n_draws, Rng& rng) {
  if (!params.admissible()) {
    throw std::invalid_argument("calibrate_stable: parameters not admissible");
  }
  std::vector<double> sample;
  sample.reserve(static_cast<std::size_t>(n_draws));
  const EnvironmentLaw law = ExactStable{params, nullptr};
  for (std::int64_t i = 0; i < n_draws; ++i) {
    sample.push_back(sample_increment(law, rng));
  }
  std::sort(sample.begin(), sample.end());
  return std::make_shared<const StableCalibration>(std::move(sample));
}

}  // namespace bprelab::env_laws
