#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "bprelab/rng.hpp"

namespace bprelab::env_laws {

/// Parameters (alpha, beta, scale) of a stable law with characteristic
/// function exp{-scale * |t|^alpha * (1 - i beta sgn(t) tan(pi alpha / 2))}.
struct StabilityParams {
  double alpha = 2.0;
  double beta = 0.0;
  double scale = 1.0;

  /// Admissible parameter set: {0<a<1, |b|<1} u {1<a<2, |b|<=1}
  /// u {a=1, b=0} u {a=2, b=0}.
  bool admissible() const noexcept;
  /// Strictly heavy-tailed two-sided regime: alpha < 2 and |beta| < 1.
  bool condition_a() const noexcept;
};

/// Limit of P(S_n > 0) for a walk with increments attracted to the stable
/// law; 1/2 at alpha = 1, otherwise 1/2 + arctan(beta tan(pi alpha/2))/(pi alpha).
/// Throws std::invalid_argument outside the admissible set.
double positivity_index_rho(const StabilityParams& params);

/// X = +a with probability w, -a with probability 1 - w. Finite variance;
/// used for exact enumeration oracles, not heavy-tail experiments.
struct TwoPoint {
  double a = 1.0;
  double w = 0.5;
};

/// |X + centering| is Pareto(alpha, x_min), the sign is + with probability p.
/// Pure power tails: P(X + centering > x) = p (x/x_min)^-alpha for x >= x_min.
/// centering makes the mean zero when alpha > 1; for alpha <= 1 the mean does
/// not exist and no centering is applied.
struct TwoSidedPareto {
  double alpha = 1.5;
  double p = 0.5;
  double x_min = 1.0;
  double centering = 0.0;

  double q() const { return 1.0 - p; }
  /// Centering computed in closed form from the uncentered mean (alpha > 1).
  static TwoSidedPareto with_zero_mean(double alpha, double p, double x_min);
};

/// Uniform on [lo, hi]; the finite-variance contrast law.
struct BoundedUniform {
  double lo = -1.0;
  double hi = 1.0;

  double sigma2() const { return (hi - lo) * (hi - lo) / 12.0; }
};

/// Empirical survival table built from a calibration sample; the only way to
/// evaluate tail probabilities of an exactly stable variate.
class StableCalibration {
 public:
  explicit StableCalibration(std::vector<double> sorted_sample);

  double survival(double x) const;    // P(X > x)
  double lower_tail(double x) const;  // P(X < x)
  double quantile(double u) const;    // inf{x : P(X <= x) >= u}
  std::int64_t size() const { return static_cast<std::int64_t>(sample_.size()); }

 private:
  std::vector<double> sample_;
};

/// Exactly stable increments, sampled by the polar/exponential transformation
/// method. Tail evaluation requires an attached calibration table.
struct ExactStable {
  StabilityParams params;
  std::shared_ptr<const StableCalibration> calibration;
};

using EnvironmentLaw = std::variant<TwoPoint, TwoSidedPareto, BoundedUniform, ExactStable>;

/// One i.i.d. draw of the increment X.
double sample_increment(const EnvironmentLaw& law, Rng& rng);

/// P(X > x). Closed form for all variants except ExactStable, which needs a
/// calibration table (throws std::runtime_error without one).
double survival_function(const EnvironmentLaw& law, double x);

/// P(X < x).
double lower_tail(const EnvironmentLaw& law, double x);

/// P(|X| > x), x >= 0.
double two_sided_survival(const EnvironmentLaw& law, double x);

/// Quantile scaling sequence: min{x > 0 : P(X > x) <= 1/n}, by closed-form
/// inversion where available and monotone bisection otherwise (relative
/// tolerance 1e-9). Clamped at the tail edge of the law, so e.g. the
/// two-sided Pareto returns x_min - centering once 1/n >= p.
double scaling_sequence_cn(const EnvironmentLaw& law, std::int64_t n);

/// Norming sequence for stable convergence: min{x > 0 : P(|X| > x) <=
/// (2-alpha)/(alpha n)}. This is the normalization under which
/// n P(X < -c_n) -> q(2-alpha)/alpha, so limit constants of scaled-walk
/// functionals (meander moments, overshoot ratios) take their standard
/// values. Only defined for laws with a heavy-tail profile (alpha < 2);
/// throws std::domain_error otherwise.
double stable_norming_cn(const EnvironmentLaw& law, std::int64_t n);

/// Tail metadata of a heavy-tailed law.
struct TailProfile {
  double alpha = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double q = 0.0;
  double rho = 0.0;
  std::map<std::int64_t, double> cn_table;  // n -> stable_norming_cn(n)
};

/// Throws std::domain_error for laws without a stable profile (TwoPoint,
/// BoundedUniform).
TailProfile tail_profile(const EnvironmentLaw& law,
                         const std::vector<std::int64_t>& n_grid = {});

/// Draws n_draws samples and builds the empirical survival table.
std::shared_ptr<const StableCalibration> calibrate_stable(
    const StabilityParams& params, std::int64_t n_draws, Rng& rng);

}  // namespace bprelab::env_laws
