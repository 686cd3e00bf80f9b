#pragma once

#include <cmath>
#include <limits>

namespace bprelab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow.
inline double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(1 - exp(-d)) for d >= 0; -inf at d = 0. Two-branch form keeps full
/// precision for both tiny and large d.
inline double log1mexp(double d) {
  if (d <= 0.0) return kNegInf;
  return d > 0.6931471805599453 ? std::log1p(-std::exp(-d))
                                : std::log(-std::expm1(-d));
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Sign tests for accumulated walk sums. Lattice increments (e.g. +-log 2)
// leave roundoff of order 1e-13 at exact-zero revisits, which would flip
// strict comparisons; the guard sits far above that noise and far below any
// genuine increment scale.
inline constexpr double kZeroGuard = 1e-11;

inline bool sum_strictly_negative(double s) { return s < -kZeroGuard; }
inline bool sum_nonpositive(double s) { return s <= kZeroGuard; }
inline bool sum_strictly_below(double s, double record) {
  return s < record - kZeroGuard;
}

}  // namespace bprelab
