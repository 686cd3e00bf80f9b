#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "bprelab/env_laws.hpp"
#include "bprelab/numeric.hpp"
#include "bprelab/estimators.hpp"
#include "bprelab/random_walk.hpp"
#include "bprelab/rng.hpp"

namespace bprelab::bpre {

using env_laws::EnvironmentLaw;

/// Offspring numbers with generating function f(s) = e^-x / (1 + e^-x - s):
/// a geometric count on {0, 1, 2, ...} with P(0) = e^-x / (1 + e^-x) and
/// mean e^x.
struct GeometricOffspring {
  double x = 0.0;

  double mean() const;
  double p_zero() const;          // e^-x / (1 + e^-x)
  double pmf(std::int64_t k) const;
};

/// Explicit finite-support offspring law; probabilities must sum to 1 within
/// 1e-12. Used by oracle tests and the generic population simulator.
struct FiniteSupportOffspring {
  std::vector<double> probs;  // probs[k] = P(k offspring)

  double mean() const;
};

using OffspringLaw = std::variant<GeometricOffspring, FiniteSupportOffspring>;

/// An environment realization for the geometric family: the increment walk
/// together with the exponential functionals A_k = sum_{j<=k} e^-S_j, kept in
/// log space because S swings far beyond the range of double exponentials.
/// H_k = 1/A_k is the quenched survival probability P(Z_k > 0 | environment).
class GeometricEnvironment {
 public:
  explicit GeometricEnvironment(std::vector<double> increments);
  static GeometricEnvironment from_walk(const random_walk::WalkPath& path);

  int length() const { return static_cast<int>(increments_.size()); }
  double increment(int k) const { return increments_[static_cast<std::size_t>(k - 1)]; }
  double sum(int k) const { return sums_[static_cast<std::size_t>(k)]; }
  double log_a(int k) const { return log_a_[static_cast<std::size_t>(k)]; }
  double a(int k) const;  // exp(log_a); overflows to inf on extreme environments
  double h(int k) const;  // exp(-log_a)

  /// log sum_{j=m..k} e^-S_j for 0 <= m <= k <= length().
  double log_tail_sum(int m, int k) const;

 private:
  std::vector<double> increments_;
  std::vector<double> sums_;   // S_0..S_n
  std::vector<double> log_a_;  // log A_0..log A_n
};

/// P(Z_n > 0 | environment) = H_n.
double quenched_survival(const GeometricEnvironment& env, int n);
double log_quenched_survival(const GeometricEnvironment& env, int n);

/// P(T = n | environment) = H_{n-1} H_n e^-S_n.
double quenched_extinction_at(const GeometricEnvironment& env, int n);
double log_quenched_extinction_at(const GeometricEnvironment& env, int n);

/// P(Z_n = j | environment) = H_n^2 e^-S_n (1 - H_n e^-S_n)^{j-1}, j >= 1.
double quenched_population_pmf(const GeometricEnvironment& env, int n, double j);
double log_quenched_population_pmf(const GeometricEnvironment& env, int n, double j);

/// P(Z_{n-1} > a, T = n | environment), evaluated in closed form: with
/// g = e^-X_n / (1 + e^-X_n) and r = 1 - H_{n-1} e^-S_{n-1}, the geometric
/// series sums to H_{n-1}^2 e^-S_{n-1} g (r g)^a / (1 - r g). Reduces to
/// quenched_extinction_at for a = 0.
double quenched_joint_tail(const GeometricEnvironment& env, int n, double a);
double log_quenched_joint_tail(const GeometricEnvironment& env, int n, double a);

/// Draws log Z_m conditional on {T = n} in a fixed environment, 0 <= m <= n-1.
/// The conditional law is a geometric proposal thinned by an exact
/// acceptance ratio; the returned value is log Z (Z can exceed the double
/// integer range, its logarithm cannot).
double sample_log_population_given_extinction(const GeometricEnvironment& env,
                                              int n, int m, Rng& rng);

struct PopulationTrajectory {
  std::vector<std::uint64_t> sizes;       // Z_0 = 1, ..., last simulated size
  std::optional<int> extinction_time;     // T = min{k >= 1 : Z_k = 0}
  bool capped = false;                    // hit the population cap; excluded
                                          // from conditional statistics
};

inline constexpr std::uint64_t kDefaultPopulationCap = 1'000'000'000;

/// Total offspring of `parents` independent individuals. Geometric parents
/// use the negative-binomial representation (gamma-mixed Poisson) above a
/// small-count threshold, which keeps a generation O(1) regardless of size.
/// Returns cap + 1 when the draw certainly exceeds the cap.
std::uint64_t sample_offspring_total(const OffspringLaw& law,
                                     std::uint64_t parents, Rng& rng,
                                     std::uint64_t cap);

/// Forward simulation from Z_0 = 1 through the per-generation laws; stops at
/// extinction, at the end of the sequence, or at the cap.
PopulationTrajectory simulate_population(std::span<const OffspringLaw> generations,
                                         Rng& rng,
                                         std::uint64_t cap = kDefaultPopulationCap);

/// Fast path for the geometric family driven directly by environment
/// increments X_1..X_N (generation k reproduces through Geometric(X_{k+1})).
PopulationTrajectory simulate_population_geometric(
    std::span<const double> increments, Rng& rng,
    std::uint64_t cap = kDefaultPopulationCap);

/// zeta(b) = e^-2x sum_{k>=b} k^2 f_k for the geometric law, in closed form.
double zeta_geometric(double x, int b);
double zeta_finite_support(const FiniteSupportOffspring& law, int b);

struct ZetaDiagnostic {
  int b = 0;
  double delta = 0.0;
  double alpha = 0.0;
  estimators::McEstimate log_moment;  // empirical E (log+ zeta)^(alpha+delta)
  double max_sample = 0.0;
  std::vector<std::pair<double, double>> tail_table;  // threshold, P(zeta > threshold)
};

/// Samples zeta(b) across environment draws for the geometric family and
/// reports the moment entering the joint-size hypothesis.
ZetaDiagnostic zeta_and_moment_check(const EnvironmentLaw& law, int b,
                                     double delta, std::int64_t n_samples,
                                     Rng& rng);

/// Rao-Blackwellized estimate of P(T = n): the mean over environment draws of
/// the exact quenched extinction probability. No population is simulated.
estimators::McEstimate annealed_extinction_estimate(const EnvironmentLaw& law,
                                                    int n, std::int64_t n_envs,
                                                    Rng& rng);

/// Same device for P(T > n) = E[H_n].
estimators::McEstimate annealed_survival_estimate(const EnvironmentLaw& law,
                                                  int n, std::int64_t n_envs,
                                                  Rng& rng);

/// Exact P(T = n) for the two-point law by enumerating all 2^n environments.
/// Rejects n > 20.
double brute_force_extinction(const env_laws::TwoPoint& law, int n);
/// Exact E[H_n] over the same enumeration.
double brute_force_survival(const env_laws::TwoPoint& law, int n);

struct JointTailRow {
  double x = 0.0;            // threshold exponent (0 when thresholds are raw)
  double threshold = 0.0;    // a in P(Z_{n-1} > a, T = n)
  double estimate = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ess = 0.0;          // of the conditioned-stage weights
  bool low_ess = false;
  // Raw accumulators over contributing environments; kept so partial tables
  // from independent replica streams merge exactly.
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  double sum_w_w0 = 0.0;  // cross moment with the threshold-0 weight
  // Complement stratum: environments rejected by the conditioning event,
  // evaluated on a deterministic subsample so the estimator stays unbiased.
  double sum_rej_w = 0.0;
  double sum_rej_w2 = 0.0;
};

struct JointTailTable {
  int n = 0;
  bool two_stage = true;
  std::int64_t envs_used = 0;        // conditioned-stage environments
  std::int64_t attempts = 0;         // proposals in the conditioning stage
  std::int64_t rejected_evaluated = 0;  // completed complement environments
  double p_condition = 1.0;          // P(T- > n-1) estimate (1 for single stage)
  double p_condition_stderr = 0.0;
  double cn = 0.0;                   // norming used for x thresholds (0 if raw)
  std::vector<JointTailRow> rows;
};

struct JointTailOptions {
  bool two_stage = true;
  double min_ess = 100.0;
  // Every k-th rejected environment is completed and scored, so the rare
  // contribution from walks that dip early is measured instead of dropped.
  std::int64_t rejected_subsample = 16;
};

/// P(Z_{n-1} > a, T = n) for each threshold. Two-stage form: environments
/// are sampled conditioned on {T- > n-1} by rejection, each completed with a
/// free X_n and weighted by the exact quenched joint tail times the measured
/// conditioning probability; the rejected stratum enters through a completed
/// subsample, keeping the estimator unbiased. The unconditioned single-stage
/// variant serves as a cross-check. n_envs counts conditioned environments.
JointTailTable annealed_joint_tail_estimate(const EnvironmentLaw& law, int n,
                                            std::span<const double> thresholds,
                                            std::int64_t n_envs, Rng& rng,
                                            const JointTailOptions& options = {});

/// Spec'd x-grid form: thresholds a = ceil(e^{x c_n}) with the stable norming
/// sequence of the law.
JointTailTable annealed_joint_estimate(const EnvironmentLaw& law, int n,
                                       std::span<const double> x_list,
                                       std::int64_t n_envs, Rng& rng,
                                       const JointTailOptions& options = {});

/// Exact merge of tables produced by independent replica streams (same n,
/// thresholds, and staging).
JointTailTable merge_joint_tables(std::span<const JointTailTable> parts,
                                  const JointTailOptions& options = {});

struct EnvSweepResult {
  std::int64_t attempts = 0;
  std::int64_t used = 0;
};

/// Streams environments of length n, optionally conditioned on the walk
/// staying nonnegative through step n-1 (rejection on a strict descent, the
/// event {T- > n-1}); the last increment is always free. fn receives each
/// contributing environment.
template <typename Fn>
EnvSweepResult conditioned_environment_sweep(const EnvironmentLaw& law, int n,
                                             std::int64_t n_envs,
                                             bool condition_positive, Rng& rng,
                                             Fn&& fn) {
  EnvSweepResult result;
  std::vector<double> increments(static_cast<std::size_t>(n));
  while (result.used < n_envs) {
    ++result.attempts;
    double s = 0.0;
    bool rejected = false;
    for (int k = 1; k <= n - 1; ++k) {
      const double x = env_laws::sample_increment(law, rng);
      s += x;
      if (condition_positive && sum_strictly_negative(s)) {
        rejected = true;
        break;
      }
      increments[static_cast<std::size_t>(k - 1)] = x;
    }
    if (rejected) continue;
    increments[static_cast<std::size_t>(n - 1)] = env_laws::sample_increment(law, rng);
    ++result.used;
    fn(GeometricEnvironment(increments));
  }
  return result;
}

}  // namespace bprelab::bpre
