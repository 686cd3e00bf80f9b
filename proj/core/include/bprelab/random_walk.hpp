#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bprelab/env_laws.hpp"
#include "bprelab/rng.hpp"

namespace bprelab::random_walk {

using env_laws::EnvironmentLaw;

/// A walk S_0 = 0, S_k = X_1 + ... + X_k.
struct WalkPath {
  std::vector<double> increments;  // X_1..X_n
  std::vector<double> sums;        // S_0..S_n, sums.size() == increments.size() + 1

  int length() const { return static_cast<int>(increments.size()); }
};

WalkPath simulate_path(const EnvironmentLaw& law, int n, Rng& rng);

/// Stopping times and extremes of a path, computed in one scan.
/// first_strict_negative is T- = min{k >= 1 : S_k < 0}; first_nonpositive is
/// tau- = min{k >= 1 : S_k <= 0}. Ladder epochs are the successive strict
/// minima records (the trivial epoch 0 is not listed).
struct PathStats {
  std::optional<int> first_strict_negative;
  std::optional<int> first_nonpositive;
  double min_value = 0.0;
  double max_value = 0.0;
  int argmin_first = 0;  // first k with S_k = min
  std::vector<int> ladder_epochs;
  std::vector<double> ladder_heights;
};

PathStats path_statistics(const WalkPath& path);

/// Estimated (or exact) renewal function V of the strict descending ladder
/// height process: V(x) = expected number of ladder points with height
/// >= -x, V(0) = 1, V = 0 on x < 0. Evaluation interpolates linearly between
/// grid points and extrapolates by the last slope above the grid.
struct RenewalTable {
  std::vector<double> grid;    // increasing, grid[0] == 0
  std::vector<double> values;  // V at grid points, values[0] == 1
  std::int64_t samples_used = 0;
  std::int64_t chains_complete_at_max = 0;
  std::int64_t censored_chains = 0;
  bool tail_under_resolved = false;  // fewer than 100 chains reached max depth

  double operator()(double x) const;
};

struct RenewalOptions {
  std::int64_t chain_step_cap = 20'000'000;  // per-chain simulation budget
  double depth_factor = 4.0;                 // chains run to -depth_factor*max(grid)
};

/// Monte Carlo estimate from n_chains independent ladder chains. The grid
/// must be increasing and nonnegative; a leading 0 is supplied if missing.
RenewalTable renewal_function_estimate(const EnvironmentLaw& law,
                                       std::vector<double> grid,
                                       std::int64_t n_chains, Rng& rng,
                                       const RenewalOptions& options = {});

/// Exact V for the two-point law on its lattice {0, a, 2a, ...}:
/// V(ka) = k + 1 when w <= 1/2, otherwise sum_{j<=k} ((1-w)/w)^j.
RenewalTable exact_two_point_renewal(const env_laws::TwoPoint& law, double max_x);

struct ConditionedSamplerStats {
  std::int64_t proposals = 0;
  std::int64_t envelope_breaches = 0;  // proposals beyond the tabulated bound
};

/// Samples a path of length n under the Doob transform conditioning the walk
/// to stay nonnegative: from state x an increment X is accepted with
/// probability V(x+X) 1{x+X >= 0} / (K(x) V(x)). Exact when V is exact (the
/// two-point lattice case); approximate for estimated V, with K taken at the
/// (1 - envelope_epsilon) increment quantile and breaches counted.
WalkPath conditioned_positive_sampler(const EnvironmentLaw& law,
                                      const RenewalTable& v, int n, Rng& rng,
                                      ConditionedSamplerStats* stats = nullptr,
                                      double envelope_epsilon = 1e-7);

/// A scaled walk conditioned to stay positive up to time n, reported on a
/// time grid. weight is 1 for the plain meander and endpoint^-alpha for the
/// endpoint-tilted law.
struct MeanderSample {
  std::vector<double> scaled_path;  // S_{floor(n t)} / c_n at the t grid
  double endpoint = 0.0;            // S_n / c_n
  double weight = 1.0;
};

struct MeanderOptions {
  int n = 2000;
  std::vector<double> t_grid = {0.25, 0.5, 0.75, 1.0};  // increasing, last == 1
  bool tilt = false;    // weight = endpoint^-alpha
  bool strict = true;   // condition on {tau- > n}; false conditions on {T- > n}
  double min_acceptance = 1e-5;
  std::int64_t attempt_budget = 50'000'000;
};

struct MeanderBatch {
  std::vector<MeanderSample> samples;
  std::int64_t attempts = 0;
  double cn = 0.0;
  double alpha = 0.0;

  double acceptance_rate() const {
    return attempts > 0 ? static_cast<double>(samples.size()) /
                              static_cast<double>(attempts)
                        : 0.0;
  }
};

/// Rejection-samples `count` conditioned paths. Throws std::runtime_error if
/// the running acceptance rate is below options.min_acceptance once
/// options.attempt_budget proposals have been spent.
MeanderBatch sample_meanders(const EnvironmentLaw& law,
                             const MeanderOptions& options, std::int64_t count,
                             Rng& rng);

/// One row of the overshoot/undershoot table: a direct conditional estimate
/// P(S_n <= -u c_n | stop = n) or P(S_{n-1} >= v c_n | stop = n), where stop
/// is tau- (weak) or T- (strict).
struct OvershootRow {
  char kind = 'u';        // 'u' overshoot threshold, 'v' undershoot threshold
  double threshold = 0.0;
  std::int64_t hits = 0;
  std::int64_t conditioned = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct OvershootTable {
  int n = 0;
  bool strict = false;  // conditioning on {T- = n} instead of {tau- = n}
  double cn = 0.0;
  std::int64_t attempts = 0;
  std::int64_t conditioned = 0;  // paths with stop == n
  bool low_counts = false;       // conditioned < 200
  std::vector<OvershootRow> rows;
};

/// Estimates the conditional overshoot/undershoot probabilities by direct
/// conditioning: simulate walks, keep those whose (weak or strict) descent
/// time equals n. Wilson intervals per row.
OvershootTable overshoot_undershoot_estimate(const EnvironmentLaw& law, int n,
                                             const std::vector<double>& u_list,
                                             const std::vector<double>& v_list,
                                             std::int64_t n_attempts, Rng& rng,
                                             bool strict = false);

/// Histogram of the first-descent time T- (strict = true) or tau- over
/// independent walks, counted up to max_n.
struct DescentTimeCounts {
  int max_n = 0;
  bool strict = true;
  std::int64_t samples = 0;
  std::vector<std::int64_t> at;  // at[k] = #{descent time = k}, k = 1..max_n

  double p_at(int n) const;      // P(stop = n)
  double p_beyond(int n) const;  // P(stop > n)
  std::int64_t count_beyond(int n) const;

  void merge(const DescentTimeCounts& other);
};

DescentTimeCounts descent_time_counts(const EnvironmentLaw& law, int max_n,
                                      std::int64_t n_samples, Rng& rng,
                                      bool strict = true);

}  // namespace bprelab::random_walk
