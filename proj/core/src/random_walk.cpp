#include "bprelab/random_walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bprelab/estimators.hpp"
#include "bprelab/numeric.hpp"

namespace bprelab::random_walk {

WalkPath simulate_path(const EnvironmentLaw& law, int n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("simulate_path: n must be nonnegative");
  WalkPath path;
  path.increments.reserve(static_cast<std::size_t>(n));
  path.sums.reserve(static_cast<std::size_t>(n) + 1);
  path.sums.push_back(0.0);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = env_laws::sample_increment(law, rng);
    path.increments.push_back(x);
    s += x;
    path.sums.push_back(s);
  }
  return path;
}

PathStats path_statistics(const WalkPath& path) {
  PathStats stats;
  double min_v = 0.0;
  double max_v = 0.0;
  int argmin = 0;
  double ladder_record = 0.0;
  for (int k = 1; k <= path.length(); ++k) {
    const double s = path.sums[static_cast<std::size_t>(k)];
    if (!stats.first_strict_negative && sum_strictly_negative(s)) {
      stats.first_strict_negative = k;
    }
    if (!stats.first_nonpositive && sum_nonpositive(s)) stats.first_nonpositive = k;
    if (sum_strictly_below(s, min_v)) {
      min_v = s;
      argmin = k;
    }
    if (s > max_v) max_v = s;
    if (sum_strictly_below(s, ladder_record)) {
      ladder_record = s;
      stats.ladder_epochs.push_back(k);
      stats.ladder_heights.push_back(s);
    }
  }
  stats.min_value = min_v;
  stats.max_value = max_v;
  stats.argmin_first = argmin;
  return stats;
}

double RenewalTable::operator()(double x) const {
  if (x < -kZeroGuard) return 0.0;
  if (x < 0.0) x = 0.0;  // roundoff band around the origin
  if (grid.empty()) return 1.0;
  if (x <= grid.front()) return values.front();
  if (x >= grid.back()) {
    const std::size_t m = grid.size();
    if (m == 1) return values.back();
    const double slope = (values[m - 1] - values[m - 2]) / (grid[m - 1] - grid[m - 2]);
    return values.back() + slope * (x - grid.back());
  }
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

RenewalTable renewal_function_estimate(const EnvironmentLaw& law,
                                       std::vector<double> grid,
                                       std::int64_t n_chains, Rng& rng,
                                       const RenewalOptions& options) {
  if (n_chains < 10'000) {
    throw std::invalid_argument("renewal_function_estimate: need >= 1e4 ladder chains");
  }
  if (grid.empty()) throw std::invalid_argument("renewal_function_estimate: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0) {
      throw std::invalid_argument("renewal_function_estimate: grid points must be >= 0");
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("renewal_function_estimate: grid must be increasing");
    }
  }
  if (grid.front() != 0.0) grid.insert(grid.begin(), 0.0);

  const double max_x = grid.back();
  const double depth = options.depth_factor * std::max(max_x, 1.0);
  const std::size_t m = grid.size();
  std::vector<double> count_sum(m, 0.0);
  std::vector<std::int64_t> complete(m, 0);

  RenewalTable table;
  table.grid = grid;
  table.samples_used = n_chains;

  std::vector<double> heights;  // strictly decreasing, negative
  for (std::int64_t c = 0; c < n_chains; ++c) {
    heights.clear();
    double s = 0.0;
    double record = 0.0;
    std::int64_t steps = 0;
    bool censored = false;
    while (record > -depth) {
      if (steps >= options.chain_step_cap) {
        censored = true;
        break;
      }
      s += env_laws::sample_increment(law, rng);
      ++steps;
      if (sum_strictly_below(s, record)) {
        record = s;
        heights.push_back(s);
      }
    }
    if (censored) ++table.censored_chains;
    // A grid point x is fully resolved by this chain iff no future ladder
    // height could still fall in [-x, 0): heights only decrease, so the
    // condition is x <= -record.
    std::size_t h_idx = 0;
    std::int64_t covered = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (censored && grid[i] > -record - kZeroGuard) break;
      while (h_idx < heights.size() && -heights[h_idx] <= grid[i] + kZeroGuard) {
        ++covered;
        ++h_idx;
      }
      count_sum[i] += static_cast<double>(covered);
      ++complete[i];
    }
  }

  table.values.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (complete[i] == 0) {
      throw std::runtime_error("renewal_function_estimate: no complete chains at a grid point");
    }
    table.values[i] = 1.0 + count_sum[i] / static_cast<double>(complete[i]);
  }
  table.values[0] = 1.0;  // definitional
  table.chains_complete_at_max = complete[m - 1];
  table.tail_under_resolved = table.chains_complete_at_max < 100;
  return table;
}

RenewalTable exact_two_point_renewal(const env_laws::TwoPoint& law, double max_x) {
  if (law.a <= 0.0) throw std::invalid_argument("exact_two_point_renewal: a must be positive");
  const int k_max = static_cast<int>(std::ceil(max_x / law.a)) + 1;
  RenewalTable table;
  table.samples_used = 0;
  table.chains_complete_at_max = 0;
  const double r = law.w > 0.5 ? (1.0 - law.w) / law.w : 1.0;
  double v = 1.0;
  double rj = 1.0;
  table.grid.push_back(0.0);
  table.values.push_back(1.0);
  for (int k = 1; k <= k_max; ++k) {
    rj *= r;
    v += rj;
    table.grid.push_back(static_cast<double>(k) * law.a);
    table.values.push_back(v);
  }
  return table;
}

namespace {

// Upper quantile of the increment law used for the acceptance envelope.
double increment_upper_quantile(const EnvironmentLaw& law, double eps) {
  if (const auto* tp = std::get_if<env_laws::TwoPoint>(&law)) return tp->a;
  if (const auto* bu = std::get_if<env_laws::BoundedUniform>(&law)) return bu->hi;
  if (const auto* pa = std::get_if<env_laws::TwoSidedPareto>(&law)) {
    return pa->x_min * std::pow(pa->p / eps, 1.0 / pa->alpha) - pa->centering;
  }
  const auto& st = std::get<env_laws::ExactStable>(law);
  if (!st.calibration) {
    throw std::runtime_error("conditioned_positive_sampler: ExactStable needs calibration");
  }
  return st.calibration->quantile(1.0 - eps);
}

}  // namespace

WalkPath conditioned_positive_sampler(const EnvironmentLaw& law,
                                      const RenewalTable& v, int n, Rng& rng,
                                      ConditionedSamplerStats* stats,
                                      double envelope_epsilon) {
  WalkPath path;
  path.sums.push_back(0.0);
  if (n == 0) return path;
  const double x_hi = increment_upper_quantile(law, envelope_epsilon);
  constexpr std::int64_t kMaxTriesPerStep = 10'000'000;
  double state = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v_state = v(state);
    const double bound = v(state + x_hi);
    if (!(bound > 0.0) || !(v_state > 0.0)) {
      throw std::runtime_error("conditioned_positive_sampler: cannot establish acceptance bound at state " +
                               std::to_string(state));
    }
    std::int64_t tries = 0;
    for (;;) {
      if (++tries > kMaxTriesPerStep) {
        throw std::runtime_error("conditioned_positive_sampler: acceptance stalled at state " +
                                 std::to_string(state));
      }
      const double x = env_laws::sample_increment(law, rng);
      if (stats) ++stats->proposals;
      const double y = state + x;
      if (sum_strictly_negative(y)) continue;
      double accept = v(y) / bound;
      if (accept > 1.0) {
        if (stats) ++stats->envelope_breaches;
        accept = 1.0;
      }
      if (uniform01(rng) < accept) {
        path.increments.push_back(x);
        path.sums.push_back(y);
        state = y;
        break;
      }
    }
  }
  return path;
}

MeanderBatch sample_meanders(const EnvironmentLaw& law,
                             const MeanderOptions& options, std::int64_t count,
                             Rng& rng) {
  if (options.n < 1) throw std::invalid_argument("sample_meanders: n >= 1 required");
  if (options.t_grid.empty() || options.t_grid.back() != 1.0) {
    throw std::invalid_argument("sample_meanders: t grid must end at 1");
  }
  for (std::size_t i = 0; i < options.t_grid.size(); ++i) {
    if (options.t_grid[i] < 0.0 || options.t_grid[i] > 1.0 ||
        (i > 0 && options.t_grid[i] <= options.t_grid[i - 1])) {
      throw std::invalid_argument("sample_meanders: t grid must be increasing in [0,1]");
    }
  }

  MeanderBatch batch;
  batch.cn = env_laws::stable_norming_cn(law, options.n);
  batch.alpha = env_laws::tail_profile(law).alpha;
  batch.samples.reserve(static_cast<std::size_t>(count));

  std::vector<int> grid_index;
  grid_index.reserve(options.t_grid.size());
  for (const double t : options.t_grid) {
    grid_index.push_back(static_cast<int>(std::floor(t * options.n)));
  }
  grid_index.back() = options.n;

  std::vector<double> at_grid(grid_index.size());
  while (static_cast<std::int64_t>(batch.samples.size()) < count) {
    ++batch.attempts;
    if (batch.attempts >= options.attempt_budget &&
        batch.acceptance_rate() < options.min_acceptance) {
      throw std::runtime_error(
          "sample_meanders: acceptance rate " + std::to_string(batch.acceptance_rate()) +
          " below floor after " + std::to_string(batch.attempts) + " attempts");
    }
    double s = 0.0;
    bool ok = true;
    std::size_t g = 0;
    while (g < grid_index.size() && grid_index[g] == 0) at_grid[g++] = 0.0;
    for (int k = 1; k <= options.n; ++k) {
      s += env_laws::sample_increment(law, rng);
      const bool alive = options.strict ? !sum_nonpositive(s) : !sum_strictly_negative(s);
      if (!alive) {
        ok = false;
        break;
      }
      while (g < grid_index.size() && grid_index[g] == k) at_grid[g++] = s;
    }
    if (!ok) continue;
    if (s <= 0.0) continue;  // zero endpoint has no tilt weight (lattice edge case)
    MeanderSample sample;
    sample.endpoint = s / batch.cn;
    sample.scaled_path.resize(at_grid.size());
    for (std::size_t i = 0; i < at_grid.size(); ++i) {
      sample.scaled_path[i] = at_grid[i] / batch.cn;
    }
    sample.weight = options.tilt ? std::pow(sample.endpoint, -batch.alpha) : 1.0;
    batch.samples.push_back(std::move(sample));
  }
  return batch;
}

OvershootTable overshoot_undershoot_estimate(const EnvironmentLaw& law, int n,
                                             const std::vector<double>& u_list,
                                             const std::vector<double>& v_list,
                                             std::int64_t n_attempts, Rng& rng,
                                             bool strict) {
  if (n < 1) throw std::invalid_argument("overshoot_undershoot_estimate: n >= 1");
  for (const double u : u_list) {
    if (u <= 0.0) throw std::invalid_argument("overshoot thresholds must be positive");
  }
  for (const double v : v_list) {
    if (v <= 0.0) throw std::invalid_argument("undershoot thresholds must be positive");
  }
  OvershootTable table;
  table.n = n;
  table.strict = strict;
  table.cn = env_laws::stable_norming_cn(law, n);
  table.attempts = n_attempts;

  std::vector<std::int64_t> u_hits(u_list.size(), 0);
  std::vector<std::int64_t> v_hits(v_list.size(), 0);
  for (std::int64_t rep = 0; rep < n_attempts; ++rep) {
    double s = 0.0;
    double prev = 0.0;
    int stop = 0;
    for (int k = 1; k <= n; ++k) {
      prev = s;
      s += env_laws::sample_increment(law, rng);
      const bool stopped = strict ? sum_strictly_negative(s) : sum_nonpositive(s);
      if (stopped) {
        stop = k;
        break;
      }
    }
    if (stop != n) continue;
    ++table.conditioned;
    for (std::size_t i = 0; i < u_list.size(); ++i) {
      if (s <= -u_list[i] * table.cn) ++u_hits[i];
    }
    for (std::size_t i = 0; i < v_list.size(); ++i) {
      if (prev >= v_list[i] * table.cn) ++v_hits[i];
    }
  }
  table.low_counts = table.conditioned < 200;

  const auto push_row = [&](char kind, double threshold, std::int64_t hits) {
    OvershootRow row;
    row.kind = kind;
    row.threshold = threshold;
    row.hits = hits;
    row.conditioned = table.conditioned;
    if (table.conditioned > 0) {
      const auto wi = estimators::wilson_interval(hits, table.conditioned);
      row.estimate = wi.estimate;
      row.stderr_ = wi.stderr_;
      row.ci_low = wi.ci_low;
      row.ci_high = wi.ci_high;
    }
    table.rows.push_back(row);
  };
  for (std::size_t i = 0; i < u_list.size(); ++i) push_row('u', u_list[i], u_hits[i]);
  for (std::size_t i = 0; i < v_list.size(); ++i) push_row('v', v_list[i], v_hits[i]);
  return table;
}

double DescentTimeCounts::p_at(int n) const {
  if (n < 1 || n > max_n) throw std::invalid_argument("p_at: n out of counted range");
  return static_cast<double>(at[static_cast<std::size_t>(n)]) /
         static_cast<double>(samples);
}

std::int64_t DescentTimeCounts::count_beyond(int n) const {
  if (n < 0 || n > max_n) throw std::invalid_argument("count_beyond: n out of range");
  std::int64_t below = 0;
  for (int k = 1; k <= n; ++k) below += at[static_cast<std::size_t>(k)];
  return samples - below;
}

double DescentTimeCounts::p_beyond(int n) const {
  return static_cast<double>(count_beyond(n)) / static_cast<double>(samples);
}

void DescentTimeCounts::merge(const DescentTimeCounts& other) {
  if (other.max_n != max_n || other.strict != strict) {
    throw std::invalid_argument("DescentTimeCounts::merge: incompatible counts");
  }
  samples += other.samples;
  for (std::size_t k = 0; k < at.size(); ++k) at[k] += other.at[k];
}

DescentTimeCounts descent_time_counts(const EnvironmentLaw& law, int max_n,
                                      std::int64_t n_samples, Rng& rng,
                                      bool strict) {
  if (max_n < 1) throw std::invalid_argument("descent_time_counts: max_n >= 1");
  DescentTimeCounts counts;
  counts.max_n = max_n;
  counts.strict = strict;
  counts.samples = n_samples;
  counts.at.assign(static_cast<std::size_t>(max_n) + 1, 0);
  for (std::int64_t rep = 0; rep < n_samples; ++rep) {
    double s = 0.0;
    for (int k = 1; k <= max_n; ++k) {
      s += env_laws::sample_increment(law, rng);
      const bool stopped = strict ? sum_strictly_negative(s) : sum_nonpositive(s);
      if (stopped) {
        ++counts.at[static_cast<std::size_t>(k)];
        break;
      }
    }
  }
  return counts;
}

}  // namespace bprelab::random_walk
