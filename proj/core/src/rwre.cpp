#include "bprelab/rwre.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bprelab/numeric.hpp"

namespace bprelab::rwre {

std::pair<double, double> transition_probabilities(double x) {
  const double p = 1.0 / (1.0 + std::exp(-x));
  const double q = x >= 0.0 ? std::exp(-x) * p : 1.0 / (1.0 + std::exp(x));
  return {q, p};
}

double RwreEnvironment::site_increment(int site) const {
  if (site < 0) throw std::invalid_argument("site_increment: site >= 0 required");
  const auto idx = static_cast<std::size_t>(site);
  while (cache_.size() <= idx) {
    Rng site_rng = derive_rng(seed_, 0x52575245ull, cache_.size());
    cache_.push_back(env_laws::sample_increment(law_, site_rng));
  }
  return cache_[idx];
}

double RwreEnvironment::down_probability(int site) const {
  return transition_probabilities(site_increment(site)).first;
}

std::vector<double> RwreEnvironment::increment_prefix(int count) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(site_increment(k));
  return out;
}

Excursion simulate_excursion(const RwreEnvironment& env, Rng& rng,
                             std::uint64_t step_cap, bool keep_trajectory) {
  if (step_cap < 1) throw std::invalid_argument("simulate_excursion: step_cap >= 1");
  Excursion exc;
  exc.local_times.assign(2, 0);  // levels -1, 0
  exc.local_times[1] = 1;        // R_0 = 0
  if (keep_trajectory) exc.trajectory.push_back(0);
  int level = 0;
  std::uint64_t steps = 0;
  while (true) {
    if (steps >= step_cap) {
      exc.capped = true;
      break;
    }
    const double q = env.down_probability(level);
    level += uniform01(rng) < q ? -1 : 1;
    ++steps;
    if (keep_trajectory) exc.trajectory.push_back(level);
    if (static_cast<std::size_t>(level + 1) >= exc.local_times.size()) {
      exc.local_times.resize(static_cast<std::size_t>(level) + 2, 0);
    }
    ++exc.local_times[static_cast<std::size_t>(level + 1)];
    if (level > exc.max_level) exc.max_level = level;
    if (level == -1) break;
  }
  exc.chi = static_cast<std::int64_t>(steps);
  return exc;
}

bpre::PopulationTrajectory local_time_to_branching(const Excursion& excursion) {
  if (excursion.capped) {
    throw std::invalid_argument("local_time_to_branching: excursion is incomplete");
  }
  // Total visits over steps 0..chi.
  std::uint64_t visit_total = 0;
  for (const std::uint64_t c : excursion.local_times) visit_total += c;
  if (visit_total != static_cast<std::uint64_t>(excursion.chi) + 1 ||
      excursion.local_time(-1) != 1) {
    throw std::logic_error("local_time_to_branching: local-time bookkeeping broken");
  }

  bpre::PopulationTrajectory traj;
  // Alternating sum evaluated by its recursion Z_{n+1} = l(n) - Z_n, starting
  // from Z_0 = l(-1) = 1; the exchange identity l(n) = Z_{n+1} + Z_n must
  // then produce nonnegative sizes that die exactly where the local time does.
  std::int64_t z = 1;
  traj.sizes.push_back(1);
  int n = 0;
  while (true) {
    const auto ln = static_cast<std::int64_t>(excursion.local_time(n));
    const std::int64_t z_next = ln - z;
    if (z_next < 0) {
      throw std::logic_error("local_time_to_branching: negative population size");
    }
    traj.sizes.push_back(static_cast<std::uint64_t>(z_next));
    ++n;
    if (z_next == 0) {
      traj.extinction_time = n;
      break;
    }
    z = z_next;
  }
  // T = min{j > 0 : l(j) = 0} and the maximum level is T - 1.
  const int t = *traj.extinction_time;
  if (excursion.local_time(t) != 0 || excursion.local_time(t - 1) == 0 ||
      excursion.max_level != t - 1) {
    throw std::logic_error("local_time_to_branching: extinction/maximum mismatch");
  }
  return traj;
}

namespace {

// Absorption split for the frozen nearest-neighbor chain on [-1, top + 1]:
// probability of reaching level r before -1 from `from` equals A_from / A_r,
// where A_k = sum_{j<=k} exp(-(X_1 + ... + X_j)) over site increments.
struct ConfinedResolver {
  std::vector<double> log_a;  // log A_0 .. log A_{top+1}

  ConfinedResolver(const RwreEnvironment& env, int top) {
    log_a.resize(static_cast<std::size_t>(top) + 2);
    double s = 0.0;
    log_a[0] = 0.0;
    for (int k = 1; k <= top + 1; ++k) {
      s += env.site_increment(k - 1);
      log_a[static_cast<std::size_t>(k)] =
          logaddexp(log_a[static_cast<std::size_t>(k - 1)], -s);
    }
  }

  double reach_before_ruin(int from, int r) const {
    return std::exp(log_a[static_cast<std::size_t>(from)] -
                    log_a[static_cast<std::size_t>(r)]);
  }
};

}  // namespace

void accumulate_max_level_histogram(const RwreEnvironment& env, int max_level,
                                    Rng& rng, std::span<double> bins,
                                    std::uint64_t step_cap) {
  if (max_level < 0) throw std::invalid_argument("max_level >= 0 required");
  if (bins.size() != static_cast<std::size_t>(max_level) + 2) {
    throw std::invalid_argument("bins must have max_level + 2 entries");
  }
  int level = 0;
  int seen_max = 0;
  std::uint64_t steps = 0;
  while (steps < step_cap) {
    const double q = env.down_probability(level);
    level += uniform01(rng) < q ? -1 : 1;
    ++steps;
    if (level > seen_max) seen_max = level;
    if (level == -1) {
      bins[static_cast<std::size_t>(seen_max)] += 1.0;
      return;
    }
    if (level > max_level) {
      bins[static_cast<std::size_t>(max_level) + 1] += 1.0;
      return;
    }
  }
  // Still confined: split the remaining mass exactly over the reachable bins.
  const ConfinedResolver resolver(env, max_level);
  double below = 0.0;  // P(absorbed at -1 before reaching r+1)
  for (int r = seen_max; r <= max_level; ++r) {
    const double ruin_first = 1.0 - resolver.reach_before_ruin(level, r + 1);
    bins[static_cast<std::size_t>(r)] += ruin_first - below;
    below = ruin_first;
  }
  bins[static_cast<std::size_t>(max_level) + 1] +=
      resolver.reach_before_ruin(level, max_level + 1);
}

Theorem4Stats theorem4_statistics(const EnvironmentLaw& law,
                                  std::int64_t n_excursions,
                                  const std::vector<int>& levels,
                                  const std::vector<double>& x_list,
                                  const std::vector<double>& t_grid,
                                  std::uint64_t step_cap, Rng& rng) {
  Theorem4Stats stats;
  stats.excursions = n_excursions;
  stats.t_grid = t_grid;
  int top = 0;
  for (const int level : levels) top = std::max(top, level);

  struct LevelAcc {
    int level;
    double cn;
    std::int64_t count = 0;
    std::vector<std::int64_t> tail_hits;
  };
  std::vector<LevelAcc> acc;
  for (const int level : levels) {
    LevelAcc a;
    a.level = level;
    a.cn = env_laws::stable_norming_cn(law, std::max(level, 1));
    a.tail_hits.assign(x_list.size(), 0);
    acc.push_back(a);
    stats.profiles[level] = std::vector<std::vector<double>>(t_grid.size());
  }

  for (std::int64_t i = 0; i < n_excursions; ++i) {
    const std::uint64_t env_seed = rng();
    const RwreEnvironment env(law, env_seed);
    const Excursion exc = simulate_excursion(env, rng, step_cap);
    if (exc.capped) {
      ++stats.capped;
      if (exc.max_level <= top) ++stats.capped_below_top_level;
      continue;
    }
    ++stats.completed;
    ++stats.max_level_counts[exc.max_level];

    ++stats.identity_checked;
    bool ok = true;
    try {
      (void)local_time_to_branching(exc);
    } catch (const std::logic_error&) {
      ok = false;
    }
    if (ok) ++stats.identity_passed;

    // Event identity: {l(n) > 0, l(n+1) = 0} must coincide with {max = n}.
    for (const auto& a : acc) {
      const bool event = exc.local_time(a.level) > 0 && exc.local_time(a.level + 1) == 0;
      if (event != (exc.max_level == a.level)) ++stats.event_identity_failures;
    }

    for (auto& a : acc) {
      if (exc.max_level != a.level) continue;
      ++a.count;
      const double log_l = std::log(static_cast<double>(exc.local_time(a.level)));
      for (std::size_t xi = 0; xi < x_list.size(); ++xi) {
        if (log_l > x_list[xi] * a.cn) ++a.tail_hits[xi];
      }
      auto& profile = stats.profiles[a.level];
      for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const int site = static_cast<int>(std::floor(t_grid[ti] * a.level));
        const double lt = static_cast<double>(exc.local_time(site));
        profile[ti].push_back(lt > 0.0 ? std::log(lt) / a.cn : kNegInf);
      }
    }
  }

  for (const auto& a : acc) {
    Theorem4Row row;
    row.level = a.level;
    row.cn = a.cn;
    row.count = a.count;
    row.low_counts = a.count < 200;
    for (std::size_t xi = 0; xi < x_list.size(); ++xi) {
      Theorem4Tail tail;
      tail.x = x_list[xi];
      if (a.count > 0) {
        tail.tail = estimators::wilson_interval(a.tail_hits[xi], a.count);
      }
      row.tails.push_back(tail);
    }
    stats.rows.push_back(row);
  }
  return stats;
}

}  // namespace bprelab::rwre
