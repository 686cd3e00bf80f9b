#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "bprelab/bpre.hpp"
#include "bprelab/env_laws.hpp"
#include "bprelab/estimators.hpp"
#include "bprelab/rng.hpp"

namespace bprelab::rwre {

using env_laws::EnvironmentLaw;

/// Transition probabilities of the site-x walk: down with q = e^-x/(1+e^-x),
/// up with p = 1/(1+e^-x); log(p/q) = x.
std::pair<double, double> transition_probabilities(double x);

/// A quenched environment over sites 0, 1, 2, ...: each site carries one
/// increment drawn lazily from a site-indexed substream, so revisits reuse
/// the same value and regeneration is exact for a fixed (law, seed).
class RwreEnvironment {
 public:
  RwreEnvironment(EnvironmentLaw law, std::uint64_t seed)
      : law_(std::move(law)), seed_(seed) {}

  double site_increment(int site) const;    // drives transitions out of `site`
  double down_probability(int site) const;  // q_site
  std::uint64_t seed() const { return seed_; }

  /// Increments of the first `count` sites; the induced branching process has
  /// generation-k offspring law Geometric(site_increment(k)).
  std::vector<double> increment_prefix(int count) const;

 private:
  EnvironmentLaw law_;
  std::uint64_t seed_ = 0;
  mutable std::vector<double> cache_;
};

/// First nonnegative excursion of the walk: starts at 0, ends on hitting -1.
/// local_time(n) counts visits over steps 0..chi, so local_time(-1) = 1 and
/// the local times sum to chi + 1. The walk never steps below -1.
struct Excursion {
  std::vector<std::uint64_t> local_times;  // index level + 1, levels -1..max_level
  std::int64_t chi = 0;                    // steps taken (hitting time of -1)
  int max_level = 0;                       // highest level visited
  bool capped = false;                     // step cap hit before reaching -1
  std::vector<int> trajectory;             // filled only when requested

  std::uint64_t local_time(int level) const {
    const std::int64_t idx = static_cast<std::int64_t>(level) + 1;
    if (idx < 0 || idx >= static_cast<std::int64_t>(local_times.size())) return 0;
    return local_times[static_cast<std::size_t>(idx)];
  }
};

inline constexpr std::uint64_t kDefaultStepCap = 100'000'000;

Excursion simulate_excursion(const RwreEnvironment& env, Rng& rng,
                             std::uint64_t step_cap = kDefaultStepCap,
                             bool keep_trajectory = false);

/// Folds the local-time profile into the branching trajectory through the
/// alternating sum Z_n = sum_i (-1)^i l(n-i-1) and verifies the exchange
/// identities (l(n) = Z_{n+1} + Z_n, counts, extinction consistency) on the
/// way; throws std::logic_error if any identity fails, which would indicate
/// a bookkeeping bug rather than randomness.
bpre::PopulationTrajectory local_time_to_branching(const Excursion& excursion);

/// Adds to bins[0..max_level] the distribution of the excursion maximum
/// (mass on {max = r}, absorbed excursions) and to bins[max_level+1] the
/// probability of exceeding max_level. Simulation stops as soon as the walk
/// leaves [0, max_level]; if the step budget runs out while confined, the
/// remaining mass is resolved exactly from the quenched absorption
/// probabilities of the frozen birth-death chain, so every call adds total
/// mass one with no censoring bias.
void accumulate_max_level_histogram(const RwreEnvironment& env, int max_level,
                                    Rng& rng, std::span<double> bins,
                                    std::uint64_t step_cap = 100'000);

struct Theorem4Tail {
  double x = 0.0;
  estimators::WilsonInterval tail;  // P(l(n) > e^{x c_n} | max = n)
};

struct Theorem4Row {
  int level = 0;
  double cn = 0.0;
  std::int64_t count = 0;  // excursions with max = level
  std::vector<Theorem4Tail> tails;
  bool low_counts = false;
};

struct Theorem4Stats {
  std::int64_t excursions = 0;
  std::int64_t completed = 0;
  std::int64_t capped = 0;
  std::int64_t capped_below_top_level = 0;  // capped while max <= top level
  std::int64_t identity_checked = 0;
  std::int64_t identity_passed = 0;
  std::int64_t event_identity_failures = 0;  // {l(n)>0, l(n+1)=0} vs {max = n}
  std::map<int, std::int64_t> max_level_counts;  // completed excursions
  std::vector<Theorem4Row> rows;
  // Scaled local-time profiles log l(floor(level*t))/c_level given max = level:
  // profiles[level][t_index] is the sample vector.
  std::map<int, std::vector<std::vector<double>>> profiles;
  std::vector<double> t_grid;
};

/// Per-excursion annealed statistics: the distribution of the maximal level,
/// conditional local-time tails at the requested levels, and scaled profiles,
/// plus the path identity suite. Each excursion runs in a fresh environment
/// seeded from the master stream.
Theorem4Stats theorem4_statistics(const EnvironmentLaw& law,
                                  std::int64_t n_excursions,
                                  const std::vector<int>& levels,
                                  const std::vector<double>& x_list,
                                  const std::vector<double>& t_grid,
                                  std::uint64_t step_cap, Rng& rng);

}  // namespace bprelab::rwre
