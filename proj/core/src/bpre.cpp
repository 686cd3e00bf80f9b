#include "bprelab/bpre.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bprelab/numeric.hpp"

namespace bprelab::bpre {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double GeometricOffspring::mean() const { return std::exp(x); }

double GeometricOffspring::p_zero() const { return sigmoid(-x); }

double GeometricOffspring::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  // f_k = p0 (1-p0)^k, computed in logs for large k.
  const double log_p0 = -softplus(x);
  const double log_m = -softplus(-x);
  return std::exp(log_p0 + static_cast<double>(k) * log_m);
}

double FiniteSupportOffspring::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    m += static_cast<double>(k) * probs[k];
  }
  return m;
}

GeometricEnvironment::GeometricEnvironment(std::vector<double> increments)
    : increments_(std::move(increments)) {
  const std::size_t n = increments_.size();
  sums_.resize(n + 1);
  log_a_.resize(n + 1);
  sums_[0] = 0.0;
  log_a_[0] = 0.0;  // A_0 = e^-S_0 = 1
  for (std::size_t k = 1; k <= n; ++k) {
    sums_[k] = sums_[k - 1] + increments_[k - 1];
    // Terms below the 1e-20 relative floor cannot move the accumulated sum;
    // skipping them keeps long high-walk environments cheap.
    const double gap = -sums_[k] - log_a_[k - 1];
    log_a_[k] = gap < -46.0 ? log_a_[k - 1] : logaddexp(log_a_[k - 1], -sums_[k]);
  }
}

GeometricEnvironment GeometricEnvironment::from_walk(const random_walk::WalkPath& path) {
  return GeometricEnvironment(path.increments);
}

double GeometricEnvironment::a(int k) const { return std::exp(log_a(k)); }

double GeometricEnvironment::h(int k) const { return std::exp(-log_a(k)); }

double GeometricEnvironment::log_tail_sum(int m, int k) const {
  if (m < 0 || k < m || k > length()) {
    throw std::invalid_argument("log_tail_sum: need 0 <= m <= k <= length");
  }
  double acc = kNegInf;
  for (int j = m; j <= k; ++j) {
    acc = logaddexp(acc, -sums_[static_cast<std::size_t>(j)]);
  }
  return acc;
}

namespace {

void check_index(const GeometricEnvironment& env, int n, int min_n) {
  if (n < min_n || n > env.length()) {
    throw std::invalid_argument("quenched index out of range");
  }
}

// log g_n with g_n = e^-X_n / (1 + e^-X_n) = f_{n-1}(0), the one-step death
// probability through the n-th law.
double log_death_prob(double x) { return -softplus(x); }

// log(1 - r_n g) where r_n = 1 - H_m e^-S_m: 1 - r g = (1 - g) + g H_m e^-S_m.
double log_one_minus_rg(const GeometricEnvironment& env, int m, double x_next) {
  const double log_g = log_death_prob(x_next);
  const double log_1mg = -softplus(-x_next);
  const double d = env.log_a(m) + env.sum(m);  // -log(H_m e^-S_m) >= 0
  return logaddexp(log_1mg, log_g - d);
}

}  // namespace

double log_quenched_survival(const GeometricEnvironment& env, int n) {
  check_index(env, n, 0);
  return -env.log_a(n);
}

double quenched_survival(const GeometricEnvironment& env, int n) {
  return std::exp(log_quenched_survival(env, n));
}

double log_quenched_extinction_at(const GeometricEnvironment& env, int n) {
  check_index(env, n, 1);
  return -env.log_a(n - 1) - env.log_a(n) - env.sum(n);
}

double quenched_extinction_at(const GeometricEnvironment& env, int n) {
  return std::exp(log_quenched_extinction_at(env, n));
}

double log_quenched_population_pmf(const GeometricEnvironment& env, int n, double j) {
  check_index(env, n, 0);
  if (j < 1.0) return kNegInf;
  const double d = env.log_a(n) + env.sum(n);
  const double base = -2.0 * env.log_a(n) - env.sum(n);
  if (j == 1.0) return base;
  return base + (j - 1.0) * log1mexp(d);
}

double quenched_population_pmf(const GeometricEnvironment& env, int n, double j) {
  return std::exp(log_quenched_population_pmf(env, n, j));
}

double log_quenched_joint_tail(const GeometricEnvironment& env, int n, double a) {
  check_index(env, n, 1);
  if (a < 0.0) throw std::invalid_argument("quenched_joint_tail: a >= 0 required");
  const double x_next = env.increment(n);
  const double log_g = log_death_prob(x_next);
  const double base = -2.0 * env.log_a(n - 1) - env.sum(n - 1) + log_g -
                      log_one_minus_rg(env, n - 1, x_next);
  if (a == 0.0) return base;
  const double d = env.log_a(n - 1) + env.sum(n - 1);
  const double log_rg = log1mexp(d) + log_g;  // -inf at n = 1 (r_0 = 0)
  if (log_rg == kNegInf) return kNegInf;      // Z_0 = 1 cannot exceed a >= 1
  return base + a * log_rg;
}

double quenched_joint_tail(const GeometricEnvironment& env, int n, double a) {
  return std::exp(log_quenched_joint_tail(env, n, a));
}

double sample_log_population_given_extinction(const GeometricEnvironment& env,
                                              int n, int m, Rng& rng) {
  check_index(env, n, 1);
  if (m < 0 || m > n - 1) {
    throw std::invalid_argument("sample_log_population_given_extinction: 0 <= m <= n-1");
  }
  // One individual alive at generation m dies out by generation k with
  // probability F_{m,k}(0) = 1 - e^-S_m / sum_{j=m..k} e^-S_j.
  const double log_sm = -env.sum(m);
  const double log_a_death = log1mexp(env.log_tail_sum(m, n) - log_sm);
  const double log_b_death = log1mexp(env.log_tail_sum(m, n - 1) - log_sm);
  const double d = env.log_a(m) + env.sum(m);
  const double log_r = log1mexp(d);
  // Proposal: Z geometric with success 1 - r a; accept with 1 - (b/a)^Z.
  const double lambda = -(log_r + log_a_death);
  const double log_ba = log_b_death - log_a_death;  // <= 0
  for (int tries = 0; tries < 100000; ++tries) {
    const double e = -std::log(uniform_pos(rng));
    double j;
    double log_j;
    if (lambda <= 0.0) {
      j = 1.0;
      log_j = 0.0;
    } else if (e / lambda > 1e15) {
      // Beyond exact integer resolution the floor is immaterial.
      j = e / lambda;
      log_j = std::log(e) - std::log(lambda);
    } else {
      j = 1.0 + std::floor(e / lambda);
      log_j = std::log(j);
    }
    double accept = 1.0;
    if (log_ba != kNegInf) {
      const double t = j * log_ba;
      accept = -std::expm1(t);
    }
    if (uniform01(rng) < accept) return log_j;
  }
  throw std::runtime_error("sample_log_population_given_extinction: acceptance stalled");
}

std::uint64_t sample_offspring_total(const OffspringLaw& law,
                                     std::uint64_t parents, Rng& rng,
                                     std::uint64_t cap) {
  if (parents == 0) return 0;
  if (const auto* geo = std::get_if<GeometricOffspring>(&law)) {
    const double p0 = geo->p_zero();
    const double log_m = -softplus(-geo->x);  // log(1 - p0)
    if (parents <= 4096) {
      std::uint64_t total = 0;
      for (std::uint64_t i = 0; i < parents; ++i) {
        const double u = uniform_pos(rng);
        total += static_cast<std::uint64_t>(std::floor(std::log(u) / log_m));
        if (total > cap) return cap + 1;
      }
      return total;
    }
    // Negative binomial via a gamma-mixed Poisson: NB(parents, p0) equals
    // Poisson(lambda) with lambda ~ Gamma(parents, (1-p0)/p0).
    std::gamma_distribution<double> gamma(static_cast<double>(parents),
                                          (1.0 - p0) / p0);
    const double lambda = gamma(rng);
    const double cap_d = static_cast<double>(cap);
    if (lambda > cap_d + 20.0 * std::sqrt(cap_d) + 100.0) return cap + 1;
    std::poisson_distribution<std::uint64_t> poisson(lambda);
    const std::uint64_t total = poisson(rng);
    return total > cap ? cap + 1 : total;
  }
  const auto& fs = std::get<FiniteSupportOffspring>(law);
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < parents; ++i) {
    double u = uniform01(rng);
    std::size_t k = 0;
    while (k + 1 < fs.probs.size() && u >= fs.probs[k]) {
      u -= fs.probs[k];
      ++k;
    }
    total += k;
    if (total > cap) return cap + 1;
  }
  return total;
}

namespace {

template <typename NextLaw>
PopulationTrajectory run_population(int generations, NextLaw&& offspring_total,
                                    std::uint64_t cap) {
  PopulationTrajectory traj;
  traj.sizes.push_back(1);
  std::uint64_t z = 1;
  for (int gen = 0; gen < generations; ++gen) {
    z = offspring_total(gen, z);
    if (z > cap) {
      traj.capped = true;
      traj.sizes.push_back(z);
      return traj;
    }
    traj.sizes.push_back(z);
    if (z == 0) {
      traj.extinction_time = gen + 1;
      return traj;
    }
  }
  return traj;  // alive at the simulation horizon
}

}  // namespace

PopulationTrajectory simulate_population(std::span<const OffspringLaw> generations,
                                         Rng& rng, std::uint64_t cap) {
  if (cap < 1) throw std::invalid_argument("simulate_population: cap >= 1 required");
  for (const auto& law : generations) {
    if (const auto* fs = std::get_if<FiniteSupportOffspring>(&law)) {
      double total = 0.0;
      for (const double p : fs->probs) total += p;
      if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("FiniteSupportOffspring: probabilities must sum to 1");
      }
    }
  }
  return run_population(
      static_cast<int>(generations.size()),
      [&](int gen, std::uint64_t z) {
        return sample_offspring_total(generations[static_cast<std::size_t>(gen)], z,
                                      rng, cap);
      },
      cap);
}

PopulationTrajectory simulate_population_geometric(std::span<const double> increments,
                                                   Rng& rng, std::uint64_t cap) {
  return run_population(
      static_cast<int>(increments.size()),
      [&](int gen, std::uint64_t z) {
        const OffspringLaw law = GeometricOffspring{increments[static_cast<std::size_t>(gen)]};
        return sample_offspring_total(law, z, rng, cap);
      },
      cap);
}

double zeta_geometric(double x, int b) {
  if (b < 0) throw std::invalid_argument("zeta_geometric: b >= 0 required");
  // With m = 1/(1+e^-x): sum_{k>=b} k^2 m^k
  //   = m^b [ m(1+m)/(1-m)^3 + 2b m/(1-m)^2 + b^2/(1-m) ],
  // and zeta(b) = e^-2x (1-m) * that sum. Everything is assembled in log
  // space because both e^-2x and the bracket can overflow on their own.
  const double log_m = -softplus(-x);
  const double log_1mm = -softplus(x);
  const double bd = static_cast<double>(b);
  double log_bracket = log_m + std::log1p(std::exp(log_m)) - 2.0 * log_1mm;
  if (b > 0) {
    log_bracket = logaddexp(log_bracket, std::log(2.0 * bd) + log_m - log_1mm);
    log_bracket = logaddexp(log_bracket, 2.0 * std::log(bd));
  }
  return std::exp(-2.0 * x + bd * log_m + log_bracket);
}

double zeta_finite_support(const FiniteSupportOffspring& law, int b) {
  if (b < 0) throw std::invalid_argument("zeta_finite_support: b >= 0 required");
  const double mean = law.mean();
  if (mean <= 0.0) throw std::invalid_argument("zeta_finite_support: mean must be positive");
  double s2 = 0.0;
  for (std::size_t k = static_cast<std::size_t>(b); k < law.probs.size(); ++k) {
    s2 += static_cast<double>(k) * static_cast<double>(k) * law.probs[k];
  }
  return s2 / (mean * mean);
}

ZetaDiagnostic zeta_and_moment_check(const EnvironmentLaw& law, int b,
                                     double delta, std::int64_t n_samples,
                                     Rng& rng) {
  if (delta <= 0.0) throw std::invalid_argument("zeta_and_moment_check: delta > 0 required");
  ZetaDiagnostic diag;
  diag.b = b;
  diag.delta = delta;
  diag.alpha = env_laws::tail_profile(law).alpha;
  const double exponent = diag.alpha + delta;
  std::vector<double> thresholds;
  for (double t = 0.25; t <= 4096.0; t *= 2.0) thresholds.push_back(t);
  std::vector<std::int64_t> exceed(thresholds.size(), 0);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double x = env_laws::sample_increment(law, rng);
    const double zeta = zeta_geometric(x, b);
    diag.max_sample = std::max(diag.max_sample, zeta);
    const double logp = std::max(std::log(zeta), 0.0);
    const double v = std::pow(logp, exponent);
    sum += v;
    sum_sq += v * v;
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      if (zeta > thresholds[t]) ++exceed[t];
    }
  }
  diag.log_moment = estimators::mean_ci_from_moments(sum, sum_sq, n_samples);
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    diag.tail_table.emplace_back(
        thresholds[t], static_cast<double>(exceed[t]) / static_cast<double>(n_samples));
  }
  return diag;
}

estimators::McEstimate annealed_extinction_estimate(const EnvironmentLaw& law,
                                                    int n, std::int64_t n_envs,
                                                    Rng& rng) {
  if (n < 1) throw std::invalid_argument("annealed_extinction_estimate: n >= 1");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t e = 0; e < n_envs; ++e) {
    double s = 0.0;
    double log_a_prev = 0.0;  // log A_0
    double log_a = 0.0;
    for (int k = 1; k <= n; ++k) {
      log_a_prev = log_a;
      s += env_laws::sample_increment(law, rng);
      log_a = logaddexp(log_a, -s);
    }
    const double v = std::exp(-log_a_prev - log_a - s);
    sum += v;
    sum_sq += v * v;
  }
  return estimators::mean_ci_from_moments(sum, sum_sq, n_envs);
}

estimators::McEstimate annealed_survival_estimate(const EnvironmentLaw& law,
                                                  int n, std::int64_t n_envs,
                                                  Rng& rng) {
  if (n < 0) throw std::invalid_argument("annealed_survival_estimate: n >= 0");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t e = 0; e < n_envs; ++e) {
    double s = 0.0;
    double log_a = 0.0;
    for (int k = 1; k <= n; ++k) {
      s += env_laws::sample_increment(law, rng);
      log_a = logaddexp(log_a, -s);
    }
    const double v = std::exp(-log_a);
    sum += v;
    sum_sq += v * v;
  }
  return estimators::mean_ci_from_moments(sum, sum_sq, n_envs);
}

namespace {

double enumerate_two_point(const env_laws::TwoPoint& law, int n, bool extinction) {
  if (n < 1 || n > 20) {
    throw std::invalid_argument("brute force enumeration limited to 1 <= n <= 20");
  }
  const std::uint64_t count = 1ull << n;
  double total = 0.0;
  std::vector<double> increments(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    int ups = 0;
    for (int k = 0; k < n; ++k) {
      const bool up = (mask >> k) & 1ull;
      increments[static_cast<std::size_t>(k)] = up ? law.a : -law.a;
      ups += up ? 1 : 0;
    }
    const double weight = std::pow(law.w, ups) * std::pow(1.0 - law.w, n - ups);
    if (weight == 0.0) continue;
    const GeometricEnvironment env(increments);
    const double value = extinction ? quenched_extinction_at(env, n)
                                    : quenched_survival(env, n);
    total += weight * value;
  }
  return total;
}

}  // namespace

double brute_force_extinction(const env_laws::TwoPoint& law, int n) {
  return enumerate_two_point(law, n, true);
}

double brute_force_survival(const env_laws::TwoPoint& law, int n) {
  return enumerate_two_point(law, n, false);
}

namespace {

constexpr double kZ95Joint = 1.959963984540054;

// Weight of one environment at every threshold, from the prefix state
// (log A_{n-1}, S_{n-1}) and the final increment.
void score_environment(double log_a_prev, double s_prev, double x_n,
                       std::span<const double> thresholds,
                       std::vector<double>& weights) {
  const double log_g = -softplus(x_n);
  const double log_1mg = -softplus(-x_n);
  const double d_prev = log_a_prev + s_prev;
  const double log_1mrg = logaddexp(log_1mg, log_g - d_prev);
  const double base = -2.0 * log_a_prev - s_prev + log_g - log_1mrg;
  const double log_rg = log1mexp(d_prev) + log_g;
  const double w0 = std::exp(base);
  weights.resize(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const double a = thresholds[i];
    if (a <= 0.0) {
      weights[i] = w0;
    } else if (log_rg == kNegInf) {
      weights[i] = 0.0;
    } else {
      weights[i] = std::exp(base + a * log_rg);
    }
  }
}

// Derived statistics from the raw accumulators. The estimate is the
// stratified mean p * E[w | conditioned] + (1 - p) * E[w | rejected].
void finalize_joint_table(JointTailTable& table, const JointTailOptions& options) {
  double p_cond = 1.0;
  double p_cond_var = 0.0;
  if (table.two_stage) {
    p_cond = static_cast<double>(table.envs_used) / static_cast<double>(table.attempts);
    p_cond_var = p_cond * (1.0 - p_cond) / static_cast<double>(table.attempts);
  }
  table.p_condition = p_cond;
  table.p_condition_stderr = std::sqrt(p_cond_var);

  const double dn = static_cast<double>(table.envs_used);
  const double dr = static_cast<double>(table.rejected_evaluated);
  for (auto& row : table.rows) {
    const double mean_w = row.sum_w / dn;
    double var_w = (row.sum_w2 - dn * mean_w * mean_w) / std::max(dn - 1.0, 1.0);
    if (var_w < 0.0) var_w = 0.0;
    const double se_w2 = var_w / dn;

    double mean_rej = 0.0;
    double se_rej2 = 0.0;
    if (dr > 0.0) {
      mean_rej = row.sum_rej_w / dr;
      double var_rej = (row.sum_rej_w2 - dr * mean_rej * mean_rej) /
                       std::max(dr - 1.0, 1.0);
      if (var_rej < 0.0) var_rej = 0.0;
      se_rej2 = var_rej / dr;
    }

    row.estimate = p_cond * mean_w + (1.0 - p_cond) * mean_rej;
    const double diff = mean_w - mean_rej;
    const double var = p_cond * p_cond * se_w2 +
                       (1.0 - p_cond) * (1.0 - p_cond) * se_rej2 +
                       diff * diff * p_cond_var;
    row.stderr_ = std::sqrt(var);
    row.ci_low = row.estimate - kZ95Joint * row.stderr_;
    row.ci_high = row.estimate + kZ95Joint * row.stderr_;
    row.ess = row.sum_w2 > 0.0 ? row.sum_w * row.sum_w / row.sum_w2 : 0.0;
    row.low_ess = row.ess < options.min_ess;
  }
}

}  // namespace

JointTailTable annealed_joint_tail_estimate(const EnvironmentLaw& law, int n,
                                            std::span<const double> thresholds,
                                            std::int64_t n_envs, Rng& rng,
                                            const JointTailOptions& options) {
  if (n < 1) throw std::invalid_argument("annealed_joint_tail_estimate: n >= 1");
  if (thresholds.empty()) {
    throw std::invalid_argument("annealed_joint_tail_estimate: empty threshold list");
  }
  if (options.rejected_subsample < 1) {
    throw std::invalid_argument("annealed_joint_tail_estimate: bad subsample rate");
  }
  JointTailTable table;
  table.n = n;
  table.two_stage = options.two_stage;
  table.rows.resize(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    table.rows[i].threshold = thresholds[i];
  }

  const std::size_t m = thresholds.size();
  std::vector<double> prefix(static_cast<std::size_t>(n));
  std::vector<double> weights;
  std::int64_t used = 0;
  std::int64_t rejected_seen = 0;
  while (used < n_envs) {
    ++table.attempts;
    // Environment prefix X_1..X_{n-1}; in two-stage mode reject on a strict
    // descent of the walk before n-1 (the conditioning event {T- > n-1}).
    double s = 0.0;
    double log_a_prev = 0.0;
    int descent_at = 0;
    for (int k = 1; k <= n - 1; ++k) {
      const double x = env_laws::sample_increment(law, rng);
      prefix[static_cast<std::size_t>(k - 1)] = x;
      s += x;
      if (options.two_stage && sum_strictly_negative(s)) {
        descent_at = k;
        break;
      }
      const double gap = -s - log_a_prev;
      if (gap >= -46.0) log_a_prev = logaddexp(log_a_prev, -s);
    }
    if (descent_at > 0) {
      ++rejected_seen;
      if (rejected_seen % options.rejected_subsample != 0) continue;
      // Complete the environment and score the complement stratum.
      for (int k = descent_at + 1; k <= n - 1; ++k) {
        const double x = env_laws::sample_increment(law, rng);
        prefix[static_cast<std::size_t>(k - 1)] = x;
        s += x;
      }
      double log_a = 0.0;
      double run = 0.0;
      for (int k = 1; k <= n - 1; ++k) {
        run += prefix[static_cast<std::size_t>(k - 1)];
        const double gap = -run - log_a;
        if (gap >= -46.0) log_a = logaddexp(log_a, -run);
      }
      const double x_n = env_laws::sample_increment(law, rng);
      score_environment(log_a, s, x_n, thresholds, weights);
      ++table.rejected_evaluated;
      for (std::size_t i = 0; i < m; ++i) {
        table.rows[i].sum_rej_w += weights[i];
        table.rows[i].sum_rej_w2 += weights[i] * weights[i];
      }
      continue;
    }
    ++used;
    const double x_n = env_laws::sample_increment(law, rng);
    score_environment(log_a_prev, s, x_n, thresholds, weights);
    const double w0 = weights[0];
    for (std::size_t i = 0; i < m; ++i) {
      table.rows[i].sum_w += weights[i];
      table.rows[i].sum_w2 += weights[i] * weights[i];
      table.rows[i].sum_w_w0 += weights[i] * w0;
    }
  }
  table.envs_used = used;
  finalize_joint_table(table, options);
  return table;
}

JointTailTable merge_joint_tables(std::span<const JointTailTable> parts,
                                  const JointTailOptions& options) {
  if (parts.empty()) throw std::invalid_argument("merge_joint_tables: no tables");
  JointTailTable merged = parts.front();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const auto& part = parts[p];
    if (part.n != merged.n || part.two_stage != merged.two_stage ||
        part.rows.size() != merged.rows.size()) {
      throw std::invalid_argument("merge_joint_tables: incompatible tables");
    }
    merged.attempts += part.attempts;
    merged.envs_used += part.envs_used;
    merged.rejected_evaluated += part.rejected_evaluated;
    for (std::size_t i = 0; i < merged.rows.size(); ++i) {
      merged.rows[i].sum_w += part.rows[i].sum_w;
      merged.rows[i].sum_w2 += part.rows[i].sum_w2;
      merged.rows[i].sum_w_w0 += part.rows[i].sum_w_w0;
      merged.rows[i].sum_rej_w += part.rows[i].sum_rej_w;
      merged.rows[i].sum_rej_w2 += part.rows[i].sum_rej_w2;
    }
  }
  finalize_joint_table(merged, options);
  return merged;
}

JointTailTable annealed_joint_estimate(const EnvironmentLaw& law, int n,
                                       std::span<const double> x_list,
                                       std::int64_t n_envs, Rng& rng,
                                       const JointTailOptions& options) {
  const double cn = env_laws::stable_norming_cn(law, n);
  std::vector<double> thresholds;
  thresholds.reserve(x_list.size());
  for (const double x : x_list) {
    if (x < 0.0) throw std::invalid_argument("annealed_joint_estimate: x >= 0 required");
    thresholds.push_back(x == 0.0 ? 0.0 : std::ceil(std::exp(x * cn)));
  }
  JointTailTable table =
      annealed_joint_tail_estimate(law, n, thresholds, n_envs, rng, options);
  table.cn = cn;
  for (std::size_t i = 0; i < x_list.size(); ++i) {
    table.rows[i].x = x_list[i];
  }
  return table;
}

}  // namespace bprelab::bpre
