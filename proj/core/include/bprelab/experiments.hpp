#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bprelab/env_laws.hpp"

namespace bprelab::experiments {

struct Theorem1Config {
  std::vector<int> n_grid = {50, 100, 200, 400, 800};
  std::int64_t walk_samples = 4'000'000;    // direct T- counting
  std::int64_t direct_envs = 200'000;       // plain Rao-Blackwell column
  int direct_max_n = 200;
  std::int64_t conditioned_envs = 200'000;  // accepted environments per n
  double slope_tolerance = 0.15;
  double ratio_tolerance = 0.10;
  int ratio_min_n = 200;
};

struct Theorem3Config {
  int n = 500;
  std::vector<double> x_grid = {0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  std::int64_t accepted_envs = 2'000'000;
  int meander_n = 2000;
  std::int64_t meander_samples = 40'000;
  double ks_threshold = 0.08;
  double min_ess = 1000.0;
};

struct Theorem5Config {
  std::vector<double> t_grid = {0.25, 0.5, 1.0};  // must end at 1
  std::vector<double> window_x = {0.4, 0.2, 0.1};
  double ks_threshold = 0.10;
};

struct OvershootConfig {
  std::vector<int> n_grid = {200, 400};
  std::vector<double> u_grid = {0.5, 1.0, 2.0};
  std::vector<double> v_grid = {0.5, 1.0, 2.0};
  std::int64_t walk_attempts = 20'000'000;
  int meander_n = 2000;
  std::int64_t meander_samples = 40'000;
  double ase_tolerance = 0.10;     // relative, on E[endpoint^-alpha]
  std::int64_t ase_min_samples = 5'000;
};

struct ContrastConfig {
  env_laws::BoundedUniform uniform{-1.0, 1.0};
  std::vector<int> n_grid = {100, 200, 400};
  std::vector<double> thresholds = {10.0, 100.0, 1000.0};
  double heavy_x = 0.5;            // heavy-law threshold exponent e^{x c_n}
  std::int64_t envs = 1'000'000;   // single-stage environments per (law, n)
  double bounded_threshold = 0.05; // P(Z > 1000 | T = n) must stay below
  double heavy_floor = 0.10;       // heavy-law scaled tail must stay above
};

struct RwreConfig {
  std::int64_t identity_excursions = 12'000;
  std::uint64_t identity_step_cap = 2'000'000;
  std::int64_t histogram_excursions = 1'000'000;
  std::uint64_t histogram_step_cap = 100'000;
  int max_level = 8;
  std::int64_t reference_envs = 1'000'000;
  std::uint64_t bridge_env_seed = 7;
  std::int64_t bridge_excursions = 1'000'000;
  std::int64_t bridge_population_runs = 1'000'000;
  int bridge_max_t = 6;
  std::uint64_t bridge_step_cap = 1'000'000;
  std::vector<int> t4_levels = {4, 6, 8};
  std::vector<double> t4_x = {0.25, 0.5, 1.0};
  std::vector<double> t4_t = {0.5, 1.0};
  std::uint64_t t4_step_cap = 300'000;
  bool dump_excursions = false;
  int dump_count = 3;
};

struct OracleConfig {
  env_laws::TwoPoint law{0.6931471805599453, 0.5};  // +-log 2, fair environment
  int n_max = 12;
  std::int64_t env_samples = 1'000'000;
  std::int64_t population_runs = 1'000'000;
  int identity_envs = 1000;
  int identity_length = 1000;
  bool dump_populations = false;
  int dump_count = 5;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  bool seed_set = false;
  int replicas = 4;
  env_laws::EnvironmentLaw law = env_laws::TwoSidedPareto{1.5, 0.5, 1.0, 0.0};
  std::string law_text;

  Theorem1Config theorem1;
  Theorem3Config theorem3;
  Theorem5Config theorem5;
  OvershootConfig overshoot;
  ContrastConfig contrast;
  RwreConfig rwre;
  OracleConfig oracle;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses the JSON experiment configuration; throws ConfigError on missing
/// files, malformed JSON, unknown law types, or empty grids. The seed is
/// mandatory (there is no wall-clock fallback) but may instead be supplied
/// via the CLI override.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

/// One emitted table row. NaN key/value fields render as empty CSV cells.
struct ResultRow {
  std::string metric;
  double n = std::numeric_limits<double>::quiet_NaN();
  double x = std::numeric_limits<double>::quiet_NaN();
  double t = std::numeric_limits<double>::quiet_NaN();
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  double ess = std::numeric_limits<double>::quiet_NaN();
  double reference = std::numeric_limits<double>::quiet_NaN();
  std::string verdict;  // "", "pass", "fail"
};

struct ResultRecord {
  std::string experiment;
  std::uint64_t seed = 0;
  int replicas = 0;
  std::string law_text;
  std::vector<ResultRow> rows;
  std::vector<std::pair<std::string, bool>> verdicts;
  std::vector<std::pair<std::string, double>> thresholds;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;

  bool all_pass() const;
  void write_csv(std::ostream& os) const;
  void write_rows_json(std::ostream& os) const;
  /// Parameters, thresholds, verdicts, warnings, wall time.
  void write_summary_json(std::ostream& os) const;
};

ResultRecord exp_theorem1(const ExperimentConfig& config);
ResultRecord exp_theorem3(const ExperimentConfig& config);
ResultRecord exp_theorem5(const ExperimentConfig& config);
ResultRecord exp_overshoot(const ExperimentConfig& config);
ResultRecord exp_contrast(const ExperimentConfig& config);
ResultRecord exp_rwre(const ExperimentConfig& config);
ResultRecord exp_oracle(const ExperimentConfig& config);

/// Optional CSV dumps (excursion trajectories, local-time profiles,
/// population trajectories) controlled by the config.
void write_rwre_dumps(const ExperimentConfig& config, const std::string& out_dir);
void write_population_dumps(const ExperimentConfig& config, const std::string& out_dir);

/// Entry point behind the `bprelab` binary: subcommands theorem1 | theorem3 |
/// theorem5 | overshoot | contrast | rwre | oracle with --config, --out,
/// --seed, --replicas, --format csv|json. Exit codes: 0 all verdicts pass,
/// 1 any verdict failed, 2 configuration or usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace bprelab::experiments
