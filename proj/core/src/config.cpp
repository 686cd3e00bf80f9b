#include <fstream>
#include <sstream>

#include "bprelab/experiments.hpp"
#include "bprelab/rng.hpp"
#include "json.hpp"

namespace bprelab::experiments {

namespace {

using nlohmann::json;

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

env_laws::EnvironmentLaw parse_law(const json& j, std::uint64_t seed) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "pareto2") {
    const double alpha = j.at("alpha").get<double>();
    const double p = j.value("p", 0.5);
    const double x_min = j.value("xmin", 1.0);
    if (!(alpha > 0.0 && alpha < 2.0)) {
      throw ConfigError("pareto2 law requires 0 < alpha < 2");
    }
    if (!(p > 0.0 && p < 1.0) || x_min <= 0.0) {
      throw ConfigError("pareto2 law requires 0 < p < 1 and xmin > 0");
    }
    auto law = env_laws::TwoSidedPareto::with_zero_mean(alpha, p, x_min);
    if (j.contains("centering")) law.centering = j.at("centering").get<double>();
    return law;
  }
  if (type == "two_point") {
    const double a = j.at("a").get<double>();
    const double w = j.at("w").get<double>();
    if (a <= 0.0 || w < 0.0 || w > 1.0) {
      throw ConfigError("two_point law requires a > 0 and w in [0,1]");
    }
    return env_laws::TwoPoint{a, w};
  }
  if (type == "uniform") {
    const double lo = j.at("lo").get<double>();
    const double hi = j.at("hi").get<double>();
    if (!(lo < hi)) throw ConfigError("uniform law requires lo < hi");
    return env_laws::BoundedUniform{lo, hi};
  }
  if (type == "stable") {
    env_laws::StabilityParams params;
    params.alpha = j.at("alpha").get<double>();
    params.beta = j.value("beta", 0.0);
    params.scale = j.value("scale", 1.0);
    if (!params.admissible()) throw ConfigError("stable law parameters not admissible");
    const auto draws = j.value("calibration_draws", static_cast<std::int64_t>(10'000'000));
    Rng rng = derive_rng(seed, 0xCA11B8A7Eull);
    return env_laws::ExactStable{params, env_laws::calibrate_stable(params, draws, rng)};
  }
  throw ConfigError("unknown law type: " + type);
}

std::string law_to_text(const json& j) {
  // Canonical compact rendering; nlohmann orders keys, so the text is stable.
  return j.dump();
}

void parse_theorem1(const json& j, Theorem1Config& c) {
  read_into(j, "n_grid", c.n_grid);
  read_into(j, "walk_samples", c.walk_samples);
  read_into(j, "direct_envs", c.direct_envs);
  read_into(j, "direct_max_n", c.direct_max_n);
  read_into(j, "conditioned_envs", c.conditioned_envs);
  read_into(j, "slope_tolerance", c.slope_tolerance);
  read_into(j, "ratio_tolerance", c.ratio_tolerance);
  read_into(j, "ratio_min_n", c.ratio_min_n);
  if (c.n_grid.empty()) throw ConfigError("theorem1.n_grid must be nonempty");
}

void parse_theorem3(const json& j, Theorem3Config& c) {
  read_into(j, "n", c.n);
  read_into(j, "x_grid", c.x_grid);
  read_into(j, "accepted_envs", c.accepted_envs);
  read_into(j, "meander_n", c.meander_n);
  read_into(j, "meander_samples", c.meander_samples);
  read_into(j, "ks_threshold", c.ks_threshold);
  read_into(j, "min_ess", c.min_ess);
  if (c.x_grid.empty()) throw ConfigError("theorem3.x_grid must be nonempty");
}

void parse_theorem5(const json& j, Theorem5Config& c) {
  read_into(j, "t_grid", c.t_grid);
  read_into(j, "window_x", c.window_x);
  read_into(j, "ks_threshold", c.ks_threshold);
  if (c.t_grid.empty() || c.t_grid.back() != 1.0) {
    throw ConfigError("theorem5.t_grid must be nonempty and end at 1");
  }
}

void parse_overshoot(const json& j, OvershootConfig& c) {
  read_into(j, "n_grid", c.n_grid);
  read_into(j, "u_grid", c.u_grid);
  read_into(j, "v_grid", c.v_grid);
  read_into(j, "walk_attempts", c.walk_attempts);
  read_into(j, "meander_n", c.meander_n);
  read_into(j, "meander_samples", c.meander_samples);
  read_into(j, "ase_tolerance", c.ase_tolerance);
  read_into(j, "ase_min_samples", c.ase_min_samples);
  if (c.n_grid.empty() || c.u_grid.empty() || c.v_grid.empty()) {
    throw ConfigError("overshoot grids must be nonempty");
  }
}

void parse_contrast(const json& j, ContrastConfig& c) {
  if (j.contains("uniform")) {
    c.uniform.lo = j.at("uniform").value("lo", -1.0);
    c.uniform.hi = j.at("uniform").value("hi", 1.0);
    if (!(c.uniform.lo < c.uniform.hi)) throw ConfigError("contrast.uniform needs lo < hi");
  }
  read_into(j, "n_grid", c.n_grid);
  read_into(j, "thresholds", c.thresholds);
  read_into(j, "heavy_x", c.heavy_x);
  read_into(j, "envs", c.envs);
  read_into(j, "bounded_threshold", c.bounded_threshold);
  read_into(j, "heavy_floor", c.heavy_floor);
  if (c.n_grid.empty() || c.thresholds.empty()) {
    throw ConfigError("contrast grids must be nonempty");
  }
}

void parse_rwre(const json& j, RwreConfig& c) {
  read_into(j, "identity_excursions", c.identity_excursions);
  read_into(j, "identity_step_cap", c.identity_step_cap);
  read_into(j, "histogram_excursions", c.histogram_excursions);
  read_into(j, "histogram_step_cap", c.histogram_step_cap);
  read_into(j, "max_level", c.max_level);
  read_into(j, "reference_envs", c.reference_envs);
  read_into(j, "bridge_env_seed", c.bridge_env_seed);
  read_into(j, "bridge_excursions", c.bridge_excursions);
  read_into(j, "bridge_population_runs", c.bridge_population_runs);
  read_into(j, "bridge_max_t", c.bridge_max_t);
  read_into(j, "bridge_step_cap", c.bridge_step_cap);
  read_into(j, "t4_levels", c.t4_levels);
  read_into(j, "t4_x", c.t4_x);
  read_into(j, "t4_t", c.t4_t);
  read_into(j, "t4_step_cap", c.t4_step_cap);
  read_into(j, "dump_excursions", c.dump_excursions);
  read_into(j, "dump_count", c.dump_count);
  if (c.t4_levels.empty() || c.t4_x.empty() || c.t4_t.empty()) {
    throw ConfigError("rwre theorem-4 grids must be nonempty");
  }
}

void parse_oracle(const json& j, OracleConfig& c) {
  if (j.contains("law")) {
    c.law.a = j.at("law").value("a", c.law.a);
    c.law.w = j.at("law").value("w", c.law.w);
    if (c.law.a <= 0.0 || c.law.w < 0.0 || c.law.w > 1.0) {
      throw ConfigError("oracle.law requires a > 0 and w in [0,1]");
    }
  }
  read_into(j, "n_max", c.n_max);
  read_into(j, "env_samples", c.env_samples);
  read_into(j, "population_runs", c.population_runs);
  read_into(j, "identity_envs", c.identity_envs);
  read_into(j, "identity_length", c.identity_length);
  read_into(j, "dump_populations", c.dump_populations);
  read_into(j, "dump_count", c.dump_count);
  if (c.n_max < 1 || c.n_max > 20) throw ConfigError("oracle.n_max must be in [1,20]");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    ExperimentConfig config;
    if (j.contains("seed")) {
      config.seed = j.at("seed").get<std::uint64_t>();
      config.seed_set = true;
    }
    read_into(j, "replicas", config.replicas);
    if (config.replicas < 1) throw ConfigError("replicas must be >= 1");
    if (j.contains("law")) {
      config.law = parse_law(j.at("law"), config.seed);
      config.law_text = law_to_text(j.at("law"));
    } else {
      config.law_text = R"({"alpha":1.5,"p":0.5,"type":"pareto2","xmin":1.0})";
    }
    if (j.contains("theorem1")) parse_theorem1(j.at("theorem1"), config.theorem1);
    if (j.contains("theorem3")) parse_theorem3(j.at("theorem3"), config.theorem3);
    if (j.contains("theorem5")) parse_theorem5(j.at("theorem5"), config.theorem5);
    if (j.contains("overshoot")) parse_overshoot(j.at("overshoot"), config.overshoot);
    if (j.contains("contrast")) parse_contrast(j.at("contrast"), config.contrast);
    if (j.contains("rwre")) parse_rwre(j.at("rwre"), config.rwre);
    if (j.contains("oracle")) parse_oracle(j.at("oracle"), config.oracle);
    return config;
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace bprelab::experiments
