#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bprelab/experiments.hpp"
#include "doctest.h"

using namespace bprelab::experiments;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"bprelab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bprelab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path path = dir / "config.json";
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kOracleConfig = R"({
  "seed": 99,
  "replicas": 2,
  "law": {"type": "pareto2", "alpha": 1.5, "p": 0.5, "xmin": 1.0},
  "oracle": {
    "law": {"a": 0.6931471805599453, "w": 0.5},
    "n_max": 6,
    "env_samples": 40000,
    "population_runs": 40000,
    "identity_envs": 50,
    "identity_length": 200
  }
})";

}  // namespace

TEST_CASE("config parsing: laws, defaults, and failure modes") {
  const auto config = parse_config(kOracleConfig);
  CHECK(config.seed == 99);
  CHECK(config.seed_set);
  CHECK(config.replicas == 2);
  CHECK(config.oracle.n_max == 6);
  CHECK(std::holds_alternative<bprelab::env_laws::TwoSidedPareto>(config.law));

  const auto defaults = parse_config("{}");
  CHECK_FALSE(defaults.seed_set);
  CHECK(defaults.theorem1.n_grid.size() == 5);

  CHECK_THROWS_AS(parse_config("{nope"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"law": {"type": "cauchy"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"law": {"type": "pareto2", "alpha": 2.5}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"theorem1": {"n_grid": []}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"replicas": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"theorem5": {"t_grid": [0.5]}})"), ConfigError);

  const auto uniform = parse_config(R"({"law": {"type": "uniform", "lo": -2, "hi": 2}})");
  CHECK(std::holds_alternative<bprelab::env_laws::BoundedUniform>(uniform.law));
  const auto two_point = parse_config(R"({"law": {"type": "two_point", "a": 1.0, "w": 0.4}})");
  CHECK(std::holds_alternative<bprelab::env_laws::TwoPoint>(two_point.law));
}

TEST_CASE("cli: usage and configuration errors exit with code 2") {
  CHECK(run({}) == 2);                                    // no subcommand
  CHECK(run({"bogus"}) == 2);                             // unknown subcommand
  CHECK(run({"oracle"}) == 2);                            // missing --config
  CHECK(run({"oracle", "--config", "/nonexistent.json"}) == 2);

  const auto dir = scratch_dir("badcfg");
  const auto bad = write_config(dir, "{not json");
  CHECK(run({"oracle", "--config", bad.string()}) == 2);

  // A config without a seed is refused unless --seed is given.
  const auto seedless = write_config(dir, R"({"oracle": {"n_max": 3,
    "env_samples": 2000, "population_runs": 2000,
    "identity_envs": 5, "identity_length": 50}})");
  CHECK(run({"oracle", "--config", seedless.string(), "--out",
             (dir / "out").string()}) == 2);
  CHECK(run({"oracle", "--config", seedless.string(), "--seed", "5", "--out",
             (dir / "out").string()}) == 0);
}

TEST_CASE("cli: oracle subcommand passes and emits well-formed tables") {
  const auto dir = scratch_dir("oracle");
  const auto cfg = write_config(dir, kOracleConfig);
  const auto out = dir / "out";
  CHECK(run({"oracle", "--config", cfg.string(), "--out", out.string()}) == 0);

  const std::string csv = slurp(out / "oracle.csv");
  CHECK(csv.rfind("metric,n,x,t,estimate,stderr,ci_low,ci_high,ess,reference,verdict\n",
                  0) == 0);
  // Every probability row carries an estimate in [0, 1] inside its CI.
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 10);
    if (cells[0] == "rao_blackwell_extinction" || cells[0] == "population_extinction") {
      const double estimate = std::stod(cells[4]);
      const double lo = std::stod(cells[6]);
      const double hi = std::stod(cells[7]);
      CHECK(estimate >= 0.0);
      CHECK(estimate <= 1.0);
      CHECK(lo <= estimate);
      CHECK(estimate <= hi);
    }
  }
  CHECK(rows >= 14);

  const std::string summary = slurp(out / "oracle_summary.json");
  CHECK(summary.find("\"all_pass\": true") != std::string::npos);
}

TEST_CASE("cli: identical (config, seed, replicas) give identical bytes") {
  const auto dir = scratch_dir("determinism");
  const auto cfg = write_config(dir, kOracleConfig);
  const auto out1 = dir / "out1";
  const auto out2 = dir / "out2";
  CHECK(run({"oracle", "--config", cfg.string(), "--out", out1.string()}) == 0);
  CHECK(run({"oracle", "--config", cfg.string(), "--out", out2.string()}) == 0);
  CHECK(slurp(out1 / "oracle.csv") == slurp(out2 / "oracle.csv"));

  // A different seed changes the table; a different replica count also may.
  const auto out3 = dir / "out3";
  CHECK(run({"oracle", "--config", cfg.string(), "--seed", "123", "--out",
             out3.string()}) == 0);
  CHECK(slurp(out1 / "oracle.csv") != slurp(out3 / "oracle.csv"));
}

TEST_CASE("cli: json row format") {
  const auto dir = scratch_dir("jsonfmt");
  const auto cfg = write_config(dir, kOracleConfig);
  const auto out = dir / "out";
  CHECK(run({"oracle", "--config", cfg.string(), "--out", out.string(),
             "--format", "json"}) == 0);
  const std::string rows = slurp(out / "oracle.json");
  CHECK(rows.find("\"metric\": \"rao_blackwell_extinction\"") != std::string::npos);
  CHECK(run({"oracle", "--config", cfg.string(), "--format", "yaml"}) == 2);
}

TEST_CASE("cli: failing verdicts exit with code 1") {
  const auto dir = scratch_dir("fail");
  // A heavy floor above 1 cannot be met by any probability.
  const auto cfg = write_config(dir, R"({
    "seed": 7,
    "replicas": 1,
    "law": {"type": "pareto2", "alpha": 1.5, "p": 0.5, "xmin": 1.0},
    "contrast": {
      "n_grid": [20],
      "thresholds": [5, 50],
      "heavy_x": 0.5,
      "envs": 20000,
      "heavy_floor": 1.1
    }
  })");
  CHECK(run({"contrast", "--config", cfg.string(), "--out",
             (dir / "out").string()}) == 1);
}

TEST_CASE("cli: population dumps are written when requested") {
  const auto dir = scratch_dir("dumps");
  const auto cfg = write_config(dir, R"({
    "seed": 11,
    "replicas": 1,
    "oracle": {
      "n_max": 4,
      "env_samples": 5000,
      "population_runs": 5000,
      "identity_envs": 10,
      "identity_length": 50,
      "dump_populations": true,
      "dump_count": 3
    }
  })");
  const auto out = dir / "out";
  CHECK(run({"oracle", "--config", cfg.string(), "--out", out.string()}) == 0);
  const std::string dump = slurp(out / "oracle_populations.csv");
  CHECK(dump.rfind("replica,generation,Z\n", 0) == 0);
  CHECK(dump.find("0,0,1") != std::string::npos);
}
