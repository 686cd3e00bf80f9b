#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "bprelab/bpre.hpp"
#include "bprelab/env_laws.hpp"
#include "bprelab/random_walk.hpp"
#include "bprelab/rng.hpp"
#include "bprelab/rwre.hpp"

using namespace bprelab;

namespace {

const env_laws::EnvironmentLaw kPareto = env_laws::TwoSidedPareto{1.5, 0.5, 1.0, 0.0};

void BM_SampleParetoIncrement(benchmark::State& state) {
  Rng rng = derive_rng(1, 1);
  double acc = 0.0;
  for (auto _ : state) {
    acc += env_laws::sample_increment(kPareto, rng);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_SampleParetoIncrement);

void BM_EnvironmentBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng = derive_rng(1, 2);
  std::vector<double> increments(static_cast<std::size_t>(n));
  for (auto& x : increments) x = env_laws::sample_increment(kPareto, rng);
  for (auto _ : state) {
    bpre::GeometricEnvironment env(increments);
    benchmark::DoNotOptimize(env.log_a(n));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EnvironmentBuild)->Arg(100)->Arg(1000);

void BM_QuenchedJointTail(benchmark::State& state) {
  Rng rng = derive_rng(1, 3);
  std::vector<double> increments(500);
  for (auto& x : increments) x = env_laws::sample_increment(kPareto, rng);
  const bpre::GeometricEnvironment env(increments);
  double acc = 0.0;
  for (auto _ : state) {
    acc += bpre::quenched_joint_tail(env, 500, 1e6);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_QuenchedJointTail);

void BM_MeanderAttempts(benchmark::State& state) {
  // Cost of the rejection loop behind one accepted meander sample.
  random_walk::MeanderOptions options;
  options.n = static_cast<int>(state.range(0));
  options.t_grid = {1.0};
  Rng rng = derive_rng(1, 4);
  for (auto _ : state) {
    const auto batch = random_walk::sample_meanders(kPareto, options, 1, rng);
    benchmark::DoNotOptimize(batch.samples.front().endpoint);
  }
}
BENCHMARK(BM_MeanderAttempts)->Arg(200)->Arg(1000);

void BM_Excursion(benchmark::State& state) {
  Rng rng = derive_rng(1, 5);
  for (auto _ : state) {
    const rwre::RwreEnvironment env(kPareto, rng());
    const auto exc = rwre::simulate_excursion(env, rng, 100'000);
    benchmark::DoNotOptimize(exc.chi);
  }
}
BENCHMARK(BM_Excursion);

void BM_OffspringTotalLarge(benchmark::State& state) {
  Rng rng = derive_rng(1, 6);
  const bpre::OffspringLaw law = bpre::GeometricOffspring{0.3};
  std::uint64_t acc = 0;
  for (auto _ : state) {
    acc += bpre::sample_offspring_total(law, 1'000'000, rng, 1ull << 62);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_OffspringTotalLarge);

}  // namespace

BENCHMARK_MAIN();
