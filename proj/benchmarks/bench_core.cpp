#include <random>

#include <benchmark/benchmark.h>

#include "nfr/amc.hpp"
#include "nfr/config.hpp"
#include "nfr/decomposition.hpp"
#include "nfr/lp_build.hpp"
#include "nfr/sim.hpp"
#include "nfr/simplex.hpp"
#include "oracles.hpp"

namespace {

nfr::Scenario poisson_scenario(int k, int slots, bool positional) {
  nfr::ScenarioConfig c;
  c.items = k;
  c.slots = slots;
  c.quality = 0.9;
  c.cached = 2;
  c.seed = 11;
  if (positional) {
    c.clicks.kind = nfr::ClickSpec::Kind::Zipf;
    c.clicks.exponent = 1.0;
  }
  return nfr::build_instance(c).scenario;
}

void BM_Ltec(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto s = poisson_scenario(k, 2, false);
  const auto p = nfr::baseline_policy(s.similarity(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(nfr::ltec(p, s).ltec);
}
BENCHMARK(BM_Ltec)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_DenseSimplexUni(benchmark::State& state) {
  const auto s = poisson_scenario(static_cast<int>(state.range(0)), 2, false);
  const auto lp = nfr::build_op_uni(s);
  for (auto _ : state) benchmark::DoNotOptimize(nfr::solve_simplex(lp).objective);
}
BENCHMARK(BM_DenseSimplexUni)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Decomposition(benchmark::State& state) {
  const bool positional = state.range(1) != 0;
  const auto s = poisson_scenario(static_cast<int>(state.range(0)), 2, positional);
  for (auto _ : state) benchmark::DoNotOptimize(nfr::solve_decomposed(s, positional).objective);
}
BENCHMARK(BM_Decomposition)->Args({100, 0})->Args({100, 1})->Args({300, 0})->Unit(benchmark::kMillisecond);

void BM_RandomLp(benchmark::State& state) {
  std::mt19937_64 gen(1);
  const auto lp = oracle::random_lp(gen, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(nfr::solve_simplex(lp).objective);
}
BENCHMARK(BM_RandomLp)->Arg(8)->Arg(64);

void BM_Simulate(benchmark::State& state) {
  const auto s = poisson_scenario(100, 2, false);
  const auto p = nfr::baseline_policy(s.similarity(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(nfr::simulate(p, s, state.range(0), 5).empirical_cost_rate);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
