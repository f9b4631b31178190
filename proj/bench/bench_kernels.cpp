// Serial reference kernels against their OpenMP counterparts, plus SC pass
// scaling in n.

#include <benchmark/benchmark.h>

#include "polarmc/code_profile.hpp"
#include "polarmc/schemes.hpp"

using namespace polarmc;

namespace {

const StateChannelSpec& example2() {
  static const StateChannelSpec spec = make_example2(0.1, 0.5, 0.25);
  return spec;
}

void BM_EstimateSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_profile_serial(example2(), n, 200, 1));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_EstimateSerial)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_EstimateParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_profile(example2(), n, 200, 1, 0));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_EstimateParallel)->Arg(1024)->Unit(benchmark::kMillisecond)->UseRealTime();

CodeProfile bench_profile(std::size_t n) {
  return select_sets(estimate_profile(example2(), n, 500, 1), 0.9, 0.1);
}

void BM_TrialsSerial(benchmark::State& state) {
  const CodeProfile profile = bench_profile(static_cast<std::size_t>(state.range(0)));
  TrialSetup setup;
  setup.trials = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_trials_serial(profile, example2(), setup));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_TrialsSerial)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_TrialsParallel(benchmark::State& state) {
  const CodeProfile profile = bench_profile(static_cast<std::size_t>(state.range(0)));
  TrialSetup setup;
  setup.trials = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_trials(profile, example2(), setup));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_TrialsParallel)->Arg(1024)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_GridSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gp_capacity_grid_serial(example2(), 1e-3));
}
BENCHMARK(BM_GridSerial)->Unit(benchmark::kMillisecond);

void BM_GridParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gp_capacity_grid(example2(), 1e-3, 0));
}
BENCHMARK(BM_GridParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ScPass(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ScContext ctx(n, example2().channel_base());
  ScEngine engine(ctx);
  RngStream rng(1, StreamTag::kTest, 0);
  Observation obs{std::vector<std::uint32_t>(n)};
  for (auto& s : obs.symbols) s = rng.bit();
  const ScPolicy policy = ScPolicy::uniform(n, Rule::kArgmax);
  for (auto _ : state) benchmark::DoNotOptimize(engine.pass(obs, policy, nullptr));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ScPass)->RangeMultiplier(2)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_Transform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(1, StreamTag::kTest, 1);
  BitVec u(n);
  for (auto& b : u) b = rng.bit();
  for (auto _ : state) {
    polar_transform_inplace(u);
    benchmark::ClobberMemory();
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Transform)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

}  // namespace

BENCHMARK_MAIN();
