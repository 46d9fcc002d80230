#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "nhmech/batch.hpp"
#include "oracles.hpp"

using namespace nhmech;

namespace {

const oracle::Builtin& system_at(int i) {
  static const std::vector<oracle::Builtin> systems = oracle::builtin_systems();
  return systems[static_cast<std::size_t>(i)];
}

std::vector<GroupoidElement> initial(const oracle::Builtin& b, int n) {
  std::mt19937_64 rng(1);
  std::vector<GroupoidElement> out;
  for (int i = 0; i < n; ++i) out.push_back(b.sample(rng));
  return out;
}

void BM_Step(benchmark::State& state) {
  const auto& b = system_at(static_cast<int>(state.range(0)));
  const GroupoidElement g = initial(b, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(step(b.problem, g));
  state.SetLabel(b.name);
}

void BM_EvolveManySerial(benchmark::State& state) {
  const auto& b = system_at(static_cast<int>(state.range(0)));
  const auto init = initial(b, 32);
  for (auto _ : state) benchmark::DoNotOptimize(batch::evolve_many_serial(b.problem, init, 50));
  state.SetLabel(b.name);
}

void BM_EvolveManyParallel(benchmark::State& state) {
  const auto& b = system_at(static_cast<int>(state.range(0)));
  const auto init = initial(b, 32);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(batch::evolve_many(b.problem, init, 50));
  state.SetLabel(b.name + " threads=" + std::to_string(state.range(1)));
}

void BM_RegularitySweep(benchmark::State& state) {
  const auto& b = system_at(static_cast<int>(state.range(0)));
  const auto pts = initial(b, 64);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(batch::regularity_sweep(b.problem, pts));
  state.SetLabel(b.name + " threads=" + std::to_string(state.range(1)));
}

}  // namespace

BENCHMARK(BM_Step)->DenseRange(0, 6)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EvolveManySerial)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvolveManyParallel)
    ->ArgsProduct({{2, 4, 6}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_RegularitySweep)->ArgsProduct({{4, 6}, {1, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
