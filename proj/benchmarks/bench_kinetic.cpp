#include "effeq/kinetic.hpp"

#include <benchmark/benchmark.h>

using namespace effeq;

static void BM_CollisionIntegral(benchmark::State& state) {
  KineticParams p;
  p.dim = static_cast<int>(state.range(0));
  p.samples = 100'000;
  const auto n = Spectrum::power_law(1.0, -3.0, p.annulus);
  for (auto _ : state) benchmark::DoNotOptimize(collision_integral(n, radial_point(1.0), p));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * p.samples));
}
BENCHMARK(BM_CollisionIntegral)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_ScanCommonRandomNumbers(benchmark::State& state) {
  KineticParams p;
  p.samples = 100'000;
  std::vector<double> grid;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) grid.push_back(-4.0 + 3.0 * i / (state.range(0) - 1));
  for (auto _ : state) benchmark::DoNotOptimize(stationarity_scan(grid, p));
}
BENCHMARK(BM_ScanCommonRandomNumbers)->Arg(2)->Arg(16)->Arg(61)->Unit(benchmark::kMillisecond);
