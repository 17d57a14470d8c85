#include "effeq/resonance.hpp"

#include <benchmark/benchmark.h>

using namespace effeq;

static void BM_NlsQuadruples2d(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  std::size_t n = 0;
  for (auto _ : state) {
    auto t = enumerate_nls_quadruples(2, K);
    n = t.size();
    benchmark::DoNotOptimize(t.data());
  }
  state.counters["tuples"] = static_cast<double>(n);
}
BENCHMARK(BM_NlsQuadruples2d)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_ChmTriads(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_chm_triads(Rational(1), Rational(0), K));
}
BENCHMARK(BM_ChmTriads)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_ExceptionalSet(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exceptional_rhos(Rational(0), K));
}
BENCHMARK(BM_ExceptionalSet)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Clusters2dNls(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto tuples = enumerate_nls_quadruples(2, K);
  const LatticeBox box(2, K);
  for (auto _ : state) benchmark::DoNotOptimize(clusters(tuples, box));
}
BENCHMARK(BM_Clusters2dNls)->Arg(8)->Unit(benchmark::kMillisecond);
