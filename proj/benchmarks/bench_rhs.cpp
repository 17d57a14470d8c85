#include "effeq/integrate.hpp"
#include "effeq/resonance.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace effeq;

namespace {

ComplexVector random_amplitudes(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  ComplexVector a(n);
  for (auto& z : a) z = {g(rng), g(rng)};
  return a;
}

}  // namespace

static void BM_NlsFullNonlinearity(benchmark::State& state) {
  const auto p = make_params(NlsModel{2, Rational(1), 1.0}, static_cast<int>(state.range(0)), 0.01, {}, {});
  const auto a = random_amplitudes(p.box().size());
  for (auto _ : state) benchmark::DoNotOptimize(nonlinearity(a, p));
}
BENCHMARK(BM_NlsFullNonlinearity)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

static void BM_NlsEffectiveNonlinearity(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto p = make_params(NlsModel{2, Rational(1), 1.0}, K, 0.01, {}, {});
  const EffectiveNonlinearity eff(p, enumerate_nls_quadruples(2, K));
  const auto a = random_amplitudes(p.box().size());
  for (auto _ : state) benchmark::DoNotOptimize(eff(a));
}
BENCHMARK(BM_NlsEffectiveNonlinearity)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

static void BM_ChmEffectiveNonlinearity(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto p = make_params(ChmModel{Rational(1), Rational(0)}, K, 0.01, {}, {});
  const EffectiveNonlinearity eff(p, active_tuples(enumerate_chm_triads(Rational(1), Rational(0), K)));
  auto s = FieldState(p.box(), true);
  s.amp = random_amplitudes(p.box().size());
  s.enforce_reality();
  for (auto _ : state) benchmark::DoNotOptimize(eff(s.amp));
}
BENCHMARK(BM_ChmEffectiveNonlinearity)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

static void BM_SplittingStep(benchmark::State& state) {
  const auto p = make_params(NlsModel{2, Rational(1), 0.5}, 2, 0.01, {1.0, 0.0}, {0.5, 0.0}, 1);
  const auto sys = effective_system(p, EffectiveNonlinearity(p, enumerate_nls_quadruples(2, 2)));
  auto u = random_amplitudes(p.box().size());
  std::uint64_t i = 0;
  for (auto _ : state) {
    step(sys, Scheme::Splitting, u, 0.0, 0.01, i++, {});
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(BM_SplittingStep)->Unit(benchmark::kMicrosecond);
