#include <benchmark/benchmark.h>

#include <cmath>

#include "qmkdv/diagnostics.hpp"
#include "qmkdv/integrator.hpp"
#include "qmkdv/littlewood_paley.hpp"
#include "qmkdv/model.hpp"
#include "qmkdv/oscillatory.hpp"

using namespace qmkdv;

namespace {

SpectralField packet(std::size_t n, double L) {
  auto f = SpectralField::from_function(GridSpec(n, L), [](double x) { return 0.02 * std::exp(-x * x / 16.0) * std::sin(x); });
  remove_mean(f);
  return f;
}

void BM_Transform(benchmark::State& state) {
  const auto f = packet(static_cast<std::size_t>(state.range(0)), 400.0);
  for (auto _ : state) benchmark::DoNotOptimize(f.to_physical());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Transform)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_Nonlinearity(benchmark::State& state) {
  const auto f = packet(static_cast<std::size_t>(state.range(0)), 400.0);
  const auto c = CoefficientSpec::linear(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(nonlinearity_full(f, c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Nonlinearity)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_LawsonStep(benchmark::State& state) {
  SimConfig cfg;
  cfg.grid = GridSpec(static_cast<std::size_t>(state.range(0)), 400.0);
  const auto f = packet(cfg.grid.n(), cfg.grid.length());
  for (auto _ : state) benchmark::DoNotOptimize(lawson_rk4(f, 0.01, cfg));
}
BENCHMARK(BM_LawsonStep)->Arg(4096)->Arg(16384);

void BM_Energy(benchmark::State& state) {
  const auto f = packet(16384, 16384.0);
  const BootstrapConstants k;
  const auto c = CoefficientSpec::linear(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(energy(f, 10.0, c, k));
}
BENCHMARK(BM_Energy);

void BM_SInftyDyadic(benchmark::State& state) {
  const auto m = dyadic_symbol(0, 0, 0, 1.0, DyadicSymbol::T1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s_infty_norm(m, SInftyOptions{1}));
}
BENCHMARK(BM_SInftyDyadic)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Trilinear(benchmark::State& state) {
  const auto s = decay_region_setup(DecayRegion::ResonantOverlap);
  for (auto _ : state) benchmark::DoNotOptimize(trilinear_integral(s, 16.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Trilinear)->Arg(128)->Arg(256);

void BM_TwoPiIdentity(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(two_pi_identity(static_cast<double>(state.range(0))));
}
BENCHMARK(BM_TwoPiIdentity)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
