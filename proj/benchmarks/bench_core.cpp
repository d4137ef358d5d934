#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "bilap/sampling.hpp"
#include "bilap/solve.hpp"

using namespace bilap;

namespace {

GridPtr grid(std::size_t M) {
  return RadialGrid::build(DimensionContext::make(5), 1e-4, 50, M, Spacing::logarithmic);
}

void BM_Laplacian(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const auto u = sampling::random_bump_field(*g, 1, 1, 0);
  std::vector<long double> out(g->size());
  for (auto _ : state) {
    g->laplacian_ld(u, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Laplacian)->RangeMultiplier(4)->Range(256, 16384);

void BM_EnergyGradient(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const EnergyFunctional fn(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(4));
  const auto u = sampling::random_bump_field(*g, 1, 1, 0);
  fn.riesz(u);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fn.energy(u).total);
    benchmark::DoNotOptimize(fn.gradient(u).residual_hv);
  }
}
BENCHMARK(BM_EnergyGradient)->RangeMultiplier(4)->Range(256, 16384);

void BM_RieszSolve(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const EnergyFunctional fn(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(4));
  const auto e = sampling::random_bump_field(*g, 1, 1, 0);
  fn.riesz(e);
  for (auto _ : state) benchmark::DoNotOptimize(fn.riesz(e).data());
}
BENCHMARK(BM_RieszSolve)->RangeMultiplier(4)->Range(256, 16384);

void BM_Minimize(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const EnergyFunctional fn(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(1.5));
  for (auto _ : state) benchmark::DoNotOptimize(minimize(fn, SolverConfig{}).energy.total);
}
BENCHMARK(BM_Minimize)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_MountainPass(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const EnergyFunctional fn(g, PotentialSpec::power_law(0), NonlinearitySpec::pure_power(4));
  SolverConfig cfg;
  cfg.grad_tol = 1e-5;
  for (auto _ : state) benchmark::DoNotOptimize(mountain_pass(fn, cfg).energy.total);
}
BENCHMARK(BM_MountainPass)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
