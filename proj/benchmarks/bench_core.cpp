#include <benchmark/benchmark.h>

#include <cmath>

#include <kcross/crossings.hpp>
#include <kcross/design.hpp>
#include <kcross/montecarlo.hpp>
#include <kcross/quadrature.hpp>
#include <kcross/smoother.hpp>
#include <kcross/truth.hpp>

using namespace kcross;

namespace {

KernelSmoother smoother(int order, std::size_t n, double h) {
  return KernelSmoother(SmootherSpec(order, h, 1.0), regular_design(n, LimitDistribution::uniform()));
}

void BM_Integrate(benchmark::State& state) {
  const auto f = [](double t) { return std::exp(-t * t) * std::cos(7.0 * t); };
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, -3.0, 3.0, 1e-10).value);
}
BENCHMARK(BM_Integrate);

void BM_Moments(benchmark::State& state) {
  const auto sm = smoother(1, static_cast<std::size_t>(state.range(0)), 0.1);
  const Truth f = Truth::sine(0.3, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(sm.gp_moments(f).size());
}
BENCHMARK(BM_Moments)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ExpectedZeros(benchmark::State& state) {
  const auto sm = smoother(1, 1000, 0.1);
  const GPMoments mom = sm.gp_moments(Truth::sine(0.3, 1.5));
  CrossingOptions opt;
  for (auto _ : state) benchmark::DoNotOptimize(expected_zeros_alternate(mom, opt).expected_zeros);
}
BENCHMARK(BM_ExpectedZeros)->Unit(benchmark::kMillisecond);

void BM_SimulateBatch(benchmark::State& state) {
  const auto sm = smoother(1, 1000, 0.1);
  const Truth f = Truth::sine(0.3, 1.5);
  SimOptions opt;
  opt.threads = 1;
  opt.auto_refine = false;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_crossings(sm, f, 0.1, 0.9, 32, 1, opt).mean_crossings);
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_SimulateBatch)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive carries LTO bytecode from another
// compiler release, so main is defined here.
BENCHMARK_MAIN();
