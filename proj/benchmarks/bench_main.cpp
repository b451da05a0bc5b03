#include <benchmark/benchmark.h>

#include "torus3/equation.hpp"
#include "torus3/gauge.hpp"
#include "torus3/solver.hpp"
#include "torus3/spectral.hpp"

using namespace torus3;

namespace {

TorusFunction positive_probe(std::size_t n) { return random_probes(1, 5, n, ProbeSign::Positive).front(); }

void BM_Multiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = positive_probe(n), g = random_probes(1, 6, n).front();
  for (auto _ : state) benchmark::DoNotOptimize(multiply(f, g));
}
BENCHMARK(BM_Multiply)->RangeMultiplier(2)->Range(64, 1024);

void BM_EvalF(benchmark::State& state) {
  const auto eq = catalog_entry("k22").equation();
  const auto f = positive_probe(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eval_F(eq, f, 0.0));
}
BENCHMARK(BM_EvalF)->RangeMultiplier(2)->Range(64, 1024);

// One record interval of KdV-Burgers; the dispersive guard sets the substep count.
void BM_Etdrk4Interval(benchmark::State& state) {
  const auto eq = catalog_entry("kdv_burgers").equation();
  const auto f = random_probes(1, 7, static_cast<std::size_t>(state.range(0))).front();
  SolveParams p;
  p.eps = 0.01;
  p.dt = 1e-4;
  p.t_end = 1e-4;
  p.record_energy = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve(eq, f, p));
}
BENCHMARK(BM_Etdrk4Interval)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

void BM_BuildGauge(benchmark::State& state) {
  const auto eq = catalog_entry("harry_dym").equation();
  const auto f = positive_probe(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_gauge(eq, f, 0.0, SobolevIndex(10.0)));
}
BENCHMARK(BM_BuildGauge)->RangeMultiplier(2)->Range(64, 1024);

}  // namespace
BENCHMARK_MAIN();
