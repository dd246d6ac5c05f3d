#include <benchmark/benchmark.h>

#include "capflow/epsilon_solver.hpp"
#include "capflow/functional.hpp"
#include "capflow/identities.hpp"
#include "capflow/mass.hpp"

using namespace capflow;

static void BM_SolveRadial(benchmark::State& state) {
  const auto spec = MetricSpec::schwarzschild(1.0);
  const double p = state.range(0) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_radial(spec, p).capacity());
}
BENCHMARK(BM_SolveRadial)->Arg(15)->Arg(20)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_MonotonicityScan(benchmark::State& state) {
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.5);
  const auto grid = make_t_grid(pot.t_p(), 1000.0, int(state.range(0)), true);
  for (auto _ : state) benchmark::DoNotOptimize(monotonicity_scan(pot, grid).verdict.min_increment);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonotonicityScan)->Arg(40)->Arg(400);

static void BM_PenroseChain(benchmark::State& state) {
  const auto spec = MetricSpec::schwarzschild(1.0);
  const std::vector<double> ps{1.05, 1.1, 1.15, 1.2, 1.3, 1.5, 1.75, 2.0, 2.25, 2.5};
  for (auto _ : state) benchmark::DoNotOptimize(penrose_chain(spec, ps).passed());
}
BENCHMARK(BM_PenroseChain)->Unit(benchmark::kMillisecond);

static void BM_IdentitiesSymbolic(benchmark::State& state) {
  const auto pot = solve_radial(MetricSpec::schwarzschild(1.0), 2.5);
  const auto pts = random_points(1, 100, 0.6, 20.0);
  for (auto _ : state)
    for (const auto& x : pts) benchmark::DoNotOptimize(identities_at(pot, x).div_x.relative());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_IdentitiesSymbolic);

// Grid solve on the flat annulus 1 <= |x| <= 4; the argument is 1/h.
static void BM_SolveGrid(benchmark::State& state) {
  const auto spec = MetricSpec::flat(1.0);
  const auto pot = solve_radial(spec, 2.5);
  GridConfig cfg;
  cfg.spacing = 1.0 / double(state.range(0));
  const auto bc = OuterBoundary::oracle(pot, cfg.outer_radius);
  for (auto _ : state) benchmark::DoNotOptimize(solve_regularized(spec, 2.5, 1e-3, cfg, bc).log.sweeps);
}
BENCHMARK(BM_SolveGrid)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();
