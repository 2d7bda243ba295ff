#include <benchmark/benchmark.h>

#include "hmvp/operators.hpp"
#include "hmvp/polynomial.hpp"
#include "hmvp/solver.hpp"

namespace {

void BM_psi_mass(benchmark::State& state) {
  const auto rule = hmvp::build_rule(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(hmvp::psi_mass(rule));
  state.SetItemsProcessed(state.iterations() * rule.node_count());
}
BENCHMARK(BM_psi_mass)->Arg(1)->Arg(2);

void BM_weighted_ball_average(benchmark::State& state) {
  const auto rule = hmvp::build_rule(1, 0.3);
  const auto u = hmvp::builtin_field("heat-quartic");
  const hmvp::HPoint center(0.2, -0.1, 0.05);
  for (auto _ : state)
    benchmark::DoNotOptimize(hmvp::weighted_ball_average(
        [&](const hmvp::HPoint& y) { return u(0.5, y); }, center, rule));
}
BENCHMARK(BM_weighted_ball_average);

void BM_ball_extremum(benchmark::State& state) {
  const auto u = hmvp::builtin_field("cubic-mix");
  const hmvp::HPoint center(0.3, 0.1, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(hmvp::ball_extremum(
        [&](const hmvp::HPoint& y) { return u(0.2, y); }, center, 0.25,
        hmvp::ExtremumMode::Max));
}
BENCHMARK(BM_ball_extremum);

void BM_solver_sweep(benchmark::State& state) {
  hmvp::GridConfig gc;
  gc.epsilon = 0.2;
  gc.T = gc.epsilon * gc.epsilon;  // a single slab
  hmvp::SolverConfig sc;
  sc.params = hmvp::MvpParams::make(1, hmvp::PExponent::finite(2.0), gc.epsilon);
  const auto grid = hmvp::build_grid(gc);
  const auto u = hmvp::builtin_field("heat-quartic");
  for (auto _ : state) {
    auto field = hmvp::solve(
        grid, sc, [&](const hmvp::HPoint& x) { return u(0.0, x); },
        [&](double t, const hmvp::HPoint& x) { return u(t, x); });
    benchmark::DoNotOptimize(field.values.back().sum());
  }
}
BENCHMARK(BM_solver_sweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
