#include <benchmark/benchmark.h>

#include <cmath>

#include "indiff/oracle.hpp"

using namespace indiff;

namespace {

MarketModel model(int N) {
  MarketModel m;
  m.grid = {1.0, N};
  m.coeffs = RegimeCoefficients::constant(0.1, 0.3, -0.4, 0.5);
  m.gamma = 1.0;
  m.s0 = 1.0;
  return m;
}

Claim put_on(const SpaceGrid& grid) {
  std::vector<double> s;
  for (double x : grid.nodes()) s.push_back(std::exp(x));
  return Claim::tabulate(s, [](double sv, int) { return std::max(1.0 - sv, 0.0); });
}

template <bool Parallel>
void BM_Solve(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto m = model(M / 2);
  const auto grid = SpaceGrid::for_model(m, M);
  const auto claim = put_on(grid);
  const auto quad = Quadrature::gauss_hermite(7);
  const auto set = StrategySet::symmetric(2.0);
  for (auto _ : state) {
    auto s = Parallel ? solve_bsde(m, claim, set, grid, quad)
                      : reference::solve_bsde_serial(m, claim, set, grid, quad);
    benchmark::DoNotOptimize(surface_at_origin(s));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(M / 2) * (M + 1) * 2);
}

template <bool Parallel>
void BM_Simulate(benchmark::State& state) {
  const auto m = model(100);
  const int n = static_cast<int>(state.range(0));
  const Strategy pi = [](double, double s, int) { return 0.5 / s; };
  for (auto _ : state) {
    auto e = Parallel ? simulate_paths(m, pi, n, 1) : reference::simulate_paths_serial(m, pi, n, 1);
    benchmark::DoNotOptimize(e.X.back());
  }
  state.SetItemsProcessed(state.iterations() * n * 100);
}

template <bool Parallel>
void BM_Martingale(benchmark::State& state) {
  const auto m = model(100);
  const auto grid = SpaceGrid::for_model(m, 200);
  const auto surface = solve_bsde(m, put_on(grid), StrategySet::symmetric(2.0), grid,
                                  Quadrature::gauss_hermite(7));
  const Strategy pi = extract_optimal_strategy(surface);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? martingale_check(surface, pi, n, 3)
                      : reference::martingale_check_serial(surface, pi, n, 3);
    benchmark::DoNotOptimize(r.aggregate_mean);
  }
  state.SetItemsProcessed(state.iterations() * n * 100);
}

template <bool Parallel>
void BM_TreeDP(benchmark::State& state) {
  const auto m = model(100);
  const auto grid = SpaceGrid::for_model(m, 200);
  const auto claim = put_on(grid);
  DPSettings s;
  s.steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? brute_force_dp(m, claim, 2.0, s)
                      : reference::brute_force_dp_serial(m, claim, 2.0, s);
    benchmark::DoNotOptimize(r.J0);
    state.counters["nodes"] = static_cast<double>(r.nodes);
  }
}

}  // namespace

BENCHMARK(BM_Solve<false>)->Name("solve/serial")->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve<true>)->Name("solve/parallel")->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate<false>)->Name("simulate/serial")->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate<true>)->Name("simulate/parallel")->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Martingale<false>)->Name("martingale/serial")->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Martingale<true>)->Name("martingale/parallel")->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TreeDP<false>)->Name("dp_tree/serial")->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TreeDP<true>)->Name("dp_tree/parallel")->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
