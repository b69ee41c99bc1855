#include <benchmark/benchmark.h>

#include <random>

#include "reachkit/oracle.hpp"
#include "reachkit/solver.hpp"

using namespace reachkit;

namespace {

std::vector<Interval> flight_domain() { return {{-0.4, 0.4}, {-0.75, 0.75}, {-0.75, 0.75}}; }

SolveConfig flight_config(std::size_t n, unsigned threads) {
  return SolveConfig{builtin_system("longitudinal_flight"),
                     TargetSet::box({{-0.05, 0.05}, {-0.1, 0.1}, {-0.1, 0.1}}),
                     Grid(flight_domain(), {n, n, n}),
                     0.01,
                     1,
                     {5},
                     Mode::minimize,
                     threads};
}

void BM_Interpolate3D(benchmark::State& state) {
  const Grid grid(flight_domain(), {51, 51, 51});
  std::vector<double> values(grid.node_count());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& v : values) v = unit(rng);
  std::vector<std::vector<double>> queries(4096);
  for (auto& q : queries)
    for (const auto& b : grid.bounds()) q.push_back(b.lo + unit(rng) * b.width());

  const Interpolator interp(grid, values);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(interp(queries[i]));
    i = (i + 1) & 4095;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Interpolate3D);

void BM_RecursionStep(benchmark::State& state) {
  const auto cfg = flight_config(static_cast<std::size_t>(state.range(0)),
                                 static_cast<unsigned>(state.range(1)));
  const auto field = solve(cfg);
  for (auto _ : state) {
    auto next = recursion_step(field, cfg);
    benchmark::DoNotOptimize(next.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.grid.node_count()));
}
BENCHMARK(BM_RecursionStep)->Args({21, 1})->Args({51, 1})->Args({51, 4})->Unit(benchmark::kMillisecond);

void BM_BruteClassifyDubins(benchmark::State& state) {
  const auto sys = builtin_system("dubins_car");
  const auto target = TargetSet::box({{-0.5, 0.5}, {-0.5, 0.5}, {-10, 10}});
  const std::vector<double> s0{1.2, 0.3, 2.0};  // never reaches: full enumeration
  const std::vector<int> counts{2};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        brute_classify(sys, target, s0, 0.8, 0.1, counts, QueryKind::max_reach));
}
BENCHMARK(BM_BruteClassifyDubins);

}  // namespace

BENCHMARK_MAIN();
