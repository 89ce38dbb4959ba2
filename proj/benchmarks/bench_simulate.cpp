#include "moreau/sweep_sim.hpp"
#include "moreau/usv.hpp"

#include <benchmark/benchmark.h>

using namespace moreau;

namespace {

void BM_usv_simulate(benchmark::State& state) {
  const auto spec = usv::scenario();
  const double T = usv::optimal_horizon(100.0, 60.0);
  const auto u = ControlSignal::constant((Vec(2) << 100.0, 60.0).finished());
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(spec, u, Grid(T, state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_usv_closed_form_cost(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(usv::cost(100.0, 60.0, 0));
}

void BM_usv_optimize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(usv::optimize());
}

}  // namespace

BENCHMARK(BM_usv_simulate)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_usv_closed_form_cost);
BENCHMARK(BM_usv_optimize)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
