#include <benchmark/benchmark.h>

#include "evstud/montecarlo.hpp"
#include "evstud/pipeline.hpp"
#include "evstud/sur.hpp"

namespace {

using namespace evstud;

SimConfig small_config() {
  SimConfig config;
  config.n_firms = 24;
  config.n_days = 500;
  config.n_events = 48;
  config.rho = 0.02;
  config.seed = 7;
  return config;
}

RegressionConfig bench_regression() {
  RegressionConfig reg;
  reg.min_obs = 100;
  reg.require_balanced = true;
  return reg;
}

void BM_FitOls(benchmark::State& state) {
  SimConfig config = small_config();
  SimulatedRep rep = simulate_panel(config, 0);
  auto events = resolve_events(rep.events, rep.panel.calendar);
  RegressionConfig reg = bench_regression();
  for (auto _ : state)
    for (const auto& firm : rep.panel.firm_ids) {
      DesignMatrix d = build_design(firm, rep.panel, rep.factors, events,
                                    config.window, config.model, reg);
      benchmark::DoNotOptimize(fit_ols(d, reg));
    }
}
BENCHMARK(BM_FitOls);

void BM_FitSur(benchmark::State& state) {
  SimConfig config = small_config();
  SimulatedRep rep = simulate_panel(config, 0);
  auto events = resolve_events(rep.events, rep.panel.calendar);
  SurSystem system = assemble_system(rep.panel, rep.factors, events, config.window,
                                     config.model, bench_regression());
  for (auto _ : state) benchmark::DoNotOptimize(fit_sur(system));
}
BENCHMARK(BM_FitSur);

void BM_SimulateRep(benchmark::State& state) {
  SimConfig config = small_config();
  int rep_index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_panel(config, rep_index++));
}
BENCHMARK(BM_SimulateRep);

}  // namespace

BENCHMARK_MAIN();
