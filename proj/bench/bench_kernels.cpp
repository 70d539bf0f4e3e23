// Serial reference vs OpenMP kernels: grid replications and the
// per-subsample fits inside MSS and SS.

#include <benchmark/benchmark.h>

#include "fdrsel/datagen.hpp"
#include "fdrsel/io.hpp"
#include "fdrsel/parallel.hpp"
#include "fdrsel/selection.hpp"
#include "fdrsel/simulation.hpp"

using namespace fdrsel;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

Scenario bench_scenario() {
  Scenario s;
  s.n = 300;
  s.p = 80;
  s.p1 = 10;
  s.rho = 0.5;
  s.signal_range = {0.5, 1.0};
  s.seed = 7;
  return s;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(max_threads()));
}

void BM_GridReplications(benchmark::State& state) {
  const Scenario s = bench_scenario();
  const std::vector<Method> methods{Method::Dss, Method::Bh};
  MethodSettings settings;
  const std::string reference =
      summary_csv(summarize(run_scenarios({s}, 8, methods, settings, Execution::Serial)));
  for (auto _ : state) {
    const GridResult r = run_scenarios({s}, 8, methods, settings, exec_of(state));
    if (summary_csv(summarize(r)) != reference) state.SkipWithError("result differs from serial");
  }
  label(state);
}

void BM_MssFits(benchmark::State& state) {
  const Dataset d = generate(bench_scenario(), 11);
  MssOptions o;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(mss_select(d, o, 3).selected);
  label(state);
}

void BM_SsFits(benchmark::State& state) {
  const Dataset d = generate(bench_scenario(), 13);
  SsOptions o;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(ss_select(d, o, 5).selected);
  label(state);
}

}  // namespace

BENCHMARK(BM_GridReplications)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MssFits)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SsFits)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
