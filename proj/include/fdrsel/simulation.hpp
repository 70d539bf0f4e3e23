#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fdrsel/config.hpp"
#include "fdrsel/metrics.hpp"
#include "fdrsel/parallel.hpp"
#include "fdrsel/selection.hpp"

namespace fdrsel {

// Runs one method on one dataset with the grid's shared settings.
SelectionOutcome run_method(Method method, const Dataset& d, double q, const MethodSettings& settings,
                            std::uint64_t seed, Execution exec);

// Seed of replication `rep` of a scenario; every method sees the same data.
std::uint64_t replication_seed(const Scenario& scenario, std::size_t rep);

// Generates the replication's dataset and runs every method on it. A method
// that throws yields a summary with `error` set instead of aborting.
std::vector<ReplicationSummary> run_replication(const Scenario& scenario, std::size_t rep,
                                                const std::vector<Method>& methods,
                                                const MethodSettings& settings, Execution exec);

struct ScenarioRun {
  std::size_t index = 0;
  Scenario scenario;
  // by_method[m][r]: method methods[m], replication r.
  std::vector<std::vector<ReplicationSummary>> by_method;
};

struct GridResult {
  std::vector<ScenarioRun> runs;
  std::vector<Method> methods;
};

// Serial is the reference; Parallel spreads (scenario, replication) units
// over OpenMP threads. Both return identical results.
GridResult run_grid(const GridConfig& config, Execution exec);

// Same, for an explicit scenario list (used by tests and benchmarks).
GridResult run_scenarios(const std::vector<Scenario>& scenarios, std::size_t replications,
                         const std::vector<Method>& methods, const MethodSettings& settings,
                         Execution exec);

// One report per (scenario, method), scenario-major.
std::vector<ScenarioReport> summarize(const GridResult& result);

}  // namespace fdrsel
