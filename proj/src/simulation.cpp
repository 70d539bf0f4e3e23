#include "fdrsel/simulation.hpp"

#include <exception>
#include <limits>

#include "fdrsel/error.hpp"
#include "fdrsel/rng.hpp"

namespace fdrsel {

SelectionOutcome run_method(Method method, const Dataset& d, double q, const MethodSettings& settings,
                            std::uint64_t seed, Execution exec) {
  switch (method) {
    case Method::Dss: {
      DssOptions o;
      o.q = q;
      o.estimator = settings.estimator;
      o.tau = settings.tau;
      o.exec = exec;
      return dss_select(d, o, seed);
    }
    case Method::Mss: {
      MssOptions o;
      o.q = q;
      o.k = settings.k;
      o.k_prime = settings.k_prime;
      o.subsample_size = settings.subsample_size;
      o.with_replacement = settings.bootstrap;
      o.estimator = settings.estimator;
      o.tau = settings.tau;
      o.exec = exec;
      return mss_select(d, o, seed);
    }
    case Method::Bh:
      return bh_dataset_select(d, q);
    case Method::Ss: {
      SsOptions o;
      o.grid_size = settings.ss_grid_size;
      o.grid_ratio = settings.ss_grid_ratio;
      o.n_subsamples = settings.ss_subsamples;
      o.pi_threshold = settings.ss_threshold;
      o.lasso = settings.estimator.lasso;
      o.exec = exec;
      SsResult r = ss_select(d, o, seed);
      SelectionOutcome out;
      out.method = Method::Ss;
      out.selected = std::move(r.selected);
      out.score = std::move(r.probability);
      return out;
    }
  }
  throw InvalidParameter("unknown method");
}

std::uint64_t replication_seed(const Scenario& scenario, std::size_t rep) {
  return derive_seed(scenario.seed, {rep});
}

std::vector<ReplicationSummary> run_replication(const Scenario& scenario, std::size_t rep,
                                                const std::vector<Method>& methods,
                                                const MethodSettings& settings, Execution exec) {
  const std::uint64_t seed = replication_seed(scenario, rep);
  std::vector<ReplicationSummary> out(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    out[m].replication_id = rep;
    out[m].method = methods[m];
  }

  Dataset d;
  try {
    d = generate(scenario, derive_seed(seed, {0}));
  } catch (const std::exception& e) {
    for (auto& s : out) s.error = std::string("data generation: ") + e.what();
    return out;
  }
  const IndexSet& support = *d.true_support;

  for (std::size_t m = 0; m < methods.size(); ++m) {
    ReplicationSummary& s = out[m];
    try {
      const auto method_seed = derive_seed(seed, {1, static_cast<std::uint64_t>(methods[m])});
      const SelectionOutcome o = run_method(methods[m], d, scenario.q, settings, method_seed, exec);
      s.n_selected = o.selected.size();
      s.fdp = fdp(o.selected, support);
      if (!support.empty()) s.power = power(o.selected, support);
      s.threshold_T = o.threshold;
      s.tau = o.tau;
      if (methods[m] == Method::Bh || methods[m] == Method::Ss) {
        s.threshold_T = std::numeric_limits<double>::quiet_NaN();
        s.tau = std::numeric_limits<double>::quiet_NaN();
      }
      s.null_pass_fraction = o.null_pass_fraction;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  }
  return out;
}

GridResult run_scenarios(const std::vector<Scenario>& scenarios, std::size_t replications,
                         const std::vector<Method>& methods, const MethodSettings& settings,
                         Execution exec) {
  GridResult result;
  result.methods = methods;
  result.runs.resize(scenarios.size());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    scenarios[s].validate();
    result.runs[s].index = s;
    result.runs[s].scenario = scenarios[s];
    result.runs[s].by_method.assign(methods.size(), std::vector<ReplicationSummary>(replications));
  }

  // Replications are the parallel unit; work inside one is serial so each
  // thread owns its datasets outright.
  const std::size_t units = scenarios.size() * replications;
  for_each_index(units, exec, [&](std::size_t u) {
    const std::size_t s = u / replications;
    const std::size_t r = u % replications;
    auto summaries = run_replication(scenarios[s], r, methods, settings, Execution::Serial);
    for (std::size_t m = 0; m < methods.size(); ++m)
      result.runs[s].by_method[m][r] = std::move(summaries[m]);
  });
  return result;
}

GridResult run_grid(const GridConfig& config, Execution exec) {
  return run_scenarios(config.scenarios(), config.replications, config.methods, config.settings,
                       exec);
}

std::vector<ScenarioReport> summarize(const GridResult& result) {
  std::vector<ScenarioReport> out;
  for (const auto& run : result.runs)
    for (const auto& reps : run.by_method) {
      out.push_back(aggregate(run.scenario, reps));
      out.back().scenario_index = run.index;
    }
  return out;
}

}  // namespace fdrsel
