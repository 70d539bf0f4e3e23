#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fdrsel/datagen.hpp"
#include "fdrsel/selection.hpp"

namespace fdrsel {

// |selected \ support| / max(|selected|, 1). Both sets sorted.
double fdp(const IndexSet& selected, const IndexSet& true_support);

// |selected & support| / |support|; throws InvalidParameter on an empty
// support (power is not defined under the global null).
double power(const IndexSet& selected, const IndexSet& true_support);

struct ReplicationSummary {
  std::size_t replication_id = 0;
  Method method = Method::Dss;
  double fdp = 0.0;
  std::optional<double> power;  // absent under the global null
  std::size_t n_selected = 0;
  double threshold_T = 0.0;
  double tau = 0.0;
  std::optional<double> null_pass_fraction;
  std::string error;  // nonempty when the replication failed

  bool failed() const { return !error.empty(); }
};

// (min, q25, median, q75, max) with linear interpolation between order
// statistics: position h = (m - 1) * prob over the sorted sample.
using FiveNumber = std::array<double, 5>;

FiveNumber five_number(std::vector<double> values);
double quantile_linear(const std::vector<double>& sorted, double prob);

struct ScenarioReport {
  std::size_t scenario_index = 0;
  Scenario scenario;
  Method method = Method::Dss;
  std::size_t replications = 0;  // successful replications aggregated
  std::size_t failed = 0;
  double fdr = 0.0;
  double fdr_se = 0.0;  // Monte Carlo standard error of the FDR
  std::optional<double> mean_power;
  FiveNumber fdp_quantiles{};
  std::optional<FiveNumber> power_quantiles;
  double mean_selected = 0.0;
};

// Folds the summaries in replication-id order, so the result does not depend
// on the order they arrive in. Failed replications are counted, not averaged.
ScenarioReport aggregate(const Scenario& scenario, std::vector<ReplicationSummary> summaries);

}  // namespace fdrsel
