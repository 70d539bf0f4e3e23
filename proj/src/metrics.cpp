#include "fdrsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "fdrsel/error.hpp"

namespace fdrsel {

double fdp(const IndexSet& selected, const IndexSet& true_support) {
  IndexSet false_hits;
  std::set_difference(selected.begin(), selected.end(), true_support.begin(), true_support.end(),
                      std::back_inserter(false_hits));
  const double denom = static_cast<double>(std::max<std::size_t>(selected.size(), 1));
  return static_cast<double>(false_hits.size()) / denom;
}

double power(const IndexSet& selected, const IndexSet& true_support) {
  if (true_support.empty()) throw InvalidParameter("power is undefined for an empty true support");
  IndexSet hits;
  std::set_intersection(selected.begin(), selected.end(), true_support.begin(), true_support.end(),
                        std::back_inserter(hits));
  return static_cast<double>(hits.size()) / static_cast<double>(true_support.size());
}

double quantile_linear(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw InvalidParameter("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FiveNumber five_number(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {values.front(), quantile_linear(values, 0.25), quantile_linear(values, 0.5),
          quantile_linear(values, 0.75), values.back()};
}

ScenarioReport aggregate(const Scenario& scenario, std::vector<ReplicationSummary> summaries) {
  if (summaries.empty()) throw InvalidParameter("cannot aggregate zero replications");
  const Method method = summaries.front().method;
  for (const auto& s : summaries)
    if (s.method != method) throw InvalidParameter("aggregate mixes methods");
  std::sort(summaries.begin(), summaries.end(),
            [](const auto& a, const auto& b) { return a.replication_id < b.replication_id; });

  ScenarioReport r;
  r.scenario = scenario;
  r.method = method;
  std::vector<double> fdps;
  std::vector<double> powers;
  double selected = 0.0;
  for (const auto& s : summaries) {
    if (s.failed()) {
      ++r.failed;
      continue;
    }
    fdps.push_back(s.fdp);
    if (s.power) powers.push_back(*s.power);
    selected += static_cast<double>(s.n_selected);
  }
  r.replications = fdps.size();
  if (fdps.empty()) return r;

  const double m = static_cast<double>(fdps.size());
  double sum = 0.0;
  for (double v : fdps) sum += v;
  r.fdr = sum / m;
  if (fdps.size() > 1) {
    double ss = 0.0;
    for (double v : fdps) ss += (v - r.fdr) * (v - r.fdr);
    r.fdr_se = std::sqrt(ss / (m - 1.0) / m);
  }
  r.fdp_quantiles = five_number(fdps);
  r.mean_selected = selected / m;
  if (!powers.empty()) {
    double psum = 0.0;
    for (double v : powers) psum += v;
    r.mean_power = psum / static_cast<double>(powers.size());
    r.power_quantiles = five_number(powers);
  }
  return r;
}

}  // namespace fdrsel
