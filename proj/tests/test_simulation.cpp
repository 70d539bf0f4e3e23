#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "fdrsel/io.hpp"
#include "fdrsel/metrics.hpp"
#include "fdrsel/simulation.hpp"

using namespace fdrsel;

namespace {

GridConfig small_grid() {
  GridConfig c = parse_config_text(
      "n = 120\np = 20\nseed = 404\np1 = 4\nrho = 0, 0.7\nsignal_ranges = 0.2:0.6, 1:2\n"
      "replications = 6\nk = 3\nk_prime = 3\nss_subsamples = 10\nss_grid_size = 5\n"
      "grid_size = 30\n");
  c.validate();
  return c;
}

struct Recomputed {
  std::vector<double> fdps;
  std::vector<double> powers;
  double selected = 0.0;
  std::size_t failed = 0;
};

double interp(const std::vector<double>& sorted, double prob) {
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const double lo = std::floor(h);
  const std::size_t i = static_cast<std::size_t>(lo);
  const std::size_t j = std::min(i + 1, sorted.size() - 1);
  return sorted[i] + (h - lo) * (sorted[j] - sorted[i]);
}

}  // namespace

TEST_CASE("serial and parallel grids agree exactly") {
  const GridConfig c = small_grid();
  set_threads(1);
  const std::string serial = replications_csv(run_grid(c, Execution::Serial));
  for (int threads : {1, 3, 8}) {
    set_threads(threads);
    const GridResult par = run_grid(c, Execution::Parallel);
    CHECK(replications_csv(par) == serial);
  }
  set_threads(0);
}

TEST_CASE("method inner parallelism does not change results") {
  Scenario s;
  s.n = 150;
  s.p = 25;
  s.p1 = 5;
  s.rho = 0.5;
  const Dataset d = generate(s, 9);
  MethodSettings m;
  m.k = 4;
  m.k_prime = 4;
  m.ss_subsamples = 12;
  set_threads(4);
  for (Method method : {Method::Dss, Method::Mss, Method::Ss}) {
    const auto a = run_method(method, d, 0.1, m, 77, Execution::Serial);
    const auto b = run_method(method, d, 0.1, m, 77, Execution::Parallel);
    CHECK(a.selected == b.selected);
    CHECK(a.score == b.score);
    CHECK(a.fi == b.fi);
  }
  set_threads(0);
}

TEST_CASE("each method sees the same data regardless of the method list") {
  const GridConfig c = small_grid();
  const auto scenarios = c.scenarios();
  const auto both = run_replication(scenarios[1], 2, {Method::Dss, Method::Bh}, c.settings, Execution::Serial);
  const auto alone = run_replication(scenarios[1], 2, {Method::Bh}, c.settings, Execution::Serial);
  CHECK(both[1].fdp == alone[0].fdp);
  CHECK(both[1].n_selected == alone[0].n_selected);
}

TEST_CASE("summary recomputes from the replication file") {
  const GridConfig c = small_grid();
  const GridResult result = run_grid(c, Execution::Parallel);
  const Table reps = parse_delimited(replications_csv(result));
  const Table summary = parse_delimited(summary_csv(summarize(result)));

  auto col = [](const Table& t, const std::string& name) {
    return static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), name) - t.header.begin());
  };
  std::map<std::pair<std::string, std::string>, Recomputed> groups;
  for (const auto& r : reps.rows) {
    auto& g = groups[{r[col(reps, "scenario")], r[col(reps, "method")]}];
    if (!r[col(reps, "error")].empty()) {
      ++g.failed;
      continue;
    }
    g.fdps.push_back(parse_double(r[col(reps, "fdp")]));
    const double pw = parse_double(r[col(reps, "power")]);
    if (!std::isnan(pw)) g.powers.push_back(pw);
    g.selected += parse_double(r[col(reps, "n_selected")]);
  }

  REQUIRE(summary.rows.size() == groups.size());
  for (const auto& row : summary.rows) {
    const Recomputed& g = groups.at({row[col(summary, "scenario")], row[col(summary, "method")]});
    const double m = static_cast<double>(g.fdps.size());
    CHECK(parse_double(row[col(summary, "replications")]) == m);
    CHECK(parse_double(row[col(summary, "failed")]) == static_cast<double>(g.failed));
    double sum = 0.0;
    for (double v : g.fdps) sum += v;
    const double fdr = sum / m;
    CHECK(parse_double(row[col(summary, "fdr")]) == fdr);
    double ss = 0.0;
    for (double v : g.fdps) ss += (v - fdr) * (v - fdr);
    CHECK(parse_double(row[col(summary, "fdr_se")]) == std::sqrt(ss / (m - 1.0) / m));
    double psum = 0.0;
    for (double v : g.powers) psum += v;
    CHECK(parse_double(row[col(summary, "mean_power")]) == psum / static_cast<double>(g.powers.size()));
    CHECK(parse_double(row[col(summary, "mean_selected")]) == g.selected / m);
    std::vector<double> sorted = g.fdps;
    std::sort(sorted.begin(), sorted.end());
    CHECK(parse_double(row[col(summary, "fdp_min")]) == sorted.front());
    CHECK(parse_double(row[col(summary, "fdp_median")]) == interp(sorted, 0.5));
    CHECK(parse_double(row[col(summary, "fdp_q75")]) == interp(sorted, 0.75));
    std::vector<double> ps = g.powers;
    std::sort(ps.begin(), ps.end());
    CHECK(parse_double(row[col(summary, "power_q25")]) == interp(ps, 0.25));
    CHECK(parse_double(row[col(summary, "power_max")]) == ps.back());
  }
}

TEST_CASE("a failing method is recorded per row and the run continues") {
  Scenario s;
  s.n = 20;
  s.p = 30;
  s.p1 = 3;
  MethodSettings m;
  m.k = 2;
  m.k_prime = 2;
  const GridResult r = run_scenarios({s}, 3, {Method::Bh, Method::Dss}, m, Execution::Parallel);
  for (const auto& row : r.runs[0].by_method[0]) {
    CHECK(row.failed());
    CHECK(row.error.find("n > p + 1") != std::string::npos);
  }
  for (const auto& row : r.runs[0].by_method[1]) CHECK_FALSE(row.failed());
  const auto reports = summarize(r);
  CHECK(reports[0].failed == 3);
  CHECK(reports[0].replications == 0);
  CHECK(reports[1].failed == 0);
  const std::string csv = summary_csv(reports);
  CHECK(csv.find(",bh,0,3,NA,") != std::string::npos);
}

TEST_CASE("global-null scenarios report FDR but no power") {
  Scenario s;
  s.n = 100;
  s.p = 20;
  s.p1 = 0;
  const GridResult r = run_scenarios({s}, 4, {Method::Dss}, MethodSettings{}, Execution::Serial);
  const auto reports = summarize(r);
  CHECK_FALSE(reports[0].mean_power.has_value());
  CHECK(replications_csv(r).find(",NA,") != std::string::npos);
}
