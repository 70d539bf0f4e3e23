#include "fdrsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "fdrsel/error.hpp"
#include "fdrsel/preprocess.hpp"
#include "fdrsel/rng.hpp"

namespace fdrsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_level(double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("q must lie in (0, 1)");
}

bool in_sorted(const IndexSet& s, std::size_t j) { return std::binary_search(s.begin(), s.end(), j); }

double parse_number(std::string_view text, std::string_view what) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw InvalidParameter("invalid " + std::string(what) + " '" + s + "'");
  return v;
}

}  // namespace

void ImportancePair::validate() const {
  if (z_tr.size() != z_v.size())
    throw DimensionMismatch("training and validation importances differ in length");
  if (!z_tr.allFinite() || !z_v.allFinite())
    throw InvalidParameter("importance statistics must be finite");
  if ((z_tr.array() < 0.0).any() || (z_v.array() < 0.0).any())
    throw InvalidParameter("importance statistics must be nonnegative");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Dss:
      return "dss";
    case Method::Mss:
      return "mss";
    case Method::Bh:
      return "bh";
    case Method::Ss:
      return "ss";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "dss") return Method::Dss;
  if (text == "mss") return Method::Mss;
  if (text == "bh") return Method::Bh;
  if (text == "ss") return Method::Ss;
  throw InvalidParameter("unknown method '" + std::string(text) + "' (expected dss, mss, bh or ss)");
}

TauRule TauRule::elbow(ElbowSource source) {
  TauRule r;
  r.kind = Kind::Elbow;
  r.source = source;
  return r;
}

TauRule TauRule::fixed(double tau) {
  TauRule r;
  r.kind = Kind::Fixed;
  r.value = tau;
  r.validate();
  return r;
}

TauRule TauRule::oracle(double level, std::optional<double> null_sd) {
  TauRule r;
  r.kind = Kind::OraclePercentile;
  r.value = level;
  r.null_sd = null_sd;
  r.validate();
  return r;
}

void TauRule::validate() const {
  switch (kind) {
    case Kind::Elbow:
      break;
    case Kind::Fixed:
      if (!(value > 0.0)) throw InvalidParameter("fixed tau must be positive");
      break;
    case Kind::OraclePercentile:
      if (!(value > 0.0 && value < 1.0))
        throw InvalidParameter("oracle percentile level must lie in (0, 1)");
      if (null_sd && !(*null_sd > 0.0)) throw InvalidParameter("null_sd must be positive");
      break;
  }
}

TauRule parse_tau_rule(std::string_view text) {
  if (text == "elbow" || text == "elbow:validation") return TauRule::elbow();
  if (text == "elbow:training") return TauRule::elbow(ElbowSource::Training);
  if (text.starts_with("fixed:")) return TauRule::fixed(parse_number(text.substr(6), "fixed tau"));
  if (text.starts_with("oracle:")) {
    const std::string_view rest = text.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos)
      return TauRule::oracle(parse_number(rest, "oracle level"));
    return TauRule::oracle(parse_number(rest.substr(0, colon), "oracle level"),
                           parse_number(rest.substr(colon + 1), "oracle null sd"));
  }
  throw InvalidParameter("unknown tau rule '" + std::string(text) +
                         "' (expected elbow, elbow:training, fixed:<v> or oracle:<level>)");
}

std::string to_string(const TauRule& rule) {
  char buf[96];
  switch (rule.kind) {
    case TauRule::Kind::Elbow:
      return rule.source == ElbowSource::Training ? "elbow:training" : "elbow";
    case TauRule::Kind::Fixed:
      std::snprintf(buf, sizeof buf, "fixed:%.17g", rule.value);
      return buf;
    case TauRule::Kind::OraclePercentile:
      if (rule.null_sd)
        std::snprintf(buf, sizeof buf, "oracle:%.17g:%.17g", rule.value, *rule.null_sd);
      else
        std::snprintf(buf, sizeof buf, "oracle:%.17g", rule.value);
      return buf;
  }
  return "?";
}

Vector compute_fi(const ImportancePair& pair, double tau) {
  pair.validate();
  if (!(tau > 0.0)) throw InvalidParameter("tau must be positive");
  Vector fi(pair.z_tr.size());
  for (Eigen::Index j = 0; j < fi.size(); ++j) {
    const double z = pair.z_tr(j);
    fi(j) = (z == 0.0 || pair.z_v(j) >= tau) ? z : -z;
  }
  return fi;
}

double compute_threshold(const Vector& z_tr, const Vector& fi, double q) {
  check_level(q);
  if (z_tr.size() != fi.size()) throw DimensionMismatch("z_tr and fi differ in length");
  for (Eigen::Index j = 0; j < z_tr.size(); ++j) {
    if (!(z_tr(j) >= 0.0) || !std::isfinite(z_tr(j)))
      throw InvalidParameter("z_tr must be finite and nonnegative");
    if (std::abs(fi(j)) != z_tr(j))
      throw InvalidParameter("|fi_" + std::to_string(j) + "| differs from z_tr_" +
                             std::to_string(j));
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(z_tr.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return z_tr(a) > z_tr(b); });

  // Walking down the distinct positive values, the counts for candidate t
  // are the feature tallies with z_tr >= t, split by the sign of fi.
  double best = kInf;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t i = 0;
  while (i < order.size() && z_tr(order[i]) > 0.0) {
    const double t = z_tr(order[i]);
    while (i < order.size() && z_tr(order[i]) == t) {
      if (fi(order[i]) > 0.0)
        ++positive;
      else
        ++negative;
      ++i;
    }
    const double ratio = static_cast<double>(negative) /
                         static_cast<double>(std::max<std::size_t>(positive, 1));
    if (ratio <= q) best = t;
  }
  return best;
}

double estimate_tau_elbow(const Vector& z) {
  const auto p = z.size();
  if (p < 3) throw InvalidParameter("elbow estimate needs at least 3 values");
  if (!z.allFinite() || (z.array() < 0.0).any())
    throw InvalidParameter("elbow input must be finite and nonnegative");
  std::vector<double> sorted(z.data(), z.data() + p);
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw InvalidParameter("elbow input has all values equal");

  const double pd = static_cast<double>(p);
  const double x0 = sorted.front();
  const double y0 = 1.0 / pd;
  const double dx = sorted.back() - x0;
  const double dy = 1.0 - y0;
  // The chord norm is common to every point, so compare numerators only.
  std::vector<double> dist(static_cast<std::size_t>(p));
  double max_dist = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const double yk = static_cast<double>(k + 1) / pd;
    dist[k] = std::abs(dy * (sorted[k] - x0) - dx * (yk - y0));
    max_dist = std::max(max_dist, dist[k]);
  }
  const double tie = 1e-12 * (std::abs(dx) + std::abs(dy)) * (std::abs(x0) + std::abs(dx) + 1.0);
  std::size_t knee = 0;
  while (dist[knee] < max_dist - tie) ++knee;

  const double tau = sorted[knee];
  if (tau > 0.0) return tau;
  return *std::upper_bound(sorted.begin(), sorted.end(), 0.0);
}

double estimate_tau_oracle(double null_sd, double level) {
  if (!(null_sd > 0.0) || !std::isfinite(null_sd)) throw InvalidParameter("null_sd must be positive");
  if (!(level > 0.0 && level < 1.0)) throw InvalidParameter("percentile level must lie in (0, 1)");
  const boost::math::normal standard;
  return null_sd * boost::math::quantile(standard, 0.5 + 0.5 * level);
}

SelectionOutcome select_from_importance(const ImportancePair& pair, const Vector& valid_estimates,
                                        double q, const TauRule& tau_rule, const Dataset* truth) {
  pair.validate();
  check_level(q);
  tau_rule.validate();
  const IndexSet* support = (truth && truth->true_support) ? &*truth->true_support : nullptr;

  double tau = kInf;
  switch (tau_rule.kind) {
    case TauRule::Kind::Fixed:
      tau = tau_rule.value;
      break;
    case TauRule::Kind::Elbow: {
      const Vector& source = tau_rule.source == ElbowSource::Training ? pair.z_tr : pair.z_v;
      // With no spread there is no elbow: nothing passes the gate.
      if (source.size() >= 3 && source.minCoeff() != source.maxCoeff())
        tau = estimate_tau_elbow(source);
      else if (source.size() < 3)
        throw InvalidParameter("elbow tau needs at least 3 features");
      break;
    }
    case TauRule::Kind::OraclePercentile: {
      double sd = 0.0;
      if (tau_rule.null_sd) {
        sd = *tau_rule.null_sd;
      } else {
        if (!support)
          throw InvalidParameter("oracle tau needs null_sd or a dataset with known support");
        double sum = 0.0;
        std::size_t count = 0;
        for (Eigen::Index j = 0; j < valid_estimates.size(); ++j) {
          if (in_sorted(*support, static_cast<std::size_t>(j))) continue;
          sum += valid_estimates(j) * valid_estimates(j);
          ++count;
        }
        if (count == 0) throw InvalidParameter("oracle tau needs at least one null feature");
        sd = std::sqrt(sum / static_cast<double>(count));
        if (!(sd > 0.0)) throw NumericError("null estimates are all zero; oracle tau undefined");
      }
      tau = estimate_tau_oracle(sd, tau_rule.value);
      break;
    }
  }

  SelectionOutcome out;
  out.tau = tau;
  out.z_tr = pair.z_tr;
  out.z_v = pair.z_v;
  out.fi = compute_fi(pair, tau);
  out.threshold = compute_threshold(pair.z_tr, out.fi, q);
  for (Eigen::Index j = 0; j < out.fi.size(); ++j)
    if (pair.z_tr(j) >= out.threshold && pair.z_v(j) >= tau)
      out.selected.push_back(static_cast<std::size_t>(j));

  if (support) {
    std::size_t nulls = 0;
    std::size_t passing = 0;
    for (Eigen::Index j = 0; j < pair.z_v.size(); ++j) {
      if (in_sorted(*support, static_cast<std::size_t>(j))) continue;
      ++nulls;
      if (pair.z_v(j) >= tau) ++passing;
    }
    if (nulls > 0) out.null_pass_fraction = static_cast<double>(passing) / static_cast<double>(nulls);
  }
  return out;
}

SelectionOutcome dss_select(const Dataset& d, const DssOptions& options, std::uint64_t seed) {
  d.validate();
  check_level(options.q);
  if (d.rows() < 8) throw InvalidParameter("DSS needs n >= 8, got " + std::to_string(d.rows()));

  const SplitPair split = split_half(d, derive_seed(seed, {0}));
  const Dataset* halves[2] = {&split.train, &split.valid};
  const char* names[2] = {"training", "validation"};
  FitResult fits[2];
  for_each_index(2, options.exec, [&](std::size_t h) {
    try {
      const Matrix xs = standardize(halves[h]->x);
      fits[h] = fit_estimator(xs, halves[h]->y, options.estimator, derive_seed(seed, {1 + h}));
    } catch (const Error& e) {
      throw Error(std::string("DSS ") + names[h] + " half: " + e.what());
    }
  });

  ImportancePair pair{importance(fits[0]).z, importance(fits[1]).z};
  SelectionOutcome out = select_from_importance(pair, fits[1].coefficients, options.q, options.tau, &d);
  out.method = Method::Dss;
  return out;
}

Vector averaged_importance(const std::vector<Vector>& estimates, std::size_t begin,
                           std::size_t end) {
  if (begin >= end || end > estimates.size())
    throw InvalidParameter("empty or out-of-range estimate block");
  Vector sum = Vector::Zero(estimates[begin].size());
  for (std::size_t i = begin; i < end; ++i) sum += estimates[i];
  return (sum / static_cast<double>(end - begin)).cwiseAbs();
}

SelectionOutcome mss_select(const Dataset& d, const MssOptions& options, std::uint64_t seed) {
  d.validate();
  check_level(options.q);
  if (options.k < 1 || options.k_prime < 1) throw InvalidParameter("k and k' must be at least 1");
  const std::size_t size = options.subsample_size == 0 ? d.rows() : options.subsample_size;
  const std::size_t count = options.k + options.k_prime;

  SubsampleSet set = subsample(d, count, size, derive_seed(seed, {0}), options.with_replacement);
  set.k = options.k;
  set.k_prime = options.k_prime;

  std::vector<Vector> estimates(count);
  for_each_index(count, options.exec, [&](std::size_t i) {
    try {
      const Matrix xs = standardize(set.samples[i].x);
      estimates[i] = fit_estimator(xs, set.samples[i].y, options.estimator, derive_seed(seed, {1, i}))
                         .coefficients;
    } catch (const Error& e) {
      throw Error("MSS subsample " + std::to_string(i) + ": " + e.what());
    }
  });

  ImportancePair pair{averaged_importance(estimates, 0, options.k),
                      averaged_importance(estimates, options.k, count)};
  Vector valid_mean = Vector::Zero(d.x.cols());
  for (std::size_t i = options.k; i < count; ++i) valid_mean += estimates[i];
  valid_mean /= static_cast<double>(options.k_prime);

  SelectionOutcome out = select_from_importance(pair, valid_mean, options.q, options.tau, &d);
  out.method = Method::Mss;
  return out;
}

IndexSet bh_select(const Vector& pvalues, double q) {
  check_level(q);
  const auto p = static_cast<std::size_t>(pvalues.size());
  for (Eigen::Index j = 0; j < pvalues.size(); ++j)
    if (!(pvalues(j) >= 0.0 && pvalues(j) <= 1.0))
      throw InvalidParameter("p-value " + std::to_string(j) + " outside [0, 1]");

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pvalues(static_cast<Eigen::Index>(a)) < pvalues(static_cast<Eigen::Index>(b));
  });
  std::size_t rejected = 0;
  for (std::size_t k = p; k >= 1; --k) {
    const double bound = static_cast<double>(k) * q / static_cast<double>(p);
    if (pvalues(static_cast<Eigen::Index>(order[k - 1])) <= bound) {
      rejected = k;
      break;
    }
  }
  IndexSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(rejected));
  std::sort(out.begin(), out.end());
  return out;
}

SelectionOutcome bh_dataset_select(const Dataset& d, double q) {
  d.validate();
  SelectionOutcome out;
  out.method = Method::Bh;
  out.score = ols_pvalues(standardize(d.x), d.y);
  out.selected = bh_select(out.score, q);
  return out;
}

std::vector<double> ss_default_grid(const Dataset& d, std::size_t grid_size, double ratio) {
  const LassoPath path(standardize(d.x), d.y);
  return lambda_grid(path.lambda_max(), grid_size, ratio);
}

SsResult ss_select(const Dataset& d, const SsOptions& options, std::uint64_t seed) {
  d.validate();
  if (options.n_subsamples < 2) throw InvalidParameter("stability selection needs >= 2 subsamples");
  if (!(options.pi_threshold > 0.5 && options.pi_threshold <= 1.0))
    throw InvalidParameter("pi_threshold must lie in (0.5, 1]");
  const std::size_t half = d.rows() / 2;
  if (half < 2) throw InvalidParameter("stability selection needs n >= 4");

  SsResult out;
  out.lambdas = options.lambda_grid.empty()
                    ? ss_default_grid(d, options.grid_size, options.grid_ratio)
                    : options.lambda_grid;
  if (out.lambdas.empty()) throw InvalidParameter("empty lambda grid");
  for (double l : out.lambdas)
    if (!(l >= 0.0)) throw InvalidParameter("lambda grid entries must be nonnegative");

  // Warm starts run from the largest penalty down; results map back to grid order.
  std::vector<std::size_t> order(out.lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.lambdas[a] > out.lambdas[b]; });

  const auto p = d.x.cols();
  const auto grid = static_cast<Eigen::Index>(out.lambdas.size());
  std::vector<Eigen::MatrixXi> active(options.n_subsamples);
  for_each_index(options.n_subsamples, options.exec, [&](std::size_t s) {
    const Dataset sample = take_rows(d, draw_rows(d.rows(), half, derive_seed(seed, {s}), false));
    LassoPath path(standardize(sample.x), sample.y, options.lasso);
    Eigen::MatrixXi hits = Eigen::MatrixXi::Zero(grid, p);
    for (std::size_t g : order) {
      path.solve(out.lambdas[g]);
      hits.row(static_cast<Eigen::Index>(g)) = (path.coefficients().array() != 0.0).cast<int>().transpose();
    }
    active[s] = std::move(hits);
  });

  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(grid, p);
  for (const auto& hits : active) counts += hits;
  out.frequency = counts.cast<double>() / static_cast<double>(options.n_subsamples);
  out.probability = out.frequency.colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < p; ++j)
    if (out.probability(j) >= options.pi_threshold) out.selected.push_back(static_cast<std::size_t>(j));
  return out;
}

}  // namespace fdrsel
