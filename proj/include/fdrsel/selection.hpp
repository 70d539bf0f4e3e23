#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdrsel/datagen.hpp"
#include "fdrsel/estimators.hpp"
#include "fdrsel/parallel.hpp"

namespace fdrsel {

// Importance of each feature measured on two independent pieces of data.
struct ImportancePair {
  Vector z_tr;
  Vector z_v;

  void validate() const;
};

enum class Method { Dss, Mss, Bh, Ss };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

enum class ElbowSource { Validation, Training };

struct TauRule {
  enum class Kind { Elbow, OraclePercentile, Fixed };

  Kind kind = Kind::Elbow;
  double value = 0.0;             // percentile level, or the fixed tau
  std::optional<double> null_sd;  // oracle only; else estimated from known nulls
  ElbowSource source = ElbowSource::Validation;

  static TauRule elbow(ElbowSource source = ElbowSource::Validation);
  static TauRule fixed(double tau);
  static TauRule oracle(double level, std::optional<double> null_sd = std::nullopt);

  void validate() const;
};

// "elbow", "elbow:training", "fixed:<v>", "oracle:<level>[:<null_sd>]".
TauRule parse_tau_rule(std::string_view text);
std::string to_string(const TauRule& rule);

struct SelectionOutcome {
  Method method = Method::Dss;
  IndexSet selected;
  double threshold = std::numeric_limits<double>::infinity();
  double tau = std::numeric_limits<double>::quiet_NaN();
  Vector fi;
  Vector z_tr;
  Vector z_v;
  // BH: p-values. SS: max selection probability over the penalty grid.
  Vector score;
  // Share of known-null features with z_v >= tau (simulation diagnostic).
  std::optional<double> null_pass_fraction;
};

// FI_j = +z_tr_j when z_v_j >= tau, else -z_tr_j. Zero stays +0.
Vector compute_fi(const ImportancePair& pair, double tau);

// Smallest positive t among the z_tr values with
//   #{j : fi_j <= -t} / max(#{j : fi_j >= t}, 1) <= q,
// or +infinity when no candidate qualifies. O(p log p).
double compute_threshold(const Vector& z_tr, const Vector& fi, double q);

// Knee of the empirical CDF: the sorted value whose point (z_(k), k/p) lies
// farthest from the chord through the first and last points. Ties go to the
// smallest value; a zero knee is replaced by the smallest positive entry.
double estimate_tau_elbow(const Vector& z);

// level-quantile of |N(0, null_sd^2)|.
double estimate_tau_oracle(double null_sd, double level);

// Resolves tau, signs the importances, thresholds, and selects
// { j : z_tr_j >= T and z_v_j >= tau }. `valid_estimates` are the signed
// validation-side estimates (used only by the oracle rule); `truth` supplies
// the known support for diagnostics and may be null.
SelectionOutcome select_from_importance(const ImportancePair& pair, const Vector& valid_estimates,
                                        double q, const TauRule& tau_rule, const Dataset* truth);

struct DssOptions {
  double q = 0.1;
  Estimator estimator;
  TauRule tau;
  Execution exec = Execution::Parallel;
};

SelectionOutcome dss_select(const Dataset& d, const DssOptions& options, std::uint64_t seed);

struct MssOptions {
  double q = 0.1;
  std::size_t k = 10;
  std::size_t k_prime = 10;
  std::size_t subsample_size = 0;  // 0 means n
  bool with_replacement = true;
  Estimator estimator;
  TauRule tau;
  Execution exec = Execution::Parallel;
};

SelectionOutcome mss_select(const Dataset& d, const MssOptions& options, std::uint64_t seed);

// Z from a collection of estimates: |mean of rows [begin, end)| per feature.
Vector averaged_importance(const std::vector<Vector>& estimates, std::size_t begin,
                           std::size_t end);

// Benjamini-Hochberg step-up rule; returns the rejected indices, sorted.
IndexSet bh_select(const Vector& pvalues, double q);

// OLS p-values on the standardized design followed by bh_select.
SelectionOutcome bh_dataset_select(const Dataset& d, double q);

struct SsOptions {
  std::vector<double> lambda_grid;  // empty: ss_default_grid
  std::size_t grid_size = 20;
  double grid_ratio = 0.1;
  std::size_t n_subsamples = 50;
  double pi_threshold = 0.7;
  LassoOptions lasso;
  Execution exec = Execution::Parallel;
};

struct SsResult {
  IndexSet selected;
  Vector probability;  // max over the grid of the selection frequency
  Matrix frequency;    // grid point x feature
  std::vector<double> lambdas;
};

// grid_size log-spaced penalties from lambda_max of the standardized data
// down to ratio * lambda_max.
std::vector<double> ss_default_grid(const Dataset& d, std::size_t grid_size, double ratio);

SsResult ss_select(const Dataset& d, const SsOptions& options, std::uint64_t seed);

}  // namespace fdrsel
