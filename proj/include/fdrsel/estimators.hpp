#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fdrsel/datagen.hpp"

namespace fdrsel {

struct FitResult {
  Vector coefficients;
  double intercept = 0.0;
  double lambda = 0.0;  // 0 for OLS
  bool converged = true;
  int iterations = 0;
};

struct ImportanceVector {
  Vector z;
};

struct LassoOptions {
  double tol = 1e-7;  // max |coefficient change| over a full sweep
  int max_sweeps = 10000;
};

// Sums needed to form centered least-squares quantities. Additive over
// disjoint row blocks, which is how cross-validation builds its training
// folds without touching the rows again.
struct GramStats {
  std::size_t n = 0;
  Vector sum_x;
  double sum_y = 0.0;
  Matrix xtx;
  Vector xty;
  double yty = 0.0;

  static GramStats from(const Matrix& x, const Vector& y);

  GramStats& operator+=(const GramStats& other);
  GramStats& operator-=(const GramStats& other);
};

// Cyclic coordinate descent for
//   (1/2n) ||y_c - X_c w||^2 + lambda ||w||_1
// on centered data, in covariance-update form: each accepted coordinate
// move costs O(p) regardless of n. The solution is kept between calls to
// solve(), so a decreasing sequence of lambdas is a warm-started path.
class LassoPath {
 public:
  explicit LassoPath(const GramStats& stats, LassoOptions options = {});
  LassoPath(const Matrix& x, const Vector& y, LassoOptions options = {});

  // Smallest lambda with an all-zero solution: max_j |x_j^T y_c| / n.
  double lambda_max() const;

  FitResult solve(double lambda);

  // One pass over the coordinates; returns the largest |change|.
  double sweep(double lambda, bool active_only = false);

  double objective(double lambda) const;
  const Vector& coefficients() const { return w_; }
  // Intercept in the coordinates the statistics were accumulated in.
  double intercept() const;
  void reset();

 private:
  void init(const GramStats& stats);
  // Exact solve on the current active set with its signs held fixed; kept
  // only when every sign survives. The next full sweep checks the rest.
  bool polish(double lambda);

  LassoOptions options_;
  std::size_t n_ = 0;
  Vector mean_x_;
  double mean_y_ = 0.0;
  Matrix gram_;   // X_c^T X_c / n
  Vector xty_;    // X_c^T y_c / n
  double yty_ = 0.0;
  Vector w_;
  Vector grad_;   // xty_ - gram_ w_
};

// Least squares with intercept via column-pivoted QR on centered data.
// Throws RankError when n <= p or the design is numerically singular
// (|R_11| / |R_pp| above 1e10).
FitResult ols_fit(const Matrix& x, const Vector& y);

// Cold-start lasso at a single penalty. A fit that hits the sweep cap is
// returned with converged = false.
FitResult lasso_fit(const Matrix& x, const Vector& y, double lambda, LassoOptions options = {});

// grid_size points, log-spaced from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, std::size_t grid_size, double ratio = 1e-3);

struct CvPath {
  std::vector<double> lambdas;
  std::vector<double> cv_mse;  // mean over folds of per-fold validation MSE
  std::size_t best = 0;
  FitResult fit;  // refit on all rows at lambdas[best]
  std::vector<std::size_t> fold_of;
};

// K-fold cross-validated lasso. Folds come from a seeded shuffle (row at
// shuffled position i goes to fold i mod K); the chosen lambda minimizes
// mean validation MSE, earliest (largest) lambda on ties.
CvPath lasso_cv_path(const Matrix& x, const Vector& y, std::size_t folds, std::size_t grid_size,
                     std::uint64_t seed, LassoOptions options = {});
FitResult lasso_cv(const Matrix& x, const Vector& y, std::size_t folds, std::size_t grid_size,
                   std::uint64_t seed, LassoOptions options = {});

ImportanceVector importance(const FitResult& fit);

// Two-sided p-values of the OLS t-statistics, n - p - 1 degrees of freedom.
Vector ols_pvalues(const Matrix& x, const Vector& y);

// 2 * P(T_df >= |t|) through the regularized incomplete beta function.
double t_two_sided_pvalue(double t, double df);

enum class EstimatorKind { Ols, Lasso, LassoCv };

struct Estimator {
  EstimatorKind kind = EstimatorKind::LassoCv;
  double lambda = 0.0;  // only for Lasso
  std::size_t folds = 5;
  std::size_t grid_size = 100;
  LassoOptions lasso;
};

// "ols", "lasso_cv", or "lasso:<lambda>".
Estimator parse_estimator(std::string_view text);
std::string to_string(const Estimator& est);

// The seed only matters for LassoCv (fold assignment).
FitResult fit_estimator(const Matrix& x, const Vector& y, const Estimator& est, std::uint64_t seed);

}  // namespace fdrsel
