#include "fdrsel/estimators.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "fdrsel/error.hpp"
#include "fdrsel/rng.hpp"

namespace fdrsel {

namespace {

double soft_threshold(double v, double lambda) {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Vector gather(const Vector& y, const std::vector<std::size_t>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  return out;
}

constexpr double kConditionCap = 1e10;

struct QrSolve {
  Eigen::ColPivHouseholderQR<Matrix> qr;
  Vector mean_x;
  double mean_y = 0.0;
  Vector coefficients;
  Vector residual;
};

QrSolve qr_least_squares(const Matrix& x, const Vector& y) {
  if (y.size() != x.rows()) throw DimensionMismatch("response length differs from row count");
  const auto n = x.rows();
  const auto p = x.cols();
  if (n <= p)
    throw RankError("least squares needs n > p (n = " + std::to_string(n) +
                    ", p = " + std::to_string(p) + ")");
  QrSolve s;
  s.mean_x = x.colwise().mean().transpose();
  s.mean_y = y.mean();
  const Matrix xc = x.rowwise() - s.mean_x.transpose();
  const Vector yc = y.array() - s.mean_y;
  s.qr.compute(xc);
  const auto r_diag = s.qr.matrixQR().diagonal().cwiseAbs();
  const double largest = p > 0 ? r_diag.maxCoeff() : 1.0;
  const double smallest = p > 0 ? r_diag.minCoeff() : 1.0;
  if (p > 0 && !(smallest > 0.0 && largest / smallest < kConditionCap))
    throw RankError("design matrix is rank deficient or too ill-conditioned");
  s.coefficients = s.qr.solve(yc);
  s.residual = yc - xc * s.coefficients;
  return s;
}

}  // namespace

GramStats GramStats::from(const Matrix& x, const Vector& y) {
  if (y.size() != x.rows()) throw DimensionMismatch("response length differs from row count");
  GramStats s;
  s.n = static_cast<std::size_t>(x.rows());
  s.sum_x = x.colwise().sum().transpose();
  s.sum_y = y.sum();
  s.xtx = Matrix::Zero(x.cols(), x.cols());
  s.xtx.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  s.xtx.triangularView<Eigen::StrictlyUpper>() = s.xtx.transpose();
  s.xty = x.transpose() * y;
  s.yty = y.squaredNorm();
  return s;
}

GramStats& GramStats::operator+=(const GramStats& other) {
  if (n == 0) return *this = other;
  n += other.n;
  sum_x += other.sum_x;
  sum_y += other.sum_y;
  xtx += other.xtx;
  xty += other.xty;
  yty += other.yty;
  return *this;
}

GramStats& GramStats::operator-=(const GramStats& other) {
  if (other.n > n) throw InvalidParameter("cannot remove more rows than accumulated");
  n -= other.n;
  sum_x -= other.sum_x;
  sum_y -= other.sum_y;
  xtx -= other.xtx;
  xty -= other.xty;
  yty -= other.yty;
  return *this;
}

LassoPath::LassoPath(const GramStats& stats, LassoOptions options) : options_(options) {
  init(stats);
}

LassoPath::LassoPath(const Matrix& x, const Vector& y, LassoOptions options) : options_(options) {
  if (y.size() != x.rows()) throw DimensionMismatch("response length differs from row count");
  if (x.rows() == 0) throw InvalidParameter("lasso needs at least one row");
  const Vector mx = x.colwise().mean().transpose();
  const double my = y.mean();
  const Matrix xc = x.rowwise() - mx.transpose();
  const Vector yc = y.array() - my;
  init(GramStats::from(xc, yc));
  mean_x_ = mx;
  mean_y_ = my;
}

void LassoPath::init(const GramStats& s) {
  if (s.n == 0) throw InvalidParameter("lasso needs at least one row");
  n_ = s.n;
  const double n = static_cast<double>(s.n);
  mean_x_ = s.sum_x / n;
  mean_y_ = s.sum_y / n;
  gram_ = (s.xtx - n * mean_x_ * mean_x_.transpose()) / n;
  xty_ = (s.xty - n * mean_y_ * mean_x_) / n;
  yty_ = (s.yty - n * mean_y_ * mean_y_) / n;
  reset();
}

void LassoPath::reset() {
  w_ = Vector::Zero(gram_.cols());
  grad_ = xty_;
}

double LassoPath::lambda_max() const {
  return xty_.size() > 0 ? xty_.cwiseAbs().maxCoeff() : 0.0;
}

double LassoPath::intercept() const { return mean_y_ - mean_x_.dot(w_); }

double LassoPath::objective(double lambda) const {
  const Vector gw = gram_ * w_;
  return 0.5 * (yty_ - 2.0 * w_.dot(xty_) + w_.dot(gw)) + lambda * w_.lpNorm<1>();
}

double LassoPath::sweep(double lambda, bool active_only) {
  const double diag_floor = 1e-12 * std::max(1.0, gram_.diagonal().maxCoeff());
  double max_change = 0.0;
  for (Eigen::Index j = 0; j < w_.size(); ++j) {
    const double wj = w_(j);
    if (active_only && wj == 0.0) continue;
    const double d = gram_(j, j);
    if (d <= diag_floor) continue;
    const double updated = soft_threshold(grad_(j) + d * wj, lambda) / d;
    const double delta = updated - wj;
    if (delta != 0.0) {
      grad_.noalias() -= gram_.col(j) * delta;
      w_(j) = updated;
      max_change = std::max(max_change, std::abs(delta));
    }
  }
  return max_change;
}

bool LassoPath::polish(double lambda) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < w_.size(); ++j)
    if (w_(j) != 0.0) active.push_back(j);
  const auto a = static_cast<Eigen::Index>(active.size());
  if (a == 0) return false;
  Matrix g(a, a);
  Vector rhs(a);
  for (Eigen::Index r = 0; r < a; ++r) {
    rhs(r) = xty_(active[r]) - lambda * (w_(active[r]) > 0.0 ? 1.0 : -1.0);
    for (Eigen::Index c = 0; c < a; ++c) g(r, c) = gram_(active[r], active[c]);
  }
  const Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) return false;
  const Vector sol = llt.solve(rhs);
  for (Eigen::Index r = 0; r < a; ++r)
    if (!(sol(r) * w_(active[r]) > 0.0)) return false;
  for (Eigen::Index r = 0; r < a; ++r) w_(active[r]) = sol(r);
  grad_ = xty_;
  for (Eigen::Index r = 0; r < a; ++r) grad_.noalias() -= gram_.col(active[r]) * sol(r);
  return true;
}

FitResult LassoPath::solve(double lambda) {
  if (!(lambda >= 0.0)) throw InvalidParameter("lambda must be nonnegative");
  FitResult out;
  out.lambda = lambda;
  out.converged = false;
  int sweeps = 0;
#ifndef NDEBUG
  double previous = objective(lambda);
  auto check_descent = [&] {
    const double now = objective(lambda);
    assert(now <= previous + 1e-12 * std::max(1.0, std::abs(previous)));
    previous = now;
  };
#else
  auto check_descent = [] {};
#endif
  while (sweeps < options_.max_sweeps) {
    const double change = sweep(lambda, false);
    ++sweeps;
    check_descent();
    if (change < options_.tol) {
      out.converged = true;
      break;
    }
    while (sweeps < options_.max_sweeps) {
      const double inner = sweep(lambda, true);
      ++sweeps;
      check_descent();
      if (inner < options_.tol) break;
      if (sweeps % 4 == 0 && polish(lambda)) {
        check_descent();
        break;
      }
    }
  }
  out.iterations = sweeps;
  out.coefficients = w_;
  out.intercept = intercept();
  return out;
}

FitResult ols_fit(const Matrix& x, const Vector& y) {
  QrSolve s = qr_least_squares(x, y);
  FitResult out;
  out.intercept = s.mean_y - s.mean_x.dot(s.coefficients);
  out.coefficients = std::move(s.coefficients);
  out.lambda = 0.0;
  out.converged = true;
  out.iterations = 1;
  return out;
}

FitResult lasso_fit(const Matrix& x, const Vector& y, double lambda, LassoOptions options) {
  LassoPath path(x, y, options);
  FitResult fit = path.solve(lambda);
  if (!fit.converged)
    std::clog << "warning: lasso did not converge within " << options.max_sweeps
              << " sweeps (lambda = " << lambda << ")\n";
  return fit;
}

std::vector<double> lambda_grid(double lambda_max, std::size_t grid_size, double ratio) {
  if (grid_size < 1) throw InvalidParameter("lambda grid needs at least one point");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw InvalidParameter("lambda ratio must lie in (0, 1]");
  std::vector<double> grid(grid_size);
  if (grid_size == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  const double step = std::log(ratio) / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i)
    grid[i] = lambda_max * std::exp(step * static_cast<double>(i));
  return grid;
}

CvPath lasso_cv_path(const Matrix& x, const Vector& y, std::size_t folds, std::size_t grid_size,
                     std::uint64_t seed, LassoOptions options) {
  if (y.size() != x.rows()) throw DimensionMismatch("response length differs from row count");
  const auto n = static_cast<std::size_t>(x.rows());
  if (folds < 2) throw InvalidParameter("cross-validation needs at least 2 folds");
  if (n < folds)
    throw InvalidParameter("cross-validation needs n >= folds (n = " + std::to_string(n) +
                           ", folds = " + std::to_string(folds) + ")");

  // Shift to full-data means first; the fold sums then stay well scaled.
  const Vector mx = x.colwise().mean().transpose();
  const double my = y.mean();
  const Matrix xs = x.rowwise() - mx.transpose();
  const Vector ys = y.array() - my;

  CvPath out;
  out.fold_of.resize(n);
  {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng = make_rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) out.fold_of[perm[i]] = i % folds;
  }
  std::vector<std::vector<std::size_t>> members(folds);
  for (std::size_t i = 0; i < n; ++i) members[out.fold_of[i]].push_back(i);

  std::vector<Matrix> fold_x(folds);
  std::vector<Vector> fold_y(folds);
  std::vector<GramStats> fold_stats(folds);
  GramStats total;
  for (std::size_t f = 0; f < folds; ++f) {
    fold_x[f] = gather_rows(xs, members[f]);
    fold_y[f] = gather(ys, members[f]);
    fold_stats[f] = GramStats::from(fold_x[f], fold_y[f]);
    total += fold_stats[f];
  }

  LassoPath full(total, options);
  out.lambdas = lambda_grid(full.lambda_max(), grid_size);
  out.cv_mse.assign(grid_size, 0.0);

  for (std::size_t f = 0; f < folds; ++f) {
    GramStats train = total;
    train -= fold_stats[f];
    LassoPath path(train, options);
    const double m = static_cast<double>(members[f].size());
    for (std::size_t l = 0; l < grid_size; ++l) {
      path.solve(out.lambdas[l]);
      const Vector resid =
          (fold_y[f] - fold_x[f] * path.coefficients()).array() - path.intercept();
      out.cv_mse[l] += resid.squaredNorm() / m;
    }
  }
  for (double& v : out.cv_mse) v /= static_cast<double>(folds);

  out.best = static_cast<std::size_t>(
      std::min_element(out.cv_mse.begin(), out.cv_mse.end()) - out.cv_mse.begin());

  FitResult fit;
  int sweeps = 0;
  bool converged = true;
  for (std::size_t l = 0; l <= out.best; ++l) {
    fit = full.solve(out.lambdas[l]);
    sweeps += fit.iterations;
    converged = converged && fit.converged;
  }
  fit.intercept = my - mx.dot(fit.coefficients);
  fit.iterations = sweeps;
  fit.converged = converged;
  if (!converged)
    std::clog << "warning: lasso path did not converge within " << options.max_sweeps
              << " sweeps at some lambda\n";
  out.fit = std::move(fit);
  return out;
}

FitResult lasso_cv(const Matrix& x, const Vector& y, std::size_t folds, std::size_t grid_size,
                   std::uint64_t seed, LassoOptions options) {
  return lasso_cv_path(x, y, folds, grid_size, seed, options).fit;
}

ImportanceVector importance(const FitResult& fit) { return {fit.coefficients.cwiseAbs()}; }

double t_two_sided_pvalue(double t, double df) {
  if (!(df > 0.0)) throw InvalidParameter("degrees of freedom must be positive");
  if (std::isnan(t)) throw InvalidParameter("t statistic is NaN");
  const double a = std::abs(t);
  if (std::isinf(a)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, a)));
}

Vector ols_pvalues(const Matrix& x, const Vector& y) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (n <= p + 1)
    throw RankError("OLS p-values need n > p + 1 (n = " + std::to_string(n) +
                    ", p = " + std::to_string(p) + ")");
  QrSolve s = qr_least_squares(x, y);
  const double df = static_cast<double>(n - p - 1);
  const double sigma2 = s.residual.squaredNorm() / df;

  // cov(w) = sigma^2 P (R^T R)^{-1} P^T; diag of (R^T R)^{-1} = row norms of R^{-1}.
  const Matrix r = s.qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Matrix r_inv =
      r.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
  const auto& perm = s.qr.colsPermutation().indices();
  Vector out(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const Eigen::Index j = perm(i);
    const double se = std::sqrt(sigma2 * r_inv.row(i).squaredNorm());
    const double w = s.coefficients(j);
    double t;
    if (se > 0.0)
      t = w / se;
    else
      t = (w == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
    out(j) = t_two_sided_pvalue(t, df);
  }
  return out;
}

Estimator parse_estimator(std::string_view text) {
  Estimator est;
  if (text == "ols") {
    est.kind = EstimatorKind::Ols;
  } else if (text == "lasso_cv") {
    est.kind = EstimatorKind::LassoCv;
  } else if (text.starts_with("lasso:")) {
    est.kind = EstimatorKind::Lasso;
    const std::string value(text.substr(6));
    std::size_t used = 0;
    try {
      est.lambda = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || !(est.lambda >= 0.0))
      throw InvalidParameter("invalid lasso penalty '" + value + "'");
  } else {
    throw InvalidParameter("unknown estimator '" + std::string(text) +
                           "' (expected ols, lasso_cv or lasso:<lambda>)");
  }
  return est;
}

std::string to_string(const Estimator& est) {
  switch (est.kind) {
    case EstimatorKind::Ols:
      return "ols";
    case EstimatorKind::LassoCv:
      return "lasso_cv";
    case EstimatorKind::Lasso: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "lasso:%.17g", est.lambda);
      return buf;
    }
  }
  return "?";
}

FitResult fit_estimator(const Matrix& x, const Vector& y, const Estimator& est,
                        std::uint64_t seed) {
  switch (est.kind) {
    case EstimatorKind::Ols:
      return ols_fit(x, y);
    case EstimatorKind::Lasso:
      return lasso_fit(x, y, est.lambda, est.lasso);
    case EstimatorKind::LassoCv:
      return lasso_cv(x, y, est.folds, est.grid_size, seed, est.lasso);
  }
  throw InvalidParameter("unknown estimator kind");
}

}  // namespace fdrsel
