#include <doctest.h>

#include <cmath>
#include <vector>

#include "fdrsel/error.hpp"
#include "fdrsel/estimators.hpp"
#include "fdrsel/preprocess.hpp"
#include "fdrsel/rng.hpp"
#include "oracles.hpp"

using namespace fdrsel;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  return sample_design(static_cast<std::size_t>(n), Matrix::Identity(p, p), seed);
}

Vector noise(Eigen::Index n, std::uint64_t seed) {
  return gen_response(Matrix::Zero(n, 1), Vector::Zero(1), 1.0, seed);
}

std::size_t nonzeros(const Vector& w) { return static_cast<std::size_t>((w.array() != 0.0).count()); }

}  // namespace

TEST_CASE("ols recovers noiseless coefficients") {
  const Matrix x = standardize(gaussian(50, 1, 1));
  const FitResult fit = ols_fit(x, 2.0 * x.col(0));
  CHECK(std::abs(fit.coefficients(0) - 2.0) < 1e-8);
  CHECK(std::abs(fit.intercept) < 1e-8);

  const Matrix q = Eigen::HouseholderQR<Matrix>(gaussian(20, 3, 2)).householderQ() * Matrix::Identity(20, 3);
  const Vector w = Eigen::Vector3d(0.5, -1.0, 3.0);
  CHECK((ols_fit(q, q * w).coefficients - w).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ols matches the normal equations") {
  const Matrix x = gaussian(200, 10, 3) + Matrix::Constant(200, 10, 1.5);
  const Vector y = x * Vector::LinSpaced(10, -1, 1) + noise(200, 4) + Vector::Constant(200, 4.0);
  const FitResult fit = ols_fit(x, y);
  const Vector ref = oracle::normal_equations(x, y);
  CHECK(std::abs(fit.intercept - ref(0)) < 1e-8);
  CHECK((fit.coefficients - ref.tail(10)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ols rejects rank problems") {
  CHECK_THROWS_AS(ols_fit(gaussian(5, 5, 1), noise(5, 2)), RankError);
  Matrix x = gaussian(30, 3, 3);
  x.col(2) = x.col(0) * 2.0;
  CHECK_THROWS_AS(ols_fit(x, noise(30, 4)), RankError);
}

TEST_CASE("lasso soft-threshold closed form") {
  const Matrix x = standardize(gaussian(40, 1, 5));
  const Vector y = x.col(0);
  for (double lambda : {0.0, 0.3, 0.9, 1.0, 1.2}) {
    const FitResult fit = lasso_fit(x, y, lambda);
    CHECK(std::abs(fit.coefficients(0) - std::max(0.0, 1.0 - lambda)) < 1e-7);
  }
}

TEST_CASE("lasso at zero penalty is ols") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = standardize(gaussian(100, 10, seed));
    const Vector y = x * Vector::LinSpaced(10, 0, 2) + noise(100, seed + 100);
    const FitResult a = lasso_fit(x, y, 0.0);
    CHECK(a.converged);
    CHECK((a.coefficients - ols_fit(x, y).coefficients).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("penalty above lambda_max gives exact zeros") {
  const Matrix x = gaussian(60, 8, 6);
  const Vector y = x.col(0) + noise(60, 7);
  LassoPath path(x, y);
  const double lmax = path.lambda_max();
  const Matrix xc = x.rowwise() - x.colwise().mean();
  CHECK(lmax == doctest::Approx((xc.transpose() * (y.array() - y.mean()).matrix()).cwiseAbs().maxCoeff() / 60.0));
  for (double f : {1.0, 1.5, 10.0}) {
    const FitResult fit = lasso_fit(x, y, f * lmax);
    CHECK(fit.coefficients.isZero(0.0));
  }
}

TEST_CASE("lasso KKT conditions") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix x = standardize(sample_design(80, gen_covariance(15, 0.6), seed));
    const Vector y = x.leftCols(3) * Eigen::Vector3d(1, -1, 0.5) + noise(80, seed + 50);
    LassoPath probe(x, y);
    const double lambda = probe.lambda_max() * (0.02 + 0.9 * static_cast<double>(seed) / 20.0);
    const FitResult fit = lasso_fit(x, y, lambda);
    const Vector r = (y.array() - y.mean()).matrix() - x * fit.coefficients;
    const Vector g = x.transpose() * r / 80.0;
    for (Eigen::Index j = 0; j < 15; ++j) {
      const double w = fit.coefficients(j);
      if (w == 0.0)
        CHECK(std::abs(g(j)) <= lambda + 1e-5);
      else
        CHECK(std::abs(g(j) - lambda * (w > 0 ? 1.0 : -1.0)) <= 1e-5);
    }
  }
}

TEST_CASE("lasso matches exact two-feature solution") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix x = sample_design(12, gen_covariance(2, 0.8), seed);
    const Vector y = x.col(0) * 0.7 + noise(12, seed + 1000);
    LassoPath probe(x, y);
    const double lambda = probe.lambda_max() * static_cast<double>(seed % 10) / 10.0;
    LassoOptions tight;
    tight.tol = 1e-13;
    const FitResult fit = lasso_fit(x, y, lambda, tight);
    CHECK((fit.coefficients - oracle::lasso2_exact(x, y, lambda)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("coordinate descent objective never increases") {
  const Matrix x = sample_design(50, gen_covariance(12, 0.9), 3);
  const Vector y = x.col(4) + noise(50, 9);
  LassoPath path(x, y);
  const double lambda = 0.05 * path.lambda_max();
  double previous = path.objective(lambda);
  for (int s = 0; s < 200; ++s) {
    path.sweep(lambda, s % 3 != 0);
    const double now = path.objective(lambda);
    CHECK(now <= previous + 1e-12);
    previous = now;
  }
}

TEST_CASE("sweep cap reports non-convergence") {
  const Matrix x = sample_design(50, gen_covariance(12, 0.9), 3);
  const Vector y = x.col(4) + noise(50, 9);
  LassoOptions capped;
  capped.max_sweeps = 1;
  const FitResult fit = lasso_fit(x, y, 1e-4, capped);
  CHECK_FALSE(fit.converged);
  CHECK(fit.coefficients.allFinite());
}

TEST_CASE("gram statistics are additive over row blocks") {
  const Matrix x = gaussian(30, 4, 1);
  const Vector y = noise(30, 2);
  GramStats a = GramStats::from(x.topRows(12), y.head(12));
  const GramStats b = GramStats::from(x.bottomRows(18), y.tail(18));
  const GramStats all = GramStats::from(x, y);
  a += b;
  CHECK(a.n == 30);
  CHECK((a.xtx - all.xtx).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a.xty - all.xty).cwiseAbs().maxCoeff() < 1e-10);
  a -= b;
  CHECK(a.n == 12);
  CHECK((a.sum_x - x.topRows(12).colwise().sum().transpose()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(a -= all, InvalidParameter);
}

TEST_CASE("lambda grid is log spaced") {
  const auto g = lambda_grid(2.0, 4, 1e-3);
  CHECK(g.front() == 2.0);
  CHECK(g.back() == doctest::Approx(2e-3));
  CHECK(g[1] / g[0] == doctest::Approx(g[3] / g[2]));
  CHECK_THROWS_AS(lambda_grid(1.0, 0), InvalidParameter);
}

TEST_CASE("leave-one-out CV curve matches brute force") {
  const Matrix x = sample_design(10, gen_covariance(2, 0.3), 21);
  const Vector y = x * Eigen::Vector2d(1.0, -0.4) + 0.5 * noise(10, 22);
  LassoOptions tight;
  tight.tol = 1e-13;
  const CvPath cv = lasso_cv_path(x, y, 10, 15, 5, tight);

  for (std::size_t l = 0; l < cv.lambdas.size(); ++l) {
    double mse = 0.0;
    for (Eigen::Index i = 0; i < 10; ++i) {
      Matrix xt(9, 2);
      Vector yt(9);
      for (Eigen::Index r = 0, k = 0; r < 10; ++r)
        if (r != i) {
          xt.row(k) = x.row(r);
          yt(k++) = y(r);
        }
      const Vector w = oracle::lasso2_exact(xt, yt, cv.lambdas[l]);
      const double b = yt.mean() - xt.colwise().mean().dot(w.transpose());
      const double e = y(i) - b - x.row(i).dot(w.transpose());
      mse += e * e;
    }
    CHECK(std::abs(cv.cv_mse[l] - mse / 10.0) < 1e-8);
  }
}

TEST_CASE("CV on noiseless data picks a small penalty and the true support") {
  const Matrix x = standardize(gaussian(400, 10, 31));
  Vector w = Vector::Zero(10);
  w(1) = 2.0;
  w(4) = -1.5;
  w(7) = 3.0;
  const Vector y = x * w;
  const CvPath cv = lasso_cv_path(x, y, 5, 100, 9);
  CHECK(cv.lambdas[cv.best] <= 1e-2 * cv.lambdas.front() * (1 + 1e-12));
  for (Eigen::Index j = 0; j < 10; ++j) CHECK((cv.fit.coefficients(j) != 0.0) == (w(j) != 0.0));
}

TEST_CASE("CV on pure noise keeps the fit sparse") {
  double share = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const Matrix x = standardize(gaussian(200, 50, derive_seed(seed, {1})));
    const FitResult fit = lasso_cv(x, noise(200, derive_seed(seed, {2})), 5, 100, seed);
    share += static_cast<double>(nonzeros(fit.coefficients)) / 50.0;
  }
  MESSAGE("mean nonzero share under the null: " << share / seeds);
  CHECK(share / seeds <= 0.10);
}

TEST_CASE("CV folds are balanced and seeded") {
  const Matrix x = gaussian(23, 3, 1);
  const Vector y = noise(23, 2);
  const CvPath a = lasso_cv_path(x, y, 5, 10, 7);
  std::vector<int> sizes(5, 0);
  for (std::size_t f : a.fold_of) ++sizes[f];
  CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
  CHECK(lasso_cv_path(x, y, 5, 10, 7).fold_of == a.fold_of);
  CHECK_THROWS_AS(lasso_cv_path(x, y, 1, 10, 7), InvalidParameter);
  CHECK_THROWS_AS(lasso_cv_path(gaussian(3, 2, 1), noise(3, 1), 5, 10, 7), InvalidParameter);
}

TEST_CASE("importance is the absolute coefficient") {
  FitResult fit;
  fit.coefficients = Eigen::Vector3d(-2, 0, 3);
  CHECK(importance(fit).z == Eigen::Vector3d(2, 0, 3));
  fit.coefficients = -fit.coefficients;
  CHECK(importance(fit).z == Eigen::Vector3d(2, 0, 3));
  fit.coefficients = Vector::Zero(4);
  CHECK(importance(fit).z.isZero(0.0));
}

TEST_CASE("two-sided t p-values") {
  // Reference values from mpmath at 30 digits.
  struct Row {
    double t, df, p;
  };
  const Row rows[] = {
      {2.228, 10, 0.050011771817111365},     {1.0, 5, 0.3632174676491226256},
      {3.5, 30, 0.0014768074376442530632},   {0.5, 1, 0.70483276469913345165},
      {10, 3, 0.0021283990584141500574},     {1.96, 1000, 0.050273184955748718435},
      {0.1, 2, 0.92946543841414016922},      {4.0, 95, 0.00012534949020000633304},
  };
  for (const Row& r : rows) {
    CHECK(std::abs(t_two_sided_pvalue(r.t, r.df) - r.p) < 1e-10);
    CHECK(t_two_sided_pvalue(-r.t, r.df) == t_two_sided_pvalue(r.t, r.df));
  }
  CHECK(std::abs(t_two_sided_pvalue(2.228, 10) - 0.050) < 5e-4);
  CHECK(t_two_sided_pvalue(0.0, 7) == 1.0);
  CHECK_THROWS_AS(t_two_sided_pvalue(1.0, 0.0), InvalidParameter);
}

TEST_CASE("ols p-values agree with the t statistics") {
  const Matrix x = gaussian(40, 3, 8);
  const Vector y = x.col(0) + noise(40, 9);
  const Vector p = ols_pvalues(x, y);
  // Independent route: covariance from the normal equations.
  Matrix a(40, 4);
  a.col(0).setOnes();
  a.rightCols(3) = x;
  const Matrix inv = (a.transpose() * a).inverse();
  const Vector beta = inv * a.transpose() * y;
  const double s2 = (y - a * beta).squaredNorm() / 36.0;
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double t = beta(j + 1) / std::sqrt(s2 * inv(j + 1, j + 1));
    CHECK(std::abs(p(j) - t_two_sided_pvalue(t, 36.0)) < 1e-10);
  }
  CHECK_THROWS_AS(ols_pvalues(gaussian(5, 4, 1), noise(5, 1)), RankError);
}

TEST_CASE("estimator parsing and dispatch") {
  CHECK(parse_estimator("ols").kind == EstimatorKind::Ols);
  CHECK(parse_estimator("lasso_cv").kind == EstimatorKind::LassoCv);
  const Estimator l = parse_estimator("lasso:0.25");
  CHECK(l.kind == EstimatorKind::Lasso);
  CHECK(l.lambda == 0.25);
  CHECK(parse_estimator(to_string(l)).lambda == 0.25);
  CHECK_THROWS_AS(parse_estimator("ridge"), InvalidParameter);
  CHECK_THROWS_AS(parse_estimator("lasso:-1"), InvalidParameter);

  const Matrix x = gaussian(50, 4, 2);
  const Vector y = x.col(1) + noise(50, 3);
  CHECK(fit_estimator(x, y, l, 0).coefficients == lasso_fit(x, y, 0.25).coefficients);
  CHECK(fit_estimator(x, y, parse_estimator("ols"), 0).coefficients == ols_fit(x, y).coefficients);
  CHECK(fit_estimator(x, y, Estimator{}, 4).coefficients == lasso_cv(x, y, 5, 100, 4).coefficients);
}
