#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "fdrsel/datagen.hpp"
#include "fdrsel/error.hpp"

using namespace fdrsel;

namespace {

double sample_corr(const Matrix& x, Eigen::Index a, Eigen::Index b) {
  const Vector u = x.col(a).array() - x.col(a).mean();
  const Vector v = x.col(b).array() - x.col(b).mean();
  return u.dot(v) / std::sqrt(u.squaredNorm() * v.squaredNorm());
}

}  // namespace

TEST_CASE("covariance entries are powers of rho") {
  CHECK(gen_covariance(3, 0.0) == Matrix::Identity(3, 3));
  Matrix expected(3, 3);
  expected << 1, .5, .25, .5, 1, .5, .25, .5, 1;
  CHECK(gen_covariance(3, 0.5) == expected);
  CHECK_THROWS_AS(gen_covariance(3, 1.0), InvalidParameter);
  CHECK_THROWS_AS(gen_covariance(3, -0.1), InvalidParameter);
}

TEST_CASE("covariance is symmetric with unit diagonal") {
  for (std::size_t p : {1, 7, 64, 200})
    for (double rho : {0.0, 0.5, 0.7, 0.9}) {
      const Matrix s = gen_covariance(p, rho);
      CHECK(s == s.transpose());
      CHECK((s.diagonal().array() == 1.0).all());
    }
}

TEST_CASE("high-correlation covariance is positive definite") {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(gen_covariance(50, 0.9));
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("sampled design reproduces the target correlation") {
  const Matrix a = sample_design(10000, Matrix::Identity(2, 2), 3);
  CHECK(std::abs(sample_corr(a, 0, 1)) < 0.05);
  const Matrix b = sample_design(10000, gen_covariance(2, 0.5), 4);
  CHECK(std::abs(sample_corr(b, 0, 1) - 0.5) < 0.05);
  CHECK(sample_design(50, gen_covariance(4, 0.7), 9) == sample_design(50, gen_covariance(4, 0.7), 9));
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(sample_design(5, bad, 1), NumericError);
}

TEST_CASE("weights respect support size and range") {
  const Weights none = gen_weights(5, 0, {1, 2}, 1);
  CHECK(none.w.isZero());
  CHECK(none.support.empty());

  const Weights full = gen_weights(5, 5, {1, 2}, 1);
  CHECK((full.w.array() > 1.0).all());
  CHECK((full.w.array() < 2.0).all());

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Weights big = gen_weights(1000, 100, {0, 0.5}, seed);
    CHECK(big.support.size() == 100);
    CHECK((big.w.array() != 0.0).count() == 100);
    for (std::size_t j : big.support) {
      CHECK(big.w(static_cast<Eigen::Index>(j)) > 0.0);
      CHECK(big.w(static_cast<Eigen::Index>(j)) < 0.5);
    }
    CHECK(std::is_sorted(big.support.begin(), big.support.end()));
  }
  CHECK_THROWS_AS(gen_weights(5, 6, {1, 2}, 1), InvalidParameter);

  const Weights block = gen_weights(10, 3, {1, 2}, 2, false, SupportPlacement::Contiguous);
  CHECK(block.support.back() - block.support.front() == 2);

  const Weights signed_w = gen_weights(400, 400, {1, 2}, 5, true);
  CHECK((signed_w.w.array() < 0.0).any());
  CHECK((signed_w.w.array().abs() > 1.0).all());
}

TEST_CASE("response examples") {
  const Matrix x = Matrix::Random(6, 3);
  CHECK(gen_response(x, Vector::Zero(3), 0.0, 1).isZero(0.0));
  const Matrix eye = Matrix::Identity(4, 4);
  const Vector e1 = Vector::Unit(4, 0);
  CHECK(gen_response(eye, e1, 0.0, 1) == eye.col(0));
}

TEST_CASE("response mean converges to Xw") {
  Matrix x(5, 2);
  x << 1, 0, 0, 1, 1, 1, -1, 2, 0.5, -0.5;
  const Vector w = Eigen::Vector2d(1.5, -0.5);
  const int reps = 10000;
  Vector sum = Vector::Zero(5);
  for (int r = 0; r < reps; ++r) sum += gen_response(x, w, 1.0, static_cast<std::uint64_t>(r));
  const Vector mean = sum / reps;
  // Four Monte Carlo standard errors of a unit-variance mean.
  CHECK((mean - x * w).cwiseAbs().maxCoeff() < 4.0 / std::sqrt(reps));
}

TEST_CASE("generate is a pure function of scenario and seed") {
  Scenario s;
  s.n = 40;
  s.p = 12;
  s.p1 = 3;
  s.rho = 0.5;
  const Dataset a = generate(s, 77);
  const Dataset b = generate(s, 77);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(*a.true_support == *b.true_support);
  CHECK(generate(s, 78).x != a.x);
  a.validate();
  CHECK(a.true_support->size() == 3);
}

TEST_CASE("scenario validation") {
  Scenario s;
  CHECK_NOTHROW(s.validate());
  s.rho = 1.0;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s = Scenario{};
  s.p1 = s.p + 1;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s = Scenario{};
  s.n = 3;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s = Scenario{};
  s.signal_range = {2, 1};
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
}

TEST_CASE("dataset validation") {
  Dataset d;
  d.x = Matrix::Ones(4, 2);
  d.y = Vector::Ones(3);
  CHECK_THROWS_AS(d.validate(), DimensionMismatch);
  d.y = Vector::Ones(4);
  d.x(1, 1) = std::nan("");
  CHECK_THROWS_AS(d.validate(), InvalidParameter);
}
