#include "fdrsel/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "fdrsel/error.hpp"
#include "fdrsel/rng.hpp"

namespace fdrsel {

void Scenario::validate() const {
  if (n < 4) throw InvalidParameter("n must be at least 4, got " + std::to_string(n));
  if (p < 1) throw InvalidParameter("p must be at least 1");
  if (p1 > p)
    throw InvalidParameter("p1 (" + std::to_string(p1) + ") exceeds p (" + std::to_string(p) + ")");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidParameter("rho must lie in [0, 1)");
  if (!(signal_range.lo >= 0.0 && signal_range.lo < signal_range.hi))
    throw InvalidParameter("signal range must satisfy 0 <= r1 < r2");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
    throw InvalidParameter("noise_sd must be finite and nonnegative");
  if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("q must lie in (0, 1)");
}

void Dataset::validate() const {
  if (y.size() != x.rows())
    throw DimensionMismatch("response length " + std::to_string(y.size()) +
                            " differs from row count " + std::to_string(x.rows()));
  if (!x.allFinite()) throw InvalidParameter("design matrix has non-finite entries");
  if (!y.allFinite()) throw InvalidParameter("response has non-finite entries");
  if (true_support && true_w) {
    const auto nonzero = static_cast<std::size_t>((true_w->array() != 0.0).count());
    if (nonzero != true_support->size())
      throw InvalidParameter("true support size disagrees with nonzero coefficient count");
  }
}

Matrix gen_covariance(std::size_t p, double rho) {
  if (p < 1) throw InvalidParameter("covariance dimension must be at least 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidParameter("rho must lie in [0, 1)");
  const auto dim = static_cast<Eigen::Index>(p);
  Matrix sigma(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    sigma(k, k) = 1.0;
    for (Eigen::Index j = k + 1; j < dim; ++j) {
      // std::pow(0, d) is 0 for d > 0, so rho = 0 yields the identity.
      const double v = std::pow(rho, static_cast<double>(j - k));
      sigma(k, j) = v;
      sigma(j, k) = v;
    }
  }
  return sigma;
}

Matrix sample_design(std::size_t n, const Matrix& sigma, std::uint64_t seed) {
  if (sigma.rows() != sigma.cols()) throw DimensionMismatch("covariance must be square");
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericError("covariance is not positive definite");
  const Matrix lower = llt.matrixL();

  const auto p = sigma.rows();
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Draw row-major so the i-th row depends only on the first i*p draws.
  Matrix z(p, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.cols(); ++i)
    for (Eigen::Index j = 0; j < p; ++j) z(j, i) = normal(rng);
  return (lower * z).transpose();
}

Weights gen_weights(std::size_t p, std::size_t p1, SignalRange range, std::uint64_t seed,
                    bool random_signs, SupportPlacement placement) {
  if (p1 > p) throw InvalidParameter("p1 exceeds p");
  if (!(range.lo >= 0.0 && range.lo < range.hi))
    throw InvalidParameter("signal range must satisfy 0 <= r1 < r2");

  Rng rng = make_rng(seed);
  IndexSet support;
  if (placement == SupportPlacement::Random) {
    std::vector<std::size_t> all(p);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    support.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(p1));
    std::sort(support.begin(), support.end());
  } else {
    support.resize(p1);
    std::iota(support.begin(), support.end(), std::size_t{0});
  }

  Weights out;
  out.w = Vector::Zero(static_cast<Eigen::Index>(p));
  std::uniform_real_distribution<double> magnitude(range.lo, range.hi);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t j : support) {
    double v = magnitude(rng);
    // uniform_real_distribution is half-open; keep the draw strictly inside.
    while (v <= range.lo) v = magnitude(rng);
    if (random_signs && coin(rng)) v = -v;
    out.w(static_cast<Eigen::Index>(j)) = v;
  }
  out.support = std::move(support);
  return out;
}

Vector gen_response(const Matrix& x, const Vector& w, double noise_sd, std::uint64_t seed) {
  if (w.size() != x.cols())
    throw DimensionMismatch("coefficient length " + std::to_string(w.size()) +
                            " differs from column count " + std::to_string(x.cols()));
  if (!(noise_sd >= 0.0)) throw InvalidParameter("noise_sd must be nonnegative");
  Vector y = x * w;
  if (noise_sd > 0.0) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, noise_sd);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += normal(rng);
  }
  return y;
}

Dataset generate(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const Matrix sigma = gen_covariance(scenario.p, scenario.rho);
  Dataset d;
  d.x = sample_design(scenario.n, sigma, derive_seed(seed, {1}));
  Weights weights = gen_weights(scenario.p, scenario.p1, scenario.signal_range,
                                derive_seed(seed, {2}), scenario.random_signs, scenario.placement);
  d.y = gen_response(d.x, weights.w, scenario.noise_sd, derive_seed(seed, {3}));
  d.true_support = std::move(weights.support);
  d.true_w = std::move(weights.w);
  return d;
}

}  // namespace fdrsel
