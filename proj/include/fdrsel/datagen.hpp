#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace fdrsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sorted, duplicate-free feature indices.
using IndexSet = std::vector<std::size_t>;

struct SignalRange {
  double lo = 0.0;
  double hi = 1.0;
};

enum class SupportPlacement { Random, Contiguous };

// One synthetic experiment: AR(1) Gaussian design, sparse linear signal.
struct Scenario {
  std::size_t n = 600;
  std::size_t p = 200;
  std::size_t p1 = 20;
  double rho = 0.0;
  SignalRange signal_range{1.0, 2.0};
  double noise_sd = 1.0;
  double q = 0.1;
  std::uint64_t seed = 0;
  bool random_signs = false;
  SupportPlacement placement = SupportPlacement::Random;

  // Throws InvalidParameter naming the first violated constraint.
  void validate() const;
};

struct Dataset {
  Matrix x;
  Vector y;
  std::optional<IndexSet> true_support;
  std::optional<Vector> true_w;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }

  // Finite entries, matching lengths, support consistent with true_w.
  void validate() const;
};

struct Weights {
  Vector w;
  IndexSet support;
};

// Sigma_kj = rho^|j-k|.
Matrix gen_covariance(std::size_t p, double rho);

// Rows are i.i.d. N(0, sigma), drawn as L z with L the Cholesky factor.
Matrix sample_design(std::size_t n, const Matrix& sigma, std::uint64_t seed);

Weights gen_weights(std::size_t p, std::size_t p1, SignalRange range, std::uint64_t seed,
                    bool random_signs = false,
                    SupportPlacement placement = SupportPlacement::Random);

// y = Xw + eps, eps ~ N(0, noise_sd^2 I).
Vector gen_response(const Matrix& x, const Vector& w, double noise_sd, std::uint64_t seed);

// Draws a complete dataset for the scenario; sub-seeds derive from `seed`.
Dataset generate(const Scenario& scenario, std::uint64_t seed);

}  // namespace fdrsel
