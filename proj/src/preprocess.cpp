#include "fdrsel/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "fdrsel/error.hpp"
#include "fdrsel/rng.hpp"

namespace fdrsel {

Matrix standardize(const Matrix& x) {
  const auto n = x.rows();
  if (n < 2) throw InvalidParameter("standardize needs at least 2 rows");
  Matrix out(n, x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const auto centered = (x.col(j).array() - mean).matrix();
    const double var = centered.squaredNorm() / static_cast<double>(n);
    // Relative cutoff: a column that is constant up to rounding counts as degenerate.
    const double scale = std::max(1.0, x.col(j).cwiseAbs().maxCoeff());
    if (!(var > 1e-24 * scale * scale)) throw DegenerateColumn(static_cast<std::size_t>(j));
    out.col(j) = centered / std::sqrt(var);
  }
  return out;
}

Dataset take_rows(const Dataset& d, const RowIndices& rows) {
  Dataset out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.x.resize(m, d.x.cols());
  out.y.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    out.x.row(i) = d.x.row(r);
    out.y(i) = d.y(r);
  }
  out.true_support = d.true_support;
  out.true_w = d.true_w;
  return out;
}

SplitPair split_half(const Dataset& d, std::uint64_t seed) {
  const std::size_t n = d.rows();
  if (n < 4) throw InvalidParameter("split_half needs n >= 4, got " + std::to_string(n));
  RowIndices perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  const std::size_t n_train = (n + 1) / 2;
  SplitPair out;
  out.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.valid_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.valid_indices.begin(), out.valid_indices.end());
  out.train = take_rows(d, out.train_indices);
  out.valid = take_rows(d, out.valid_indices);
  return out;
}

RowIndices draw_rows(std::size_t n, std::size_t size, std::uint64_t seed, bool with_replacement) {
  Rng rng = make_rng(seed);
  RowIndices rows;
  if (with_replacement) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    rows.resize(size);
    for (auto& r : rows) r = pick(rng);
  } else {
    if (size > n) throw InvalidParameter("subsample size exceeds n without replacement");
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(size);
  }
  return rows;
}

SubsampleSet subsample(const Dataset& d, std::size_t count, std::size_t size, std::uint64_t seed,
                       bool with_replacement) {
  if (count < 2) throw InvalidParameter("subsample count must be at least 2");
  if (size < 2) throw InvalidParameter("subsample size must be at least 2");
  if (d.rows() == 0) throw InvalidParameter("cannot subsample an empty dataset");
  SubsampleSet out;
  out.subsample_size = size;
  out.samples.reserve(count);
  out.rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.rows.push_back(draw_rows(d.rows(), size, derive_seed(seed, {i}), with_replacement));
    out.samples.push_back(take_rows(d, out.rows.back()));
  }
  return out;
}

}  // namespace fdrsel
