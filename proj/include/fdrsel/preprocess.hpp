#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fdrsel/datagen.hpp"

namespace fdrsel {

using RowIndices = std::vector<std::size_t>;

struct SplitPair {
  Dataset train;
  Dataset valid;
  RowIndices train_indices;
  RowIndices valid_indices;
};

struct SubsampleSet {
  std::vector<Dataset> samples;
  std::vector<RowIndices> rows;  // rows[i] are the source rows of samples[i]
  std::size_t k = 0;
  std::size_t k_prime = 0;
  std::size_t subsample_size = 0;
};

// Centers each column and scales it to unit population variance (divisor n).
// Throws DegenerateColumn for a column with zero variance.
Matrix standardize(const Matrix& x);

// Copies the given rows of `d`, carrying the known truth along.
Dataset take_rows(const Dataset& d, const RowIndices& rows);

// Uniformly random partition; train gets ceil(n/2) rows, valid floor(n/2).
// Neither half is standardized here.
SplitPair split_half(const Dataset& d, std::uint64_t seed);

// `count` independent subsamples of `size` rows each. With replacement by
// default; without replacement requires size <= n.
SubsampleSet subsample(const Dataset& d, std::size_t count, std::size_t size, std::uint64_t seed,
                       bool with_replacement = true);

RowIndices draw_rows(std::size_t n, std::size_t size, std::uint64_t seed, bool with_replacement);

}  // namespace fdrsel
