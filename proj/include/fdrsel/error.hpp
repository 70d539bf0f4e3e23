#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdrsel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument is outside its legal range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Shapes of matrices/vectors do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Factorization or other numerical failure (e.g. non-PD covariance).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Design is rank deficient or too ill-conditioned for least squares.
class RankError : public Error {
 public:
  using Error::Error;
};

class DegenerateColumn : public Error {
 public:
  explicit DegenerateColumn(std::size_t column)
      : Error("column " + std::to_string(column) + " has zero variance"),
        column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

}  // namespace fdrsel
