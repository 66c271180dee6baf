#pragma once

#include <cstddef>
#include <vector>

#include "pruw/field.hpp"

namespace pruw {

// Dense row-major matrix over a prime field.
class FieldMatrix {
 public:
  FieldMatrix(std::size_t rows, std::size_t cols, const FieldElement& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  FieldElement& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const FieldElement& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  FieldVector data_;
};

// Solves A X = B for every column of B (each rhs is one FieldVector) by
// Gauss-Jordan elimination. Throws SingularSystem if A is not invertible.
std::vector<FieldVector> solve_columns(FieldMatrix a, std::vector<FieldVector> rhs);

FieldVector solve(const FieldMatrix& a, const FieldVector& b);

}  // namespace pruw
