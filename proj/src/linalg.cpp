#include "pruw/linalg.hpp"

#include <utility>

#include "pruw/error.hpp"

namespace pruw {

std::vector<FieldVector> solve_columns(FieldMatrix a, std::vector<FieldVector> rhs) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "matrix must be square");
  for (const auto& b : rhs) {
    if (b.size() != n) throw Error(ErrorCode::kDimensionMismatch, "rhs length != matrix size");
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col).is_zero()) ++pivot;
    if (pivot == n) throw Error(ErrorCode::kSingularSystem, "decoding matrix is singular");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      for (auto& b : rhs) std::swap(b[pivot], b[col]);
    }
    const FieldElement inv = a(col, col).inverse();
    for (std::size_t c = col; c < n; ++c) a(col, c) *= inv;
    for (auto& b : rhs) b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      const FieldElement factor = a(r, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      for (auto& b : rhs) b[r] -= factor * b[col];
    }
  }
  return rhs;
}

FieldVector solve(const FieldMatrix& a, const FieldVector& b) {
  return solve_columns(a, {b}).front();
}

}  // namespace pruw
