#pragma once

// Dense matrices over the rationals with exact Gaussian elimination.

#include <optional>
#include <vector>

#include "fputlab/rational.hpp"

namespace fputlab {

using RationalVector = std::vector<Rational>;

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  RationalMatrix(std::initializer_list<std::initializer_list<long>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  RationalVector column(std::size_t j) const;
  RationalMatrix transpose() const;
  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> a_;
};

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
RationalVector operator*(const RationalMatrix& a, const RationalVector& x);

// Reduced row echelon form; `pivots` receives the pivot columns.
RationalMatrix rref(RationalMatrix m, std::vector<std::size_t>* pivots = nullptr);
std::size_t rank(const RationalMatrix& m);
Rational determinant(RationalMatrix m);
std::optional<RationalMatrix> inverse(const RationalMatrix& m);
// Basis of {x : m x = 0}.
std::vector<RationalVector> nullspace(const RationalMatrix& m);
// Matrix with the given vectors as rows.
RationalMatrix fromRows(const std::vector<RationalVector>& rows);

}  // namespace fputlab
