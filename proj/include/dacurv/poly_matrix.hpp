#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "dacurv/polynomial.hpp"

namespace dacurv {

/// Dense matrix of exact polynomials, row-major. Indices are 0-based.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(std::size_t rows, std::size_t cols);
  /// Rows given as vector polynomials of equal ambient dimension.
  static PolyMatrix from_rows(const std::vector<VectorPolynomial>& rows);
  static PolyMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  const Polynomial& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  Polynomial& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Polynomial& at(std::size_t i, std::size_t j) const;

  PolyMatrix submatrix(const std::vector<std::size_t>& row_idx,
                       const std::vector<std::size_t>& col_idx) const;
  PolyMatrix transpose() const;
  /// Substitute zero for every variable with index > m.
  PolyMatrix restrict_to(std::uint32_t m) const;
  std::uint32_t max_variable() const;
  int degree() const;

  /// Entry values at point (point[k] is z_{k+1}), row-major.
  std::vector<std::complex<double>> evaluate(std::span<const std::complex<double>> point) const;
  std::vector<Rational> evaluate(std::span<const Rational> point) const;

  friend bool operator==(const PolyMatrix&, const PolyMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Polynomial> entries_;
};

/// Exact determinant. Cofactor expansion along the sparsest line for size
/// <= 4, fraction-free Bareiss elimination above that.
Polynomial determinant(const PolyMatrix& m);

/// Same result, always by cofactor expansion; kept as the reference for tests.
Polynomial determinant_laplace(const PolyMatrix& m);
/// Same result, always by Bareiss elimination.
Polynomial determinant_bareiss(const PolyMatrix& m);

/// (-1)^(i+j) times the minor with row i and column j deleted (0-based).
Polynomial cofactor(const PolyMatrix& m, std::size_t i, std::size_t j);

}  // namespace dacurv
