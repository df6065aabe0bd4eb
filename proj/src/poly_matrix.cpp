#include "dacurv/poly_matrix.hpp"

#include <algorithm>
#include <numeric>

namespace dacurv {

PolyMatrix::PolyMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

PolyMatrix PolyMatrix::from_rows(const std::vector<VectorPolynomial>& rows) {
  if (rows.empty()) return PolyMatrix();
  std::size_t n = rows.front().ambient_dim();
  PolyMatrix m(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].ambient_dim() != n) throw InputError("rows of unequal length");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

PolyMatrix PolyMatrix::identity(std::size_t n) {
  PolyMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Polynomial(1L);
  return m;
}

const Polynomial& PolyMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw InputError("matrix index out of range");
  return (*this)(i, j);
}

PolyMatrix PolyMatrix::submatrix(const std::vector<std::size_t>& row_idx,
                                 const std::vector<std::size_t>& col_idx) const {
  PolyMatrix s(row_idx.size(), col_idx.size());
  for (std::size_t a = 0; a < row_idx.size(); ++a)
    for (std::size_t b = 0; b < col_idx.size(); ++b) s(a, b) = at(row_idx[a], col_idx[b]);
  return s;
}

PolyMatrix PolyMatrix::transpose() const {
  PolyMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

PolyMatrix PolyMatrix::restrict_to(std::uint32_t m) const {
  PolyMatrix r = *this;
  for (auto& p : r.entries_) p = p.restrict_to(m);
  return r;
}

std::uint32_t PolyMatrix::max_variable() const {
  std::uint32_t v = 0;
  for (const auto& p : entries_) v = std::max(v, p.max_variable());
  return v;
}

int PolyMatrix::degree() const {
  int d = kZeroDegree;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

std::vector<std::complex<double>> PolyMatrix::evaluate(
    std::span<const std::complex<double>> point) const {
  std::vector<std::complex<double>> out(entries_.size());
  for (std::size_t k = 0; k < entries_.size(); ++k) out[k] = entries_[k].evaluate(point);
  return out;
}

std::vector<Rational> PolyMatrix::evaluate(std::span<const Rational> point) const {
  std::vector<Rational> out(entries_.size());
  for (std::size_t k = 0; k < entries_.size(); ++k) out[k] = entries_[k].evaluate(point);
  return out;
}

namespace {

// Expansion over an index view avoids copying submatrices at every level.
Polynomial laplace(const PolyMatrix& m, std::vector<std::size_t>& rows, std::vector<std::size_t>& cols) {
  const std::size_t n = rows.size();
  if (n == 0) return Polynomial(1L);
  if (n == 1) return m(rows[0], cols[0]);
  if (n == 2) {
    return m(rows[0], cols[0]) * m(rows[1], cols[1]) - m(rows[0], cols[1]) * m(rows[1], cols[0]);
  }

  // Pick the line with the most zero entries.
  std::size_t best_line = 0;
  bool best_is_row = true;
  std::size_t best_zeros = 0;
  bool any = false;
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t zr = 0;
    std::size_t zc = 0;
    for (std::size_t b = 0; b < n; ++b) {
      zr += m(rows[a], cols[b]).is_zero();
      zc += m(rows[b], cols[a]).is_zero();
    }
    if (!any || zr > best_zeros) {
      best_line = a, best_is_row = true, best_zeros = zr, any = true;
    }
    if (zc > best_zeros) best_line = a, best_is_row = false, best_zeros = zc;
  }
  if (best_zeros == n) return Polynomial();

  Polynomial det;
  for (std::size_t b = 0; b < n; ++b) {
    std::size_t r = best_is_row ? best_line : b;
    std::size_t c = best_is_row ? b : best_line;
    const Polynomial& entry = m(rows[r], cols[c]);
    if (entry.is_zero()) continue;
    std::vector<std::size_t> sub_rows = rows;
    std::vector<std::size_t> sub_cols = cols;
    sub_rows.erase(sub_rows.begin() + static_cast<std::ptrdiff_t>(r));
    sub_cols.erase(sub_cols.begin() + static_cast<std::ptrdiff_t>(c));
    Polynomial term = entry * laplace(m, sub_rows, sub_cols);
    if ((r + c) % 2) det -= term;
    else det += term;
  }
  return det;
}

void require_square(const PolyMatrix& m) {
  if (!m.is_square()) {
    throw InputError("determinant of a non-square " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + " matrix");
  }
}

}  // namespace

Polynomial determinant_laplace(const PolyMatrix& m) {
  require_square(m);
  std::vector<std::size_t> rows(m.rows());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::size_t> cols = rows;
  return laplace(m, rows, cols);
}

Polynomial determinant_bareiss(const PolyMatrix& input) {
  require_square(input);
  const std::size_t n = input.rows();
  if (n == 0) return Polynomial(1L);
  PolyMatrix a = input;
  Polynomial prev(1L);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k).is_zero()) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k).is_zero()) ++swap;
      if (swap == n) return Polynomial();
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(swap, j));
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Polynomial num = a(k, k) * a(i, j) - a(i, k) * a(k, j);
        auto q = num.divide_exact(prev);
        if (!q) throw InconsistencyError("Bareiss step produced an inexact division");
        a(i, j) = std::move(*q);
      }
      a(i, k) = Polynomial();
    }
    prev = a(k, k);
  }
  Polynomial det = a(n - 1, n - 1);
  return negate ? -det : det;
}

Polynomial determinant(const PolyMatrix& m) {
  require_square(m);
  return m.rows() <= 4 ? determinant_laplace(m) : determinant_bareiss(m);
}

Polynomial cofactor(const PolyMatrix& m, std::size_t i, std::size_t j) {
  require_square(m);
  if (i >= m.rows() || j >= m.cols()) {
    throw InputError("cofactor index (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                     ") outside a " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     " matrix");
  }
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < m.rows(); ++k) {
    if (k != i) rows.push_back(k);
    if (k != j) cols.push_back(k);
  }
  Polynomial minor = determinant(m.submatrix(rows, cols));
  return (i + j) % 2 ? -minor : minor;
}

}  // namespace dacurv
