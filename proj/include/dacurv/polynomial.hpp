#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dacurv/errors.hpp"
#include "dacurv/exponent.hpp"

namespace dacurv {

using Rational = mpq_class;

/// Degree reported for the zero polynomial.
inline constexpr int kZeroDegree = std::numeric_limits<int>::min();

/// Sparse multivariate polynomial over an unbounded variable set.
///
/// Scalar is either Rational (symbolic mode) or double (numeric mode). Mixing
/// the two in one operation does not compile; convert explicitly with
/// to_numeric().
template <class Scalar>
class BasicPolynomial {
 public:
  using TermMap = std::map<ExponentVector, Scalar, GrlexLess>;

  BasicPolynomial() = default;
  explicit BasicPolynomial(const Scalar& c) { add_term(ExponentVector{}, c); }
  explicit BasicPolynomial(long c) : BasicPolynomial(Scalar(c)) {}

  static BasicPolynomial variable(std::uint32_t var) {
    return monomial(ExponentVector::variable(var), Scalar(1));
  }
  static BasicPolynomial monomial(const ExponentVector& e, const Scalar& c) {
    BasicPolynomial p;
    p.add_term(e, c);
    return p;
  }

  bool is_zero() const noexcept { return terms_.empty(); }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t num_terms() const noexcept { return terms_.size(); }

  int degree() const {
    return terms_.empty() ? kZeroDegree : static_cast<int>(terms_.rbegin()->first.total_degree());
  }
  /// Smallest total degree of a term, kZeroDegree for zero.
  int low_degree() const {
    return terms_.empty() ? kZeroDegree : static_cast<int>(terms_.begin()->first.total_degree());
  }
  std::uint32_t max_variable() const {
    std::uint32_t v = 0;
    for (const auto& [e, c] : terms_) v = std::max(v, e.max_variable());
    return v;
  }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_constant());
  }
  bool is_homogeneous() const {
    return terms_.empty() || terms_.begin()->first.total_degree() == terms_.rbegin()->first.total_degree();
  }

  Scalar coefficient(const ExponentVector& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
  }
  const std::pair<const ExponentVector, Scalar>& leading_term() const {
    if (terms_.empty()) throw InputError("leading term of the zero polynomial");
    return *terms_.rbegin();
  }

  void add_term(const ExponentVector& e, Scalar c) {
    canonicalize(c);
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  BasicPolynomial homogeneous_part(std::uint32_t k) const {
    BasicPolynomial out;
    for (const auto& [e, c] : terms_)
      if (e.total_degree() == k) out.terms_.emplace_hint(out.terms_.end(), e, c);
    return out;
  }

  /// Substitute zero for every variable with index > m.
  BasicPolynomial restrict_to(std::uint32_t m) const {
    BasicPolynomial out;
    for (const auto& [e, c] : terms_)
      if (e.max_variable() <= m) out.terms_.emplace_hint(out.terms_.end(), e, c);
    return out;
  }

  BasicPolynomial& operator+=(const BasicPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  BasicPolynomial& operator-=(const BasicPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  BasicPolynomial& operator*=(const Scalar& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) {
      c *= s;
      canonicalize(c);
    }
    return *this;
  }

  friend BasicPolynomial operator+(BasicPolynomial a, const BasicPolynomial& b) { return a += b; }
  friend BasicPolynomial operator-(BasicPolynomial a, const BasicPolynomial& b) { return a -= b; }
  friend BasicPolynomial operator-(BasicPolynomial a) {
    for (auto& [e, c] : a.terms_) c = -c;
    return a;
  }
  friend BasicPolynomial operator*(BasicPolynomial a, const Scalar& s) { return a *= s; }
  friend BasicPolynomial operator*(const Scalar& s, BasicPolynomial a) { return a *= s; }

  friend BasicPolynomial operator*(const BasicPolynomial& a, const BasicPolynomial& b) {
    BasicPolynomial out;
    if (a.is_zero() || b.is_zero()) return out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) out.add_term(ea * eb, ca * cb);
    return out;
  }
  BasicPolynomial& operator*=(const BasicPolynomial& o) { return *this = *this * o; }

  friend bool operator==(const BasicPolynomial& a, const BasicPolynomial& b) {
    return a.terms_ == b.terms_;
  }

  /// Quotient of an exact division, or nullopt when divisor does not divide this.
  std::optional<BasicPolynomial> divide_exact(const BasicPolynomial& divisor) const {
    if (divisor.is_zero()) throw InputError("division by the zero polynomial");
    BasicPolynomial rem = *this;
    BasicPolynomial quot;
    const auto& [lead_e, lead_c] = divisor.leading_term();
    while (!rem.is_zero()) {
      const auto& [re, rc] = rem.leading_term();
      auto q = re.divide(lead_e);
      if (!q) return std::nullopt;
      Scalar qc = rc / lead_c;
      BasicPolynomial step = monomial(*q, qc);
      quot.add_term(*q, qc);
      rem -= step * divisor;
    }
    return quot;
  }

  /// Value at point, where point[k] is the value of z_{k+1}.
  template <class T>
  T evaluate(std::span<const T> point) const {
    T sum(0);
    for (const auto& [e, c] : terms_) {
      T term = convert<T>(c);
      for (const auto& [var, exp] : e.entries()) {
        if (var > point.size())
          throw InputError("evaluation point has no value for z" + std::to_string(var));
        for (std::uint32_t k = 0; k < exp; ++k) term *= point[var - 1];
      }
      sum += term;
    }
    return sum;
  }
  template <class T>
  T evaluate(const std::vector<T>& point) const {
    return evaluate(std::span<const T>(point));
  }

  std::string to_string() const;

 private:
  // mpq_class built from a non-reduced numerator/denominator pair stays
  // unreduced, and unreduced values compare unequal to equal reduced ones.
  static void canonicalize(Scalar& c) {
    if constexpr (std::is_same_v<Scalar, Rational>) c.canonicalize();
  }

  template <class T>
  static T convert(const Scalar& c) {
    if constexpr (std::is_same_v<Scalar, Rational> && !std::is_same_v<T, Rational>) {
      return T(c.get_d());
    } else {
      return T(c);
    }
  }

  TermMap terms_;
};

using Polynomial = BasicPolynomial<Rational>;
using NumericPolynomial = BasicPolynomial<double>;

NumericPolynomial to_numeric(const Polynomial& p);

std::string scalar_to_string(const Rational& c);
std::string scalar_to_string(double c);

template <class Scalar>
std::string BasicPolynomial<Scalar>::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  // Highest degree first reads naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    bool negative = c < 0;
    Scalar mag = negative ? Scalar(-c) : c;
    if (s.empty()) {
      if (negative) s += '-';
    } else {
      s += negative ? " - " : " + ";
    }
    if (e.is_constant()) {
      s += scalar_to_string(mag);
    } else if (mag == 1) {
      s += e.to_string();
    } else {
      s += scalar_to_string(mag) + "*" + e.to_string();
    }
  }
  return s;
}

template <class Scalar>
std::ostream& operator<<(std::ostream& os, const BasicPolynomial<Scalar>& p) {
  return os << p.to_string();
}

/// Vector-valued polynomial (p_1, ..., p_N), an element of P ⊗ C^N.
class VectorPolynomial {
 public:
  VectorPolynomial() = default;
  explicit VectorPolynomial(std::size_t n) : components_(n) {
    if (n == 0) throw InputError("vector polynomial needs at least one component");
  }
  explicit VectorPolynomial(std::vector<Polynomial> components);

  std::size_t ambient_dim() const noexcept { return components_.size(); }
  const Polynomial& operator[](std::size_t i) const { return components_.at(i); }
  Polynomial& operator[](std::size_t i) { return components_.at(i); }
  const std::vector<Polynomial>& components() const noexcept { return components_; }

  bool is_zero() const;
  int degree() const;
  int low_degree() const;
  std::uint32_t max_variable() const;
  /// Indices (0-based) of nonzero components.
  std::vector<std::size_t> support() const;

  VectorPolynomial& operator+=(const VectorPolynomial& o);
  friend VectorPolynomial operator+(VectorPolynomial a, const VectorPolynomial& b) { return a += b; }
  friend VectorPolynomial operator*(const Polynomial& f, const VectorPolynomial& v);
  friend bool operator==(const VectorPolynomial&, const VectorPolynomial&) = default;

  std::string to_string() const;

 private:
  std::vector<Polynomial> components_;
};

}  // namespace dacurv
