#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dacurv {

/// Multi-index over an unbounded set of variables z1, z2, ...
///
/// Stored sparsely as (variable, exponent) pairs sorted by variable, with no
/// zero exponents. Variables are 1-based.
class ExponentVector {
 public:
  using Entry = std::pair<std::uint32_t, std::uint32_t>;

  ExponentVector() = default;

  static ExponentVector variable(std::uint32_t var, std::uint32_t exponent = 1);
  /// dense[k] is the exponent of z_{k+1}.
  static ExponentVector from_dense(std::span<const int> dense);
  static ExponentVector from_entries(std::vector<Entry> entries);

  std::uint32_t exponent(std::uint32_t var) const;
  std::uint32_t total_degree() const noexcept { return total_degree_; }
  /// Largest variable index with a nonzero exponent, 0 for the constant monomial.
  std::uint32_t max_variable() const noexcept;
  bool is_constant() const noexcept { return entries_.empty(); }
  std::span<const Entry> entries() const noexcept { return entries_; }

  /// Dense exponents for variables 1..num_vars; throws if a larger variable occurs.
  std::vector<int> to_dense(std::uint32_t num_vars) const;

  ExponentVector operator*(const ExponentVector& other) const;
  /// this / other, if other divides this.
  std::optional<ExponentVector> divide(const ExponentVector& other) const;

  /// z^alpha rendered as "z1^2*z3", or "1" for the constant monomial.
  std::string to_string() const;

  friend bool operator==(const ExponentVector&, const ExponentVector&) = default;

 private:
  std::vector<Entry> entries_;
  std::uint32_t total_degree_ = 0;
};

/// Graded lexicographic order with z1 > z2 > ...: total degree first, then the
/// exponent of the smallest variable where the two differ.
std::strong_ordering grlex_compare(const ExponentVector& a, const ExponentVector& b);

struct GrlexLess {
  bool operator()(const ExponentVector& a, const ExponentVector& b) const {
    return grlex_compare(a, b) < 0;
  }
};

}  // namespace dacurv
