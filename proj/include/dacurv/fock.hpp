#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dacurv/exec.hpp"
#include "dacurv/exponent.hpp"
#include "dacurv/polynomial.hpp"

namespace dacurv {

inline constexpr std::size_t kDefaultSizeCap = 200000;
inline constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

/// Polynomials of degree <= n in z_1..z_m tensored with C^N, with the
/// Drury-Arveson norm ||z^alpha||^2 = alpha!/|alpha|!.
///
/// Monomials are ordered by degree, then descending lex (z1^2, z1 z2, z2^2).
/// Basis element k is monomial k / N in coordinate k % N. Vectors and matrices
/// are expressed in the orthonormal basis e_alpha = z^alpha / ||z^alpha||, so
/// adjoints are transposes.
class FockTruncation {
 public:
  FockTruncation(std::uint32_t m, std::uint32_t n, std::size_t N, std::size_t size_cap = kDefaultSizeCap);

  std::uint32_t active_vars() const noexcept { return m_; }
  std::uint32_t cutoff() const noexcept { return n_; }
  std::size_t multiplicity() const noexcept { return N_; }
  std::size_t num_monomials() const noexcept { return degree_.size(); }
  std::size_t size() const noexcept { return degree_.size() * N_; }

  /// Exponent of monomial k (not basis element).
  std::span<const std::uint16_t> exponents(std::size_t k) const {
    return {exps_.data() + k * m_, m_};
  }
  ExponentVector exponent_vector(std::size_t k) const;
  int degree(std::size_t k) const { return degree_[k]; }
  /// Monomials of degree t occupy [degree_begin(t), degree_begin(t+1)).
  std::size_t degree_begin(std::uint32_t t) const { return degree_start_[t]; }

  /// Monomial index, or kNoIndex when e is outside the truncation.
  std::size_t find(const ExponentVector& e) const;
  std::size_t find(std::span<const std::uint16_t> dense) const;
  std::size_t basis_index(std::size_t monomial, std::size_t coord) const { return monomial * N_ + coord; }

  /// ||z^alpha||^2 exactly, and its square root in double precision.
  Rational weight(std::size_t k) const;
  double norm(std::size_t k) const { return norm_[k]; }

  /// Monomial index of z_i z^alpha (kNoIndex past the cutoff) and the
  /// orthonormal-coordinate coefficient sqrt((alpha_i + 1)/(|alpha| + 1)).
  /// Variables are 1-based.
  std::size_t shift_target(std::uint32_t i, std::size_t k) const { return shift_target_[(i - 1) * degree_.size() + k]; }
  double shift_coeff(std::uint32_t i, std::size_t k) const { return shift_coeff_[(i - 1) * degree_.size() + k]; }
  /// Monomial index of z^beta / z_i, kNoIndex when beta_i = 0.
  std::size_t shift_source(std::uint32_t i, std::size_t k) const { return shift_source_[(i - 1) * degree_.size() + k]; }

  /// Orthonormal coordinates of a polynomial vector (components beyond the
  /// truncation throw InputError).
  Eigen::VectorXd coordinates(const VectorPolynomial& v) const;
  /// Orthonormal coordinates of z^alpha * v restricted to the truncation; terms
  /// past the cutoff are dropped and reported through the return flag.
  bool coordinates_shifted(const VectorPolynomial& v, std::span<const std::uint16_t> alpha,
                           Eigen::VectorXd& out) const;

  std::string describe() const;

 private:
  std::string key(std::span<const std::uint16_t> dense) const;

  std::uint32_t m_;
  std::uint32_t n_;
  std::size_t N_;
  std::vector<std::uint16_t> exps_;
  std::vector<int> degree_;
  std::vector<std::size_t> degree_start_;
  std::vector<double> norm_;
  std::vector<std::size_t> shift_target_;
  std::vector<double> shift_coeff_;
  std::vector<std::size_t> shift_source_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Dense operator on (part of) a truncation, with the largest degree on which
/// it agrees with the untruncated operator.
struct OperatorMatrix {
  Eigen::MatrixXd matrix;
  int exact_degree = 0;
  bool contaminated = false;
};

/// Multiplication by z_i ⊗ I_N; the top degree is mapped to zero.
OperatorMatrix shift_matrix(const FockTruncation& t, std::uint32_t i);
/// Weighted adjoint of shift_matrix (the transpose in orthonormal coordinates).
OperatorMatrix shift_adjoint_matrix(const FockTruncation& t, std::uint32_t i);
/// Orthogonal projection onto the degree-k part tensored with C^N.
Eigen::MatrixXd degree_projection(const FockTruncation& t, std::uint32_t k);

/// Y = S_i X computed as a gather over rows, without forming S_i.
Eigen::MatrixXd apply_shift(const FockTruncation& t, std::uint32_t i, const Eigen::MatrixXd& X,
                            Exec exec = Exec::Parallel);
/// Y = S_i^T X.
Eigen::MatrixXd apply_shift_adjoint(const FockTruncation& t, std::uint32_t i, const Eigen::MatrixXd& X,
                                    Exec exec = Exec::Parallel);

/// Number of monomials of degree <= n in m variables, C(m + n, n), or
/// kNoIndex if it overflows.
std::size_t count_monomials(std::uint32_t m, std::uint32_t n);

}  // namespace dacurv
