#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "dacurv/exec.hpp"
#include "dacurv/fock.hpp"
#include "dacurv/module_spec.hpp"

namespace dacurv {

/// One weighted-degree slice of a truncation. For a graded spec the slice of
/// weight w holds z^alpha ⊗ e_j with |alpha| + shift[j] = w; the submodule
/// and its complement split along slices. An ungraded spec gets a single
/// slice holding the whole truncation.
struct Slice {
  int weight = 0;
  std::vector<std::size_t> basis;  // global basis indices, increasing
  Eigen::MatrixXd sub;             // orthonormal basis of M inside the slice
  Eigen::MatrixXd quo;             // orthonormal basis of the complement
  /// True when every element of M in this weight fits the truncation, so the
  /// slice of M and of its complement are exact.
  bool complete = false;
};

struct SubmoduleOptions {
  double drop_tol = 1e-10;
  bool build_complement = true;
  Exec exec = Exec::Parallel;
};

/// M_n = span{z^alpha g_j : |alpha| + deg g_j <= n} inside a FockTruncation,
/// with an orthonormal basis of M_n and of its orthogonal complement.
class SubmoduleTruncation {
 public:
  SubmoduleTruncation(const ModuleSpec& spec, const FockTruncation& t, SubmoduleOptions opts = {});

  const FockTruncation& truncation() const noexcept { return *t_; }
  const ModuleSpec& spec() const noexcept { return spec_; }
  const std::optional<Grading>& grading() const noexcept { return grading_; }
  bool graded() const noexcept { return grading_.has_value(); }
  const std::vector<Slice>& slices() const noexcept { return slices_; }

  std::size_t slice_of(std::size_t global) const { return slice_of_[global]; }
  std::size_t local_index(std::size_t global) const { return local_of_[global]; }
  /// Slice with the given weight, or nullptr.
  const Slice* slice_with_weight(int w) const;

  std::size_t dim() const;
  std::size_t dim_quotient() const;

  /// Largest standard degree k such that z^alpha ⊗ e_j with |alpha| <= k lies
  /// in complete slices for every j; -1 when no degree is exact (ungraded).
  int exact_degree() const;

  /// Dense global matrices; only for truncations of modest size.
  Eigen::MatrixXd sub_basis() const;
  Eigen::MatrixXd quotient_basis() const;
  Eigen::MatrixXd projection() const;
  Eigen::MatrixXd quotient_projection() const;

 private:
  void build_slice(Slice& s, const std::vector<VectorPolynomial>& gens, const SubmoduleOptions& opts) const;

  ModuleSpec spec_;
  const FockTruncation* t_;
  std::optional<Grading> grading_;
  std::vector<Slice> slices_;
  std::vector<std::size_t> slice_of_;
  std::vector<std::size_t> local_of_;
};

/// Operator on the truncated quotient, block diagonal along slices. Block b
/// acts on span(slices()[b].quo).
struct QuotientOperator {
  std::vector<Eigen::MatrixXd> blocks;
  /// Some nonzero block lies in an incomplete slice.
  bool contaminated = false;

  double trace() const;
  /// Sum of eigenvalue counts above rel_tol times the largest eigenvalue over all blocks.
  std::size_t rank(double rel_tol) const;
  QuotientOperator& operator+=(const QuotientOperator& o);
};

/// Compressions T_i = P_perp S_i restricted to the quotient, slice to slice.
class CompressedShifts {
 public:
  CompressedShifts(const SubmoduleTruncation& sub, std::uint32_t m_vars, Exec exec = Exec::Parallel);

  std::uint32_t m_vars() const noexcept { return m_; }
  /// T_i from block b into its successor block (b + 1 when graded, b itself otherwise).
  const Eigen::MatrixXd& block(std::uint32_t i, std::size_t b) const { return T_[i - 1][b]; }

  /// phi(X) = sum_i T_i X T_i^T.
  QuotientOperator phi(const QuotientOperator& X, Exec exec = Exec::Parallel) const;
  QuotientOperator phi_power(const QuotientOperator& X, int k, Exec exec = Exec::Parallel) const;

 private:
  const SubmoduleTruncation* sub_;
  std::uint32_t m_;
  std::vector<std::vector<Eigen::MatrixXd>> T_;
};

/// P_perp (E_0 ⊗ I) P_perp on the quotient.
QuotientOperator quotient_defect_squared(const SubmoduleTruncation& sub);

/// The quotient projections P_perp e_{alpha,j} for alpha in z_1..z_m with
/// |alpha| <= n, gathered per slice as rows of the complement basis.
/// Numerical rank of their span, threshold sigma > tol * (largest sigma).
std::size_t enumerated_quotient_dim(const SubmoduleTruncation& sub, std::uint32_t m_vars, int n, double tol);

}  // namespace dacurv
