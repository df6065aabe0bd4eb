#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dacurv/module_spec.hpp"
#include "dacurv/poly_matrix.hpp"

namespace dacurv {

using Rng = std::mt19937_64;
using Point = std::vector<std::complex<double>>;

/// Uniform point of the polydisc with coordinate radius 0.5/sqrt(num_vars), which
/// lies well inside the unit ball.
Point random_ball_point(Rng& rng, std::uint32_t num_vars);
/// Random real rational point with denominators at most 10^6 and the same
/// coordinate bound.
std::vector<Rational> random_rational_point(Rng& rng, std::uint32_t num_vars);

/// Row i is p_i(lambda) for the nonzero generators p_i.
Eigen::MatrixXcd localize(const ModuleSpec& spec, const Point& lambda);

/// Singular values above tol * sigma_max.
int numerical_rank(const Eigen::MatrixXcd& A, double tol);

/// Rank over Q of an exactly evaluated matrix, with the pivot rows and
/// columns of a nonsingular maximal minor.
struct ExactRank {
  int rank = 0;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};
ExactRank exact_rank(const std::vector<Rational>& entries, std::size_t rows, std::size_t cols);

struct GenericRankOptions {
  int trials = 16;
  double tol = 1e-8;
  bool exact_confirm = false;
  int max_trials = 64;
};

struct GenericRankResult {
  int rank = 0;
  /// Fraction of sampled points attaining rank.
  double attainment = 0;
  int trials_used = 0;
  bool confident = false;
  /// Set when exact confirmation succeeded: a minor of size rank with a
  /// nonzero symbolic determinant.
  bool exact_confirmed = false;
  std::vector<std::size_t> minor_rows;
  std::vector<std::size_t> minor_cols;
  Polynomial minor_determinant;
  std::vector<int> sampled_ranks;
};

/// Rank of m over the fraction field of C[z_1..z_num_vars].
GenericRankResult generic_rank(const PolyMatrix& m, std::uint32_t num_vars, Rng& rng,
                               const GenericRankOptions& opts = {});

/// Exact lower bound: largest rank over Q at a few random rational points,
/// with its pivot minor. Fails (rank -1) only for an empty matrix.
GenericRankResult exact_generic_rank(const PolyMatrix& m, std::uint32_t num_vars, Rng& rng, int points = 3);

/// sup over the ball of dim E_lambda M, estimated by sampling.
GenericRankResult fiber_dimension(const ModuleSpec& spec, Rng& rng, const GenericRankOptions& opts = {});

/// A subset S' of {0..N-1} of size N - fd whose complement carries
/// generic rank fd; the complement is the lexicographically smallest such.
struct IndependentSubset {
  std::vector<std::size_t> subset;
  std::vector<std::size_t> complement;
  int fd = 0;
};
IndependentSubset independent_subset(const ModuleSpec& spec, Rng& rng, const GenericRankOptions& opts = {});

/// An element of M supported on a coordinate subset W, written as an explicit
/// polynomial combination of generators.
struct DependenceCertificate {
  bool available = false;
  std::string reason;
  std::vector<std::size_t> subset;  // W, 0-based, increasing
  /// (index into spec.generators, coefficient)
  std::vector<std::pair<std::size_t, Polynomial>> combination;
  VectorPolynomial witness;
  /// 2 when the cofactors r_{i1} are all nonzero, 1 when some r_{i1} vanishes.
  int construction_case = 0;
  bool support_check = false;
  bool combination_check = false;
  bool nonzero_check = false;
};

/// Builds the certificate for W (|W| = N - fd + 1) from cofactors of the
/// matrices [p_{., k} | p_{., v}], v the complement of W.
DependenceCertificate dependence_certificate(const ModuleSpec& spec, const std::vector<std::size_t>& W,
                                             Rng& rng, const GenericRankOptions& opts = {});

/// Re-verifies a certificate by exact arithmetic.
bool verify_certificate_exact(const ModuleSpec& spec, const DependenceCertificate& cert);

/// Norm of P_perp(witness) on a truncation with cutoff >= deg(witness) + 1,
/// i.e. of sum_j witness_j * P_perp(1 ⊗ e_j).
double certificate_quotient_residual(const ModuleSpec& spec, const DependenceCertificate& cert);

/// Polynomial vectors spanning the right kernel of m over the fraction field,
/// from maximal-minor cofactors. Needs an exactly confirmed rank.
std::vector<VectorPolynomial> kernel_basis(const PolyMatrix& m, const GenericRankResult& rank);

}  // namespace dacurv
