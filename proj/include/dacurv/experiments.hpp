#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "dacurv/exec.hpp"
#include "dacurv/module_spec.hpp"
#include "dacurv/polynomial.hpp"

namespace dacurv {

/// The homogeneous submodule generated by f = sum_i z_i / (i+1)!, and the
/// distance from a homogeneous polynomial q of degree n to {p f : p in H_{n-1}}.
struct Section5Config {
  int n = 1;
  /// Defaults to z1^n when empty.
  Polynomial q;
  int d0 = 2;
  /// Number of variables kept in f (and in p); each must be >= d0 + 2.
  std::vector<int> m_values;
  /// Above this many unknowns the normal equations are solved in double precision.
  std::size_t exact_limit = 2000;
};

struct Section5Row {
  int m = 0;
  std::size_t unknowns = 0;
  bool exact = true;
  Rational distance2;  // exact when `exact`
  double distance2_value = 0;
  bool pass = false;
};

struct Section5Result {
  Polynomial q;
  Rational q_norm2;
  /// ||q||^2 / (4 d0^3 (d0+1)! (d0+4)!^2)
  Rational bound;
  std::vector<Section5Row> rows;
  bool pass = false;
  /// Truncated distances grow with m.
  bool nondecreasing = true;
};

/// lambda_i = 1/(i+1)!.
Rational section5_lambda(int i);
/// f truncated to its first m terms.
Polynomial section5_generator(int m);
/// <a, b> in the symmetric Fock norm, ||z^alpha||^2 = alpha!/|alpha|!.
Rational fock_inner(const Polynomial& a, const Polynomial& b);

Section5Result section5_bound_check(const Section5Config& cfg);

/// N(f): the smallest degree with a nonzero homogeneous part of f.
int order_of_vanishing(const Polynomial& f);

/// The defect Delta_M^2 of the submodule itself, assembled twice:
///   (a) P_M - sum_i P_M S_i P_M S_i^* P_M
///   (b) P_M E_0 P_M + sum_i P_M [S_i, P_perp][P_perp, S_i^*] P_M
/// and compared on basis elements of degree <= exact_degree - 1.
struct DefectAssembly {
  std::vector<std::size_t> zone;  // global basis indices
  Eigen::MatrixXd a;              // zone block of (a)
  Eigen::MatrixXd b;              // zone block of (b)
  double max_difference = 0;
  double min_eigenvalue = 0;
  std::size_t rank = 0;
  int cutoff = 0;
  int exact_degree = 0;
  bool contaminated = false;
  /// max_k of the largest entry of E_k P_M - P_M E_k on the zone, where E_k
  /// projects onto weighted degree k (standard degree for N = 1).
  double grading_error = 0;
};
inline constexpr double kDefectRankTol = 1e-9;
/// The assemblies hold several dense size x size matrices.
inline constexpr std::size_t kDefectMaxBasis = 3000;

DefectAssembly defect_squared_submodule(const ModuleSpec& spec, std::uint32_t m_vars, int cutoff,
                                        Exec exec = Exec::Parallel);

struct DefectGrowthRow {
  int cutoff = 0;
  std::size_t rank = 0;
  std::size_t zone_dim = 0;
  double max_difference = 0;
};

struct DefectGrowth {
  Polynomial f;
  std::uint32_t m_vars = 0;
  std::vector<DefectGrowthRow> rows;
  bool nondecreasing = true;
  /// Strict increase inside every window of three consecutive cutoffs.
  bool grows_in_every_window = true;
  bool constant = true;
};

/// Rank of Delta_M^2 for M = [f] in H^2 truncated to m_vars variables, per
/// cutoff. m_vars = 0 means (largest variable of f) + 2.
DefectGrowth defect_rank_growth(const Polynomial& f, const std::vector<int>& cutoffs, std::uint32_t m_vars = 0,
                                Exec exec = Exec::Parallel);

}  // namespace dacurv
