#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dacurv/exec.hpp"
#include "dacurv/modanalysis.hpp"
#include "dacurv/module_spec.hpp"

namespace dacurv {

/// q_m(x) = (x+1)(x+2)...(x+m)/m! = C(x+m, m); q_0 = 1.
Rational q_poly(int m, long x);

struct ClosedFormCurvature {
  int K = 0;
  GenericRankResult fd;
};
/// K = N - fd(M).
ClosedFormCurvature curvature_closed_form(const ModuleSpec& spec, Rng& rng, const GenericRankOptions& opts = {});

struct IntegralOptions {
  int sphere_samples = 512;
  /// Radii for the extrapolation r -> 1.
  std::vector<double> r_grid = {0.70, 0.75, 0.80, 0.85, 0.88, 0.90, 0.92, 0.93, 0.94, 0.95, 0.96, 0.97, 0.98};
  /// Radial series depth; 0 picks it from the largest radius.
  int depth = 0;
  /// Upper bound on truncation size (basis elements) used to cap the depth.
  std::size_t max_basis = 60000;
  /// Rough flop budget for the slice factorizations and sample products.
  double max_work = 1e10;
  /// Truncation cutoff for specs without a grading.
  int ungraded_cutoff = 12;
  /// Variables of the sphere; 0 means all variables of the spec.
  std::uint32_t m_vars = 0;
  Exec exec = Exec::Parallel;
};

struct CurvatureEstimate {
  double estimate = 0;
  double std_error = 0;
  /// Change of the extrapolated value when the s^2 log s term is dropped from the fit.
  double systematic = 0;
  /// sqrt(std_error^2 + systematic^2).
  double uncertainty = 0;
  /// RMS residual of the fit to the sample-mean profile.
  double extrapolation_residual = 0;
  int depth = 0;
  int samples = 0;
  std::vector<double> r_used;
  std::vector<double> r_dropped;
  /// Sample mean of (1 - r^2) trace F(r xi) for each radius in r_used.
  std::vector<double> mean_profile;
  /// Mean of h_k(xi) = sum_i ||P_perp(<., xi>^k ⊗ e_i)||^2 per degree k (graded only).
  std::vector<double> mean_h;
  /// The quotient was not graded, so the truncated projection is approximate.
  bool approximate = false;
};

/// Monte Carlo average over the sphere of the radial extrapolation of
/// (1 - r^2) trace F(r xi), computed on the truncated quotient.
CurvatureEstimate curvature_by_integral(const ModuleSpec& spec, Rng& rng, const IntegralOptions& opts = {});

struct ModuleRankEuler {
  int chi = 0;
  IndependentSubset subset;
  std::optional<DependenceCertificate> certificate;
  double certificate_residual = 0;
};
/// chi = N - fd from a maximal independent coordinate subset, with a
/// dependence certificate for that subset plus one more coordinate.
ModuleRankEuler euler_char_module_rank(const ModuleSpec& spec, Rng& rng, const GenericRankOptions& opts = {});

struct HilbertEuler {
  int chi = 0;
  bool stabilized = false;
  /// Degree k from which the d-th difference stayed constant.
  int stabilization_degree = -1;
  int cutoff = 0;
  std::vector<long> dims;         // dim M_k for k = 0..
  std::vector<long> differences;  // d-th differences, starting at k = d
  bool approximate = false;
};

/// dim M_k = dim span{f P_perp(1 ⊗ e_j) : deg f <= k} from direct enumeration,
/// and its d-th finite difference.
HilbertEuler euler_char_hilbert_growth(const ModuleSpec& spec, int max_degree, Exec exec = Exec::Parallel);
/// Same growth sequence, with dim M_k taken as the rank of
/// sum_{j<=k} phi^j(Delta^2).
HilbertEuler euler_char_oprank(const ModuleSpec& spec, int max_degree, Exec exec = Exec::Parallel);

struct OpRankResult {
  int oprank = 0;
  int enumerated = 0;
  int cutoff = 0;
  bool approximate = false;
};
inline constexpr double kOpRankTol = 1e-9;

/// rank of sum_{k<=n} phi_m^k(Delta^2) next to the enumerated dimension of
/// span{f P_perp(1 ⊗ e_j) : f in P_m, deg f <= n}.
OpRankResult dim_via_oprank(const ModuleSpec& spec, std::uint32_t m_vars, int n, Exec exec = Exec::Parallel);

struct TraceEstimate {
  std::vector<int> n_grid;
  /// trace(sum_{k<=n} phi_m^k(Delta^2)) / q_m(n)
  std::vector<double> cumulative_ratio;
  /// trace(phi_m^n(Delta^2)) / q_{m-1}(n)
  std::vector<double> last_ratio;
  /// Fit a + b/n (+ c/n^2 on grids of four or more degrees) of cumulative_ratio.
  double estimate = 0;
  double slope = 0;
  double fit_residual = 0;
  /// Fit residual combined with the change between the two fit orders.
  double uncertainty = 0;
  int cutoff = 0;
  bool approximate = false;
};
TraceEstimate K_trace_estimate(const ModuleSpec& spec, std::uint32_t m_vars, const std::vector<int>& n_grid,
                               Exec exec = Exec::Parallel);

struct AsymptoticReport {
  std::vector<int> m_values;
  std::vector<int> K_m;
  std::vector<int> chi_m;
  bool K_monotone = true;
  bool chi_monotone = true;
  bool K_le_chi = true;
  std::optional<int> K_limit;
  std::optional<int> chi_limit;
};

/// K_m = N - generic rank of the generators with z_{m+1}, ... set to zero;
/// chi_m = N - rank over P_m of the vectors of M with entries in P_m, i.e.
/// of the module generated by the generators intersected with P_m^N.
/// Throws InconsistencyError when a sequence increases.
AsymptoticReport asymptotic_sequences(const ModuleSpec& spec, const std::vector<int>& m_values, Rng& rng,
                                      const GenericRankOptions& opts = {});
/// Monotonicity and limit bookkeeping on given sequences; throws on increase.
void finalize_asymptotic(AsymptoticReport& r);

struct GbcOptions {
  GenericRankOptions rank;
  IntegralOptions integral;
  int hilbert_degree = 0;  // 0 picks a default from d and the generator degrees
  std::vector<int> trace_grid;  // empty picks a default
  bool run_integral = true;
};

struct GbcReport {
  int N = 0;
  int fd = 0;
  int K_closed = 0;
  int chi_rank = 0;
  ModuleRankEuler module_rank;
  HilbertEuler hilbert;
  HilbertEuler oprank;
  std::optional<CurvatureEstimate> integral;
  TraceEstimate trace;
  AsymptoticReport stages;
  bool gbc_equal = false;
  bool consistent = true;
  std::vector<std::string> failures;
};

GbcReport gbc_check(const ModuleSpec& spec, Rng& rng, const GbcOptions& opts = {});

}  // namespace dacurv
