#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dacurv/poly_matrix.hpp"
#include "dacurv/polynomial.hpp"

namespace dacurv {

enum class AmbientKind { Finite, Omega };

/// A submodule of H^2 ⊗ C^N given by finitely many polynomial generators.
struct ModuleSpec {
  AmbientKind kind = AmbientKind::Finite;
  /// Number of variables in Finite mode; ignored for Omega.
  std::uint32_t d = 0;
  std::size_t N = 1;
  std::vector<VectorPolynomial> generators;

  /// Throws InputError when the spec is unusable.
  void validate() const;

  /// Largest variable index occurring in a generator (0 if all are constant).
  std::uint32_t max_active_variable() const;
  /// Variables in play: d for Finite, max(1, max_active_variable) for Omega.
  std::uint32_t num_vars() const;
  int max_degree() const;
  /// Generators that are not identically zero.
  std::vector<VectorPolynomial> nonzero_generators() const;
  /// Rows are the nonzero generators.
  PolyMatrix generator_matrix() const;
};

/// Coordinate shifts making every generator homogeneous for the weight
/// |alpha| + shift[j] on z^alpha ⊗ e_j.
struct Grading {
  std::vector<int> shifts;             // one per coordinate, min over each linked group is 0
  std::vector<int> generator_weights;  // weighted degree of each nonzero generator
  int max_shift() const;
};

/// The grading, if one exists. Every component must be homogeneous and the
/// resulting difference constraints between coordinate shifts consistent.
std::optional<Grading> detect_grading(const ModuleSpec& spec);

}  // namespace dacurv
