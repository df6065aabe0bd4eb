#pragma once

#include <Eigen/Dense>

namespace dacurv {

/// Orthonormal basis of the column span of A.
///
/// Columns are normalized first, then orthogonalized in blocks with two
/// passes of classical Gram-Schmidt against the accepted basis and modified
/// Gram-Schmidt with reorthogonalization inside the block. A column whose
/// residual norm falls below drop_tol (relative to its original norm, hence
/// relative to the largest retained norm after normalization) is dropped.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& A, double drop_tol = 1e-10);

/// Column-at-a-time modified Gram-Schmidt with reorthogonalization. Slower
/// reference for orthonormal_basis.
Eigen::MatrixXd orthonormal_basis_reference(const Eigen::MatrixXd& A, double drop_tol = 1e-10);

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns Q inside R^rows.
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& Q, Eigen::Index rows);

/// Number of singular values above threshold.
Eigen::Index rank_above(const Eigen::MatrixXd& A, double threshold);
/// Singular values of A, descending.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& A);

}  // namespace dacurv
