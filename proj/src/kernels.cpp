#include "dacurv/kernels.hpp"

#include <algorithm>
#include <vector>

namespace dacurv {

namespace {

constexpr Eigen::Index kBlock = 32;

// Orthogonalize column v against columns [from, to) of Q twice.
void mgs2(Eigen::Ref<Eigen::VectorXd> v, const Eigen::MatrixXd& Q, Eigen::Index from, Eigen::Index to) {
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index j = from; j < to; ++j) v -= Q.col(j).dot(v) * Q.col(j);
}

}  // namespace

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& A, double drop_tol) {
  const Eigen::Index rows = A.rows();
  Eigen::MatrixXd Q(rows, std::min(rows, A.cols()));
  Eigen::Index rank = 0;
  for (Eigen::Index start = 0; start < A.cols() && rank < rows; start += kBlock) {
    Eigen::Index width = std::min(kBlock, A.cols() - start);
    Eigen::MatrixXd B = A.middleCols(start, width);
    std::vector<double> ref(static_cast<std::size_t>(width));
    for (Eigen::Index j = 0; j < width; ++j) {
      double nrm = B.col(j).norm();
      ref[static_cast<std::size_t>(j)] = nrm;
      if (nrm > 0) B.col(j) /= nrm;
    }
    if (rank > 0) {
      for (int pass = 0; pass < 2; ++pass) {
        auto Qr = Q.leftCols(rank);
        B.noalias() -= Qr * (Qr.transpose() * B);
      }
    }
    const Eigen::Index block_start = rank;
    for (Eigen::Index j = 0; j < width && rank < rows; ++j) {
      if (ref[static_cast<std::size_t>(j)] == 0) continue;
      Eigen::VectorXd v = B.col(j);
      mgs2(v, Q, block_start, rank);
      double nrm = v.norm();
      if (nrm <= drop_tol) continue;
      Q.col(rank++) = v / nrm;
    }
  }
  return Q.leftCols(rank);
}

Eigen::MatrixXd orthonormal_basis_reference(const Eigen::MatrixXd& A, double drop_tol) {
  const Eigen::Index rows = A.rows();
  Eigen::MatrixXd Q(rows, std::min(rows, A.cols()));
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < A.cols() && rank < rows; ++j) {
    double nrm0 = A.col(j).norm();
    if (nrm0 == 0) continue;
    Eigen::VectorXd v = A.col(j) / nrm0;
    mgs2(v, Q, 0, rank);
    double nrm = v.norm();
    if (nrm <= drop_tol) continue;
    Q.col(rank++) = v / nrm;
  }
  return Q.leftCols(rank);
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& Q, Eigen::Index rows) {
  const Eigen::Index r = Q.cols();
  if (r == 0) return Eigen::MatrixXd::Identity(rows, rows);
  if (r >= rows) return Eigen::MatrixXd(rows, 0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
  Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(rows, rows);
  return full.rightCols(rows - r);
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return Eigen::VectorXd();
  return Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues();
}

Eigen::Index rank_above(const Eigen::MatrixXd& A, double threshold) {
  Eigen::VectorXd s = singular_values(A);
  return static_cast<Eigen::Index>((s.array() > threshold).count());
}

}  // namespace dacurv
