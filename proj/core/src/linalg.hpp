#pragma once

#include <Eigen/Dense>

namespace rblkit::detail {

/// Moore-Penrose inverse, dropping singular values below rel_tol * max.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rel_tol = 1e-10) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return Eigen::MatrixXd::Zero(a.cols(), a.rows());
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// U V' from the SVD of m with the last column of U flipped when needed, so
/// the result is the closest proper rotation to m.
inline Eigen::Matrix3d proper_polar(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

}  // namespace rblkit::detail
