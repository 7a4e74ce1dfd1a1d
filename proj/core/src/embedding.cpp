#include "rblkit/embedding.hpp"

#include "linalg.hpp"
#include "rblkit/error.hpp"

#include <cmath>

namespace rblkit {

MdsCoordinates classical_mds(const FullEdm& d_hat, int dim) {
  require(dim >= 1 && dim <= 3, "MDS dimension must be 1, 2 or 3");
  const Eigen::MatrixXd& d = d_hat.values();
  const Eigen::Index n = d.rows();
  require(n >= 2, "MDS needs at least two points");

  const Eigen::MatrixXd b = -0.5 * double_center(d.array().square().matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  if (eig.info() != Eigen::Success) fail(ErrorCode::kDegenerateEmbedding, "eigensolver failed");
  const Eigen::VectorXd& vals = eig.eigenvalues();  // ascending
  const double top = vals.cwiseAbs().maxCoeff();
  if (!(top > 0.0) || !(vals(n - 1) > 1e-10 * top)) {
    fail(ErrorCode::kDegenerateEmbedding, "EDM has no positive Gram eigenvalue");
  }

  Eigen::Matrix3Xd x = Eigen::Matrix3Xd::Zero(3, n);
  MdsCoordinates out;
  const Eigen::Index k = std::min<Eigen::Index>(dim, n);
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index src = n - 1 - r;
    const double lambda = vals(src) > 1e-10 * top ? vals(src) : 0.0;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    x.row(r) = std::sqrt(lambda) * v.transpose();
    out.eigenvalues(r) = lambda;
  }
  const auto n1 = static_cast<Eigen::Index>(d_hat.n1());
  out.s1_star = x.leftCols(n1);
  out.s2_star = x.rightCols(n - n1);
  return out;
}

RigidAlignment procrustes_align(const Eigen::Matrix3Xd& source, const Eigen::Matrix3Xd& target) {
  require(source.cols() == target.cols(), "procrustes inputs differ in size");
  require(source.cols() >= 3, "procrustes needs at least 3 points");
  require(source.allFinite() && target.allFinite(), "procrustes inputs must be finite");
  const Eigen::Vector3d mu_s = source.rowwise().mean();
  const Eigen::Vector3d mu_t = target.rowwise().mean();
  const Eigen::Matrix3Xd sc = source.colwise() - mu_s;
  const Eigen::Matrix3Xd tc = target.colwise() - mu_t;

  Eigen::JacobiSVD<Eigen::Matrix3Xd> shape(sc);
  const auto sv = shape.singularValues();
  if (!(sv(1) > 1e-10 * sv(0))) {
    fail(ErrorCode::kAmbiguousAlignment, "source points are collinear; rotation is not determined");
  }
  RigidAlignment out;
  out.r_star = RotationMatrix(detail::proper_polar(tc * sc.transpose()));
  out.t_star = mu_t - out.r_star.matrix() * mu_s;
  out.residual =
      ((out.r_star.matrix() * source).colwise() + out.t_star - target).norm();
  return out;
}

EmbeddingEstimate align_target(const MdsCoordinates& mds, const Conformation& c1) {
  require(mds.s1_star.cols() == c1.points().cols(), "MDS split does not match C1");
  const Eigen::Matrix3d flip = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();

  const RigidAlignment direct = procrustes_align(mds.s1_star, c1.points());
  const RigidAlignment mirror = procrustes_align(flip * mds.s1_star, c1.points());
  const bool use_mirror = mirror.residual < direct.residual;
  const RigidAlignment& fit = use_mirror ? mirror : direct;

  EmbeddingEstimate e;
  e.s1_star = use_mirror ? Eigen::Matrix3Xd(flip * mds.s1_star) : mds.s1_star;
  e.s2_star = use_mirror ? Eigen::Matrix3Xd(flip * mds.s2_star) : mds.s2_star;
  e.r_star = fit.r_star;
  e.t_star = fit.t_star;
  e.residual = fit.residual;
  e.mirrored = use_mirror;
  e.s2_aligned = (fit.r_star.matrix() * e.s2_star).colwise() + fit.t_star;
  return e;
}

SensorMatrix build_stacked_estimate(const Conformation& c1, const Eigen::Matrix3Xd& s2_aligned) {
  SensorMatrix s(3, c1.points().cols() + s2_aligned.cols());
  s << c1.points(), s2_aligned;
  return s;
}

TargetEmbedding embed_target(const Conformation& c1, const CrossDistanceMatrix& d12,
                             const EmbeddingOptions& opts) {
  require(d12.n1() == c1.size(), "conformation size does not match d12 rows");
  const Eigen::MatrixXd d1 = full_edm(c1.points(), c1.size()).values();
  const Eigen::MatrixXd d2_hat = nystrom_d2(d1, d12, opts.nystrom);
  FullEdm d_hat = assemble_full_edm(d1, d12, d2_hat);
  EmbeddingEstimate est = align_target(classical_mds(d_hat, 3), c1);
  return {std::move(d_hat), std::move(est)};
}

}  // namespace rblkit
