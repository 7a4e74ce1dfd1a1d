#include "rblkit/body.hpp"

#include "rblkit/error.hpp"

#include <cmath>
#include <numbers>

namespace rblkit {

namespace {

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

EulerAngles EulerAngles::from_degrees(double alpha_deg, double beta_deg, double gamma_deg) {
  return {alpha_deg * kDeg, beta_deg * kDeg, gamma_deg * kDeg};
}

EulerAngles EulerAngles::normalized() const {
  return {wrap_angle(alpha), wrap_angle(beta), wrap_angle(gamma)};
}

RotationMatrix::RotationMatrix(const Eigen::Matrix3d& q, double tol) : q_(q) {
  require(q.allFinite(), "rotation matrix has non-finite entries");
  const double ortho = (q.transpose() * q - Eigen::Matrix3d::Identity()).norm();
  if (ortho > tol || std::abs(q.determinant() - 1.0) > tol) {
    fail(ErrorCode::kInvalidArgument, "matrix is not a proper rotation");
  }
}

Conformation::Conformation(Eigen::Matrix3Xd c) : c_(std::move(c)) {
  require(c_.cols() >= 4, "conformation needs at least 4 landmarks");
  require(c_.allFinite(), "conformation has non-finite entries");
  for (Eigen::Index i = 0; i < c_.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < c_.cols(); ++j) {
      require(c_.col(i) != c_.col(j), "conformation has duplicate landmarks");
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(centered(c_));
  const auto sv = svd.singularValues();
  if (!(sv(2) > 1e-10 * sv(0))) {
    fail(ErrorCode::kDegenerateConfiguration, "conformation is planar or collinear");
  }
}

RotationMatrix rotation_from_euler(const EulerAngles& angles) {
  require(std::isfinite(angles.alpha) && std::isfinite(angles.beta) && std::isfinite(angles.gamma),
          "euler angles must be finite");
  const Eigen::Matrix3d q = (Eigen::AngleAxisd(angles.gamma, Eigen::Vector3d::UnitZ()) *
                             Eigen::AngleAxisd(angles.beta, Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(angles.alpha, Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  return RotationMatrix(q);
}

EulerAngles euler_from_rotation(const RotationMatrix& rot) {
  const Eigen::Matrix3d& q = rot.matrix();
  if (std::abs(q(2, 0)) >= 1.0 - 1e-9) {
    fail(ErrorCode::kDegenerateConfiguration, "gimbal lock: pitch is +-90 degrees");
  }
  EulerAngles e;
  e.beta = -std::asin(q(2, 0));
  e.alpha = std::atan2(q(2, 1), q(2, 2));
  e.gamma = std::atan2(q(1, 0), q(0, 0));
  return e.normalized();
}

SensorMatrix apply_pose(const Conformation& c, const Pose& pose) {
  SensorMatrix s = pose.rotation.matrix() * c.points();
  s.colwise() += pose.translation;
  return s;
}

SensorMatrix stack_scenario(const Conformation& c1, const Conformation& c2, const Pose& pose2) {
  SensorMatrix s(3, c1.size() + c2.size());
  s << c1.points(), apply_pose(c2, pose2);
  return s;
}

Eigen::MatrixXd schonberg_dcm(std::size_t n) {
  require(n > 0, "schonberg_dcm needs n >= 1");
  const auto k = static_cast<Eigen::Index>(n);
  return Eigen::MatrixXd::Identity(k, k) -
         Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(n));
}

Eigen::Vector3d geometric_center(const Eigen::Matrix3Xd& s) {
  require(s.cols() > 0, "geometric_center of an empty matrix");
  return s.rowwise().mean();
}

Conformation recenter(const Conformation& c) { return Conformation(centered(c.points())); }

Eigen::Matrix3Xd centered(const Eigen::Matrix3Xd& s) {
  Eigen::Matrix3Xd out = s;
  if (s.cols() > 0) out.colwise() -= s.rowwise().mean();
  return out;
}

Eigen::MatrixXd double_center(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  if (x.size() == 0) return out;
  const Eigen::VectorXd row_mean = x.rowwise().mean();
  const Eigen::RowVectorXd col_mean = x.colwise().mean();
  const double grand = x.mean();
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean;
  out.array() += grand;
  return out;
}

}  // namespace rblkit
