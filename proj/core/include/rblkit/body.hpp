#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace rblkit {

/// Landmark positions in the common frame, one column per sensor.
using SensorMatrix = Eigen::Matrix3Xd;

/// Roll (x), pitch (y) and yaw (z) in radians.
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  static EulerAngles from_degrees(double alpha_deg, double beta_deg, double gamma_deg);

  /// Wraps each angle into (-pi, pi].
  EulerAngles normalized() const;
};

/// Proper rotation. Construction validates orthonormality and det = +1.
class RotationMatrix {
 public:
  RotationMatrix() : q_(Eigen::Matrix3d::Identity()) {}

  /// Throws kInvalidArgument when q is not a proper rotation within tol.
  explicit RotationMatrix(const Eigen::Matrix3d& q, double tol = 1e-9);

  static RotationMatrix identity() { return RotationMatrix(); }

  const Eigen::Matrix3d& matrix() const { return q_; }
  double operator()(int i, int j) const { return q_(i, j); }

 private:
  Eigen::Matrix3d q_;
};

/// Body shape: 3 x N landmark coordinates in the body frame.
class Conformation {
 public:
  /// Requires N >= 4, finite entries, distinct columns and a centred rank of 3.
  explicit Conformation(Eigen::Matrix3Xd c);

  const Eigen::Matrix3Xd& points() const { return c_; }
  std::size_t size() const { return static_cast<std::size_t>(c_.cols()); }

 private:
  Eigen::Matrix3Xd c_;
};

struct Pose {
  RotationMatrix rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

RotationMatrix rotation_from_euler(const EulerAngles& angles);

/// Inverse of rotation_from_euler. Throws kDegenerateConfiguration at gimbal lock,
/// i.e. |q31| >= 1 - 1e-9.
EulerAngles euler_from_rotation(const RotationMatrix& q);

SensorMatrix apply_pose(const Conformation& c, const Pose& pose);

/// [C1 | Q2 C2 + t2 1^T]: body 1 sits at the origin of the common frame.
SensorMatrix stack_scenario(const Conformation& c1, const Conformation& c2, const Pose& pose2);

/// J_n = I - (1/n) 1 1^T.
Eigen::MatrixXd schonberg_dcm(std::size_t n);

Eigen::Vector3d geometric_center(const Eigen::Matrix3Xd& s);

Conformation recenter(const Conformation& c);

/// Column-centred copy, same as s * J without forming J.
Eigen::Matrix3Xd centered(const Eigen::Matrix3Xd& s);

/// J_r * x * J_c computed by mean subtraction.
Eigen::MatrixXd double_center(const Eigen::MatrixXd& x);

}  // namespace rblkit
