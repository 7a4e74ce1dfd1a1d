#pragma once

#include "rblkit/body.hpp"
#include "rblkit/embedding.hpp"
#include "rblkit/measurement.hpp"

#include <Eigen/Dense>

#include <string_view>

namespace rblkit {

enum class TranslationMethod { kMds, kRobust, kGenieMds, kGenieRobust };

std::string_view to_string(TranslationMethod m);

struct TranslationEstimate {
  Eigen::Vector3d t_hat = Eigen::Vector3d::Zero();
  TranslationMethod method = TranslationMethod::kMds;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
};

struct RobustCoefficients {
  Eigen::RowVector3d a = Eigen::RowVector3d::Zero();
  double b = 0.0;
};

struct TranslationOptions {
  double tol = 1e-8;  ///< gradient-norm tolerance
  int max_iters = 500;
  EmbeddingOptions embedding;
  DiagonalBlocks erasure_blocks = DiagonalBlocks::kOnes;
  double penalty_initial = 1.0;
  double penalty_growth = 10.0;
  int penalty_escalations = 5;
};

/// What only a genie knows about the target: its conformation and a rotation
/// estimate (normally from estimate_rotation_opp).
struct GenieKnowledge {
  Conformation c2;
  RotationMatrix q_hat;
};

struct ObjectiveValue {
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
};

/// ||J (S'S + half_sq) J||_F^2 with S = [c1 | shape + t 1'] and its gradient in t.
/// half_sq is 0.5 * (D_hat .^ 2) .* W_hat.
ObjectiveValue mds_objective(const Eigen::Matrix3Xd& c1, const Eigen::Matrix3Xd& shape,
                             const Eigen::MatrixXd& half_sq, const Eigen::Vector3d& t);

/// Egoistic MDS translation estimate from body 1's conformation and the
/// measured cross ranges (entries outside w are ignored).
TranslationEstimate estimate_translation_mds(const Conformation& c1,
                                             const CrossDistanceMatrix& d12_measured,
                                             const ConnectivityMask& w,
                                             const TranslationOptions& opts = {});

/// Same objective with the target conformation and intra-distances known.
TranslationEstimate estimate_translation_mds_genie(const Conformation& c1,
                                                   const CrossDistanceMatrix& d12_measured,
                                                   const ConnectivityMask& w,
                                                   const GenieKnowledge& genie,
                                                   const TranslationOptions& opts = {});

/// a = (2/N1) (C1 1)', b from the mean squared range and the sensor norms.
RobustCoefficients robust_coefficients(const Conformation& c1, const Eigen::Matrix3Xd& s2_aligned,
                                       const CrossDistanceMatrix& d12_measured);

/// ||(psi1 1' + 1 psi2(t)' - 2 C1'(shape + t 1') - Y) .* W||_F^2 and its gradient,
/// where Y holds the squared measured ranges.
ObjectiveValue robust_constraint(const Eigen::Matrix3Xd& c1, const Eigen::Matrix3Xd& shape,
                                 const Eigen::MatrixXd& y, const Eigen::MatrixXd& w,
                                 const Eigen::Vector3d& t);

/// nnz(W) * (4 dbar^2 sigma^2 + 2 sigma^4), dbar the mean observed range.
double noise_epsilon(const CrossDistanceMatrix& d12_measured, const ConnectivityMask& w,
                     double sigma);

/// Minimises |a t + b| subject to the range-consistency constraint <= epsilon
/// with an exact penalty. converged reports whether the result is feasible.
TranslationEstimate estimate_translation_robust(const Conformation& c1,
                                                const CrossDistanceMatrix& d12_measured,
                                                const ConnectivityMask& w, double epsilon,
                                                const TranslationOptions& opts = {});

TranslationEstimate estimate_translation_robust_genie(const Conformation& c1,
                                                      const CrossDistanceMatrix& d12_measured,
                                                      const ConnectivityMask& w, double epsilon,
                                                      const GenieKnowledge& genie,
                                                      const TranslationOptions& opts = {});

/// Squared relative translation ||t1 - t2||^2 of two equally sized bodies from
/// noiseless cross ranges and full pose knowledge. With include_correction off
/// the pose-dependent cross terms are dropped.
double corrected_distance_estimator(const Conformation& c1, const Conformation& c2,
                                    const Pose& pose1, const Pose& pose2,
                                    const CrossDistanceMatrix& d12,
                                    bool include_correction = true);

}  // namespace rblkit
