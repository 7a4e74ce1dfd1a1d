#pragma once

#include "rblkit/body.hpp"
#include "rblkit/measurement.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace rblkit {

enum class RotationMethod { kEgo, kOppGenie, kNaiveEig };

std::string_view to_string(RotationMethod m);

struct RotationEstimate {
  RotationMatrix q_hat;
  RotationMethod method = RotationMethod::kEgo;
  int permutation_index = 0;  ///< 0..5, lexicographic order of {0,1,2}
  int sign_index = 0;         ///< 0..3 among the proper sign patterns
  double objective = 0.0;
  bool ambiguous = false;     ///< two eigenvalues coincide; ordering is not identifiable
};

/// -1/2 J D12^2 J for an N1 x N2 squared cross block (erased entries already zero).
Eigen::MatrixXd double_center_cross(const Eigen::MatrixXd& d12_sq_masked);

/// (C1c C1c')^-1 C1c d_bar with C1c the centred conformation. Recovers Q C2c
/// from exact data.
Eigen::Matrix3Xd project_left(const Conformation& c1, const Eigen::MatrixXd& d_bar);

struct RotationCandidate {
  Eigen::Matrix3d q;
  int permutation_index = 0;
  int sign_index = 0;
  double objective = 0.0;  ///< ||m - q diag(lambda_perm) q'||_F^2
};

/// The 24 proper candidates V P S built from the eigenvectors V of m
/// (descending), with lambda (descending) permuted alongside.
std::vector<RotationCandidate> rotation_candidates(const Eigen::Matrix3d& m,
                                                   const Eigen::Vector3d& lambda);

struct RotationOptions {
  /// Candidates whose objectives tie are resolved by proximity to this rotation.
  RotationMatrix reference;
  double tie_tol = 1e-9;  ///< relative objective tolerance for a tie
};

/// Egoistic rotation from body 1's data and the aligned MDS target estimate.
RotationEstimate estimate_rotation_ego(const Conformation& c1,
                                       const CrossDistanceMatrix& d12_measured,
                                       const ConnectivityMask& w,
                                       const Eigen::Matrix3Xd& s2_aligned,
                                       const RotationOptions& opts = {});

/// Diagnostic: eigenvectors of the target scatter in magnitude order, only
/// the signs chosen (closest to the reference).
RotationEstimate estimate_rotation_naive(const Eigen::Matrix3Xd& s2_aligned,
                                         const RotationOptions& opts = {});

/// Orthogonal Procrustes baseline with the target conformation known. Uses the
/// fully visible rows and columns of w; needs at least 4 of each.
RotationEstimate estimate_rotation_opp(const Conformation& c1, const Conformation& c2_genie,
                                       const CrossDistanceMatrix& d12_measured,
                                       const ConnectivityMask& w);

/// Closest proper rotation in Frobenius norm. Throws kDegenerateConfiguration for rank < 2.
RotationMatrix nearest_rotation(const Eigen::Matrix3d& m);

}  // namespace rblkit
