#pragma once

#include "rblkit/body.hpp"
#include "rblkit/completion.hpp"
#include "rblkit/measurement.hpp"

#include <Eigen/Dense>

namespace rblkit {

struct MdsCoordinates {
  Eigen::Matrix3Xd s1_star;
  Eigen::Matrix3Xd s2_star;
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();  ///< clamped, descending
};

/// Classical MDS of the stacked EDM. Rows beyond dim are zero; negative leading
/// eigenvalues are clamped to zero. Throws kDegenerateEmbedding when no
/// eigenvalue exceeds 1e-10 of the largest magnitude.
MdsCoordinates classical_mds(const FullEdm& d_hat, int dim = 3);

struct RigidAlignment {
  RotationMatrix r_star;
  Eigen::Vector3d t_star = Eigen::Vector3d::Zero();
  double residual = 0.0;  ///< ||target - (R source + t 1')||_F
};

/// Proper-rotation Procrustes fit of source onto target.
RigidAlignment procrustes_align(const Eigen::Matrix3Xd& source, const Eigen::Matrix3Xd& target);

struct EmbeddingEstimate {
  Eigen::Matrix3Xd s1_star;
  Eigen::Matrix3Xd s2_star;
  Eigen::Matrix3Xd s2_aligned;  ///< r_star * s2_star + t_star 1'
  RotationMatrix r_star;
  Eigen::Vector3d t_star = Eigen::Vector3d::Zero();
  double residual = 0.0;
  bool mirrored = false;  ///< the MDS frame was reflected before alignment
};

/// Aligns the MDS frame onto C1. MDS only fixes the embedding up to a
/// reflection, so both handednesses are fitted and the smaller residual kept.
EmbeddingEstimate align_target(const MdsCoordinates& mds, const Conformation& c1);

/// [C1 | S2_aligned].
SensorMatrix build_stacked_estimate(const Conformation& c1, const Eigen::Matrix3Xd& s2_aligned);

struct EmbeddingOptions {
  NystromMode nystrom = NystromMode::kSquared;
};

struct TargetEmbedding {
  FullEdm d_hat;  ///< assembled sample EDM
  EmbeddingEstimate estimate;
};

/// Nystrom, EDM assembly, MDS and alignment from body 1's own data. The cross
/// block is used as given, so erased entries should be completed beforehand.
TargetEmbedding embed_target(const Conformation& c1, const CrossDistanceMatrix& d12,
                             const EmbeddingOptions& opts = {});

}  // namespace rblkit
