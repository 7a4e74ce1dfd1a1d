#pragma once

#include "rblkit/body.hpp"
#include "rblkit/measurement.hpp"

#include <Eigen/Dense>

namespace rblkit {

/// Zeroes the diagonal.
Eigen::MatrixXd hollow(const Eigen::MatrixXd& x);

enum class NystromMode {
  kSquared,  ///< H[D12^2' pinv(D1^2) D12^2], then entrywise sqrt
  kPlain,    ///< H[D12' inv(D1) D12] on plain distances
};

/// Estimates the unobserved intra-distance block of body 2 (plain distances).
/// d1 is the plain intra-distance matrix of body 1. Squared mode throws
/// kRankDeficiency when d1 squared has rank below 5.
Eigen::MatrixXd nystrom_d2(const Eigen::MatrixXd& d1, const CrossDistanceMatrix& d12,
                           NystromMode mode = NystromMode::kSquared);

/// [[D1, D12], [D12', D2]] in plain distances.
FullEdm assemble_full_edm(const Eigen::MatrixXd& d1, const CrossDistanceMatrix& d12_measured,
                          const Eigen::MatrixXd& d2_hat);

struct RankCompletionOptions {
  int max_iters = 500;
  double tol = 1e-8;    ///< relative residual on observed entries
  double ridge = 0.0;   ///< Tikhonov weight in the factor updates
};

struct RankCompletionResult {
  Eigen::MatrixXd matrix;  ///< rank <= r reconstruction
  int iterations = 0;
  double residual = 0.0;   ///< relative observed-entry residual
  bool converged = false;
};

/// Low-rank completion: spectral start from the rescaled zero-filled matrix,
/// then alternating least squares on the two factors.
/// Throws kUnderdetermined with fewer than r * (rows + cols - r) observations.
RankCompletionResult rank_r_complete(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& mask,
                                     int r, const RankCompletionOptions& opts = {});

enum class CompletionMethod {
  kAnchored,  ///< per-column fit against the known primary conformation
  kLowRank,   ///< rank_r_complete without side information
};

struct CompletionOptions {
  CompletionMethod method = CompletionMethod::kAnchored;
  int rank = 5;
  RankCompletionOptions solver;
};

/// Generic path: rank-r completion of the squared block, then sqrt. Observed
/// entries are returned unchanged.
CrossDistanceMatrix complete_cross_block(const CrossDistanceMatrix& d12_observed,
                                         const ConnectivityMask& w,
                                         const CompletionOptions& opts = {});

/// Uses the known left factor [C1', psi1, 1] of the squared block: each column
/// is fitted on its observed rows and only the erased rows are filled.
/// Throws kUnderdetermined when a column has fewer than 4 affinely independent rows.
CrossDistanceMatrix complete_cross_block_anchored(const Conformation& c1,
                                                  const CrossDistanceMatrix& d12_observed,
                                                  const ConnectivityMask& w);

}  // namespace rblkit
