#pragma once

#include "rblkit/body.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>

namespace rblkit {

enum class Domain { kPlain, kSquared };

/// N1 x N2 inter-body ranges, either plain metres or squared.
class CrossDistanceMatrix {
 public:
  CrossDistanceMatrix(Eigen::MatrixXd d12, Domain domain = Domain::kPlain);

  const Eigen::MatrixXd& values() const { return d_; }
  Domain domain() const { return domain_; }
  bool squared() const { return domain_ == Domain::kSquared; }
  std::size_t n1() const { return static_cast<std::size_t>(d_.rows()); }
  std::size_t n2() const { return static_cast<std::size_t>(d_.cols()); }

  /// Squared values whatever the stored domain.
  Eigen::MatrixXd squared_values() const;

 private:
  Eigen::MatrixXd d_;
  Domain domain_;
};

/// Plain-distance EDM of the stacked bodies; rows [0, n1) belong to body 1.
class FullEdm {
 public:
  FullEdm(Eigen::MatrixXd d, std::size_t n1);

  const Eigen::MatrixXd& values() const { return d_; }
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return static_cast<std::size_t>(d_.rows()) - n1_; }

 private:
  Eigen::MatrixXd d_;
  std::size_t n1_;
};

enum class MaskPattern { kBlock, kArbitrary };

/// Binary N1 x N2 link mask. Block masks hide (i, j) iff i >= m and j >= m (0-based).
class ConnectivityMask {
 public:
  /// Infers the block parameter when w follows the block pattern.
  explicit ConnectivityMask(Eigen::MatrixXd w);

  const Eigen::MatrixXd& values() const { return w_; }
  MaskPattern pattern() const { return m_ ? MaskPattern::kBlock : MaskPattern::kArbitrary; }
  std::optional<std::size_t> m() const { return m_; }
  std::size_t n1() const { return static_cast<std::size_t>(w_.rows()); }
  std::size_t n2() const { return static_cast<std::size_t>(w_.cols()); }
  std::size_t observed() const;
  bool full() const { return observed() == n1() * n2(); }

  static ConnectivityMask ones(std::size_t n1, std::size_t n2);

 private:
  Eigen::MatrixXd w_;
  std::optional<std::size_t> m_;
};

enum class DiagonalBlocks {
  kOnes,      ///< intra-body blocks fully weighted
  kIdentity,  ///< identity intra-body blocks
};

struct ErasureMatrix {
  Eigen::MatrixXd w_hat;
};

struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

CrossDistanceMatrix cross_edm(const SensorMatrix& s1, const SensorMatrix& s2);

FullEdm full_edm(const SensorMatrix& s, std::size_t n1);

/// Adds N(0, sigma^2) range errors, clamping negatives to zero. Plain domain only.
CrossDistanceMatrix add_range_noise(const CrossDistanceMatrix& d12, const NoiseModel& noise);

CrossDistanceMatrix square_measurements(const CrossDistanceMatrix& d12);

ConnectivityMask connectivity_mask(std::size_t n1, std::size_t n2, std::size_t m);

/// Uniformly random mask with round(fraction * n1 * n2) observed entries.
ConnectivityMask random_mask(std::size_t n1, std::size_t n2, double fraction, std::uint64_t seed);

double completeness_fraction(const ConnectivityMask& w);

ErasureMatrix erasure_matrix(const ConnectivityMask& w,
                             DiagonalBlocks blocks = DiagonalBlocks::kOnes);

CrossDistanceMatrix apply_mask(const CrossDistanceMatrix& d12, const ConnectivityMask& w);

/// psi: squared column norms.
Eigen::VectorXd squared_norms(const Eigen::Matrix3Xd& s);

}  // namespace rblkit
