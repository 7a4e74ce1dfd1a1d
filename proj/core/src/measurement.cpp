#include "rblkit/measurement.hpp"

#include "rblkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace rblkit {

CrossDistanceMatrix::CrossDistanceMatrix(Eigen::MatrixXd d12, Domain domain)
    : d_(std::move(d12)), domain_(domain) {
  require(d_.allFinite(), "distance matrix has non-finite entries");
  require((d_.array() >= 0.0).all(), "distance matrix has negative entries");
}

Eigen::MatrixXd CrossDistanceMatrix::squared_values() const {
  return squared() ? d_ : Eigen::MatrixXd(d_.array().square());
}

FullEdm::FullEdm(Eigen::MatrixXd d, std::size_t n1) : d_(std::move(d)), n1_(n1) {
  require(d_.rows() == d_.cols(), "EDM must be square");
  require(n1_ <= static_cast<std::size_t>(d_.rows()), "EDM split exceeds its size");
  require(d_.allFinite(), "EDM has non-finite entries");
  require((d_.array() >= 0.0).all(), "EDM has negative entries");
  require(d_.diagonal().isZero(0.0), "EDM diagonal must be zero");
  const double scale = std::max(1.0, d_.cwiseAbs().maxCoeff());
  require((d_ - d_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "EDM is not symmetric");
}

ConnectivityMask::ConnectivityMask(Eigen::MatrixXd w) : w_(std::move(w)) {
  require(((w_.array() == 0.0) || (w_.array() == 1.0)).all(), "mask entries must be 0 or 1");
  const auto lim = std::min(w_.rows(), w_.cols());
  Eigen::Index m = 0;
  while (m < lim && (w_.row(m).array() == 1.0).all()) ++m;
  bool block = true;
  for (Eigen::Index i = 0; i < w_.rows() && block; ++i) {
    for (Eigen::Index j = 0; j < w_.cols(); ++j) {
      const double expect = (i >= m && j >= m) ? 0.0 : 1.0;
      if (w_(i, j) != expect) {
        block = false;
        break;
      }
    }
  }
  if (block) m_ = static_cast<std::size_t>(m);
}

std::size_t ConnectivityMask::observed() const {
  return static_cast<std::size_t>(std::llround(w_.sum()));
}

ConnectivityMask ConnectivityMask::ones(std::size_t n1, std::size_t n2) {
  return ConnectivityMask(Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n1),
                                                static_cast<Eigen::Index>(n2)));
}

CrossDistanceMatrix cross_edm(const SensorMatrix& s1, const SensorMatrix& s2) {
  require(s1.allFinite() && s2.allFinite(), "sensor positions must be finite");
  Eigen::MatrixXd d(s1.cols(), s2.cols());
  for (Eigen::Index j = 0; j < s2.cols(); ++j) {
    d.col(j) = (s1.colwise() - s2.col(j)).colwise().norm().transpose();
  }
  return CrossDistanceMatrix(std::move(d));
}

FullEdm full_edm(const SensorMatrix& s, std::size_t n1) {
  const Eigen::MatrixXd d = cross_edm(s, s).values();
  // Exact symmetry and zero diagonal regardless of rounding in the norms.
  Eigen::MatrixXd sym = 0.5 * (d + d.transpose());
  sym.diagonal().setZero();
  return FullEdm(std::move(sym), n1);
}

CrossDistanceMatrix add_range_noise(const CrossDistanceMatrix& d12, const NoiseModel& noise) {
  if (d12.squared()) fail(ErrorCode::kDomainMismatch, "range noise applies to plain distances");
  require(noise.sigma >= 0.0 && std::isfinite(noise.sigma), "noise sigma must be >= 0");
  if (noise.sigma == 0.0) return d12;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, noise.sigma);
  Eigen::MatrixXd d = d12.values();
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, j) = std::max(0.0, d(i, j) + gauss(rng));
  }
  return CrossDistanceMatrix(std::move(d));
}

CrossDistanceMatrix square_measurements(const CrossDistanceMatrix& d12) {
  if (d12.squared()) fail(ErrorCode::kDomainMismatch, "measurements are already squared");
  return CrossDistanceMatrix(d12.values().array().square().matrix(), Domain::kSquared);
}

ConnectivityMask connectivity_mask(std::size_t n1, std::size_t n2, std::size_t m) {
  require(m <= std::min(n1, n2), "visible-link count m exceeds min(n1, n2)");
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n1),
                                            static_cast<Eigen::Index>(n2));
  const auto mi = static_cast<Eigen::Index>(m);
  w.bottomRightCorner(w.rows() - mi, w.cols() - mi).setZero();
  return ConnectivityMask(std::move(w));
}

ConnectivityMask random_mask(std::size_t n1, std::size_t n2, double fraction, std::uint64_t seed) {
  require(fraction >= 0.0 && fraction <= 1.0, "mask fraction must lie in [0, 1]");
  const std::size_t total = n1 * n2;
  const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n1),
                                            static_cast<Eigen::Index>(n2));
  for (std::size_t k = 0; k < keep; ++k) {
    w(static_cast<Eigen::Index>(idx[k] % n1), static_cast<Eigen::Index>(idx[k] / n1)) = 1.0;
  }
  return ConnectivityMask(std::move(w));
}

double completeness_fraction(const ConnectivityMask& w) {
  const double total = static_cast<double>(w.n1() * w.n2());
  return total == 0.0 ? 1.0 : static_cast<double>(w.observed()) / total;
}

ErasureMatrix erasure_matrix(const ConnectivityMask& w, DiagonalBlocks blocks) {
  const auto n1 = static_cast<Eigen::Index>(w.n1());
  const auto n2 = static_cast<Eigen::Index>(w.n2());
  Eigen::MatrixXd out(n1 + n2, n1 + n2);
  if (blocks == DiagonalBlocks::kOnes) {
    out.topLeftCorner(n1, n1).setOnes();
    out.bottomRightCorner(n2, n2).setOnes();
  } else {
    out.topLeftCorner(n1, n1).setIdentity();
    out.bottomRightCorner(n2, n2).setIdentity();
  }
  out.topRightCorner(n1, n2) = w.values();
  out.bottomLeftCorner(n2, n1) = w.values().transpose();
  return {std::move(out)};
}

CrossDistanceMatrix apply_mask(const CrossDistanceMatrix& d12, const ConnectivityMask& w) {
  require(d12.n1() == w.n1() && d12.n2() == w.n2(), "mask shape does not match measurements");
  return CrossDistanceMatrix(d12.values().cwiseProduct(w.values()), d12.domain());
}

Eigen::VectorXd squared_norms(const Eigen::Matrix3Xd& s) {
  return s.colwise().squaredNorm().transpose();
}

}  // namespace rblkit
