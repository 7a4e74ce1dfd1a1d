#include "oracles.hpp"

#include <rblkit/body.hpp>
#include <rblkit/embedding.hpp>
#include <rblkit/error.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace rblkit;

namespace {

Eigen::Matrix3Xd table_s2() {
  return oracle::transform(oracle::euler_zyx(oracle::deg(10), oracle::deg(20), oracle::deg(45)), {7, 3, 0.5},
                           oracle::table1_c2());
}

Eigen::Matrix3Xd stacked(const Eigen::Matrix3Xd& a, const Eigen::Matrix3Xd& b) {
  Eigen::Matrix3Xd s(3, a.cols() + b.cols());
  s << a, b;
  return s;
}

double fit(const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& dst, const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  return (dst - oracle::transform(r, t, src)).norm();
}

}  // namespace

TEST(Mds, TableRoundTrip) {
  const Eigen::Matrix3Xd s = stacked(oracle::table1_c1(), table_s2());
  const Eigen::MatrixXd d = oracle::cross_distances(s, s);
  const auto mds = classical_mds(FullEdm(d, 12));
  ASSERT_EQ(mds.s1_star.cols(), 12);
  ASSERT_EQ(mds.s2_star.cols(), 10);
  const Eigen::Matrix3Xd e = stacked(mds.s1_star, mds.s2_star);
  EXPECT_LT((oracle::cross_distances(e, e) - d).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GE(mds.eigenvalues(0), mds.eigenvalues(1));
  EXPECT_GE(mds.eigenvalues(1), mds.eigenvalues(2));
}

TEST(Mds, PlanarSquareHasFlatThirdAxis) {
  Eigen::Matrix3Xd s(3, 4);
  s << 0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 0, 0;
  const auto mds = classical_mds(FullEdm(oracle::cross_distances(s, s), 2));
  const Eigen::Matrix3Xd e = stacked(mds.s1_star, mds.s2_star);
  EXPECT_LT(e.row(2).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((oracle::cross_distances(e, e) - oracle::cross_distances(s, s)).norm(), 1e-9);
}

TEST(Mds, TwoPointSegment) {
  Eigen::Matrix2d d;
  d << 0, 5, 5, 0;
  const auto mds = classical_mds(FullEdm(d, 1));
  EXPECT_NEAR((mds.s1_star.col(0) - mds.s2_star.col(0)).norm(), 5.0, 1e-12);
}

TEST(Mds, AllZeroEdmIsDegenerate) {
  try {
    classical_mds(FullEdm(Eigen::MatrixXd::Zero(5, 5), 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateEmbedding);
  }
}

TEST(Procrustes, IdentityAndKnownTransform) {
  const Eigen::Matrix3Xd c = oracle::table1_c1();
  const auto id = procrustes_align(c, c);
  EXPECT_LT((id.r_star.matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
  EXPECT_LT(id.t_star.norm(), 1e-12);

  std::mt19937_64 rng(5);
  const Eigen::Matrix3d q = oracle::random_rotation(rng);
  const Eigen::Vector3d t(1.5, -2, 4);
  const auto a = procrustes_align(c, oracle::transform(q, t, c));
  EXPECT_LT((a.r_star.matrix() - q).norm(), 1e-9);
  EXPECT_LT((a.t_star - t).norm(), 1e-9);
  EXPECT_LT(a.residual, 1e-9);
}

TEST(Procrustes, OptimalUnderPerturbation) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 0.01);
  const Eigen::Matrix3Xd src = oracle::random_body(rng, 12);
  const Eigen::Matrix3d q = oracle::random_rotation(rng);
  const Eigen::Vector3d t(0.3, 0.2, -1);
  Eigen::Matrix3Xd dst = oracle::transform(q, t, src);
  for (int j = 0; j < dst.cols(); ++j) {
    for (int k = 0; k < 3; ++k) dst(k, j) += g(rng);
  }
  const auto a = procrustes_align(src, dst);
  EXPECT_NEAR(a.residual, fit(src, dst, a.r_star.matrix(), a.t_star), 1e-12);
  EXPECT_LE(a.residual, fit(src, dst, q, t) + 1e-12);
}

TEST(Procrustes, CollinearSourceIsAmbiguous) {
  Eigen::Matrix3Xd line(3, 4);
  line << 0, 1, 2, 3, 0, 0, 0, 0, 0, 0, 0, 0;
  try {
    procrustes_align(line, line);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAmbiguousAlignment);
  }
}

TEST(Procrustes, PlanarSourceStillProper) {
  Eigen::Matrix3Xd sq(3, 4);
  sq << 0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 0, 0;
  const Eigen::Matrix3d q = oracle::euler_zyx(0.1, 0.2, 0.3);
  const auto a = procrustes_align(sq, oracle::transform(q, Eigen::Vector3d::Zero(), sq));
  EXPECT_NEAR(a.r_star.matrix().determinant(), 1.0, 1e-12);
  EXPECT_LT((a.r_star.matrix() - q).norm(), 1e-9);
}

TEST(AlignTarget, NoiselessTableRecoversTarget) {
  const Conformation c1(oracle::table1_c1());
  const Eigen::Matrix3Xd s = stacked(c1.points(), table_s2());
  const auto mds = classical_mds(FullEdm(oracle::cross_distances(s, s), 12));
  const auto est = align_target(mds, c1);
  EXPECT_LT((est.s2_aligned - table_s2()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((est.s2_aligned - oracle::transform(est.r_star.matrix(), est.t_star, est.s2_star)).norm(), 1e-9);
  const auto stack = build_stacked_estimate(c1, est.s2_aligned);
  ASSERT_EQ(stack.cols(), 22);
  EXPECT_EQ(stack.leftCols(12), c1.points());
  EXPECT_LT((stack - s).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(AlignTarget, AlreadyInFrame) {
  const Conformation c1(oracle::table1_c1());
  MdsCoordinates mds;
  mds.s1_star = c1.points();
  mds.s2_star = table_s2();
  const auto est = align_target(mds, c1);
  EXPECT_LT((est.r_star.matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
  EXPECT_LT(est.t_star.norm(), 1e-12);
  EXPECT_LT((est.s2_aligned - mds.s2_star).norm(), 1e-12);
  EXPECT_FALSE(est.mirrored);
}

TEST(AlignTarget, MirroredEmbeddingIsUndone) {
  const Conformation c1(oracle::table1_c1());
  const Eigen::Matrix3d flip = Eigen::Vector3d(1, 1, -1).asDiagonal();
  MdsCoordinates mds;
  mds.s1_star = flip * c1.points();
  mds.s2_star = flip * table_s2();
  const auto est = align_target(mds, c1);
  EXPECT_TRUE(est.mirrored);
  EXPECT_LT(est.residual, 1e-9);
  EXPECT_NEAR(est.r_star.matrix().determinant(), 1.0, 1e-12);
  EXPECT_LT((est.s2_aligned - table_s2()).norm(), 1e-9);
}

TEST(EmbedTarget, EgoisticPipelineNoiseless) {
  const Conformation c1(oracle::table1_c1());
  const auto te = embed_target(c1, CrossDistanceMatrix(oracle::cross_distances(c1.points(), table_s2())));
  EXPECT_LT((te.estimate.s2_aligned - table_s2()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(te.d_hat.n1(), 12u);
}
