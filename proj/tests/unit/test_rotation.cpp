#include "oracles.hpp"

#include <rblkit/body.hpp>
#include <rblkit/embedding.hpp>
#include <rblkit/error.hpp>
#include <rblkit/rotation.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace rblkit;

namespace {

Eigen::Matrix3Xd centred(Eigen::Matrix3Xd c) {
  c.colwise() -= oracle::center(c);
  return c;
}

// Rotation about a random axis by at most max_angle radians.
Eigen::Matrix3d small_rotation(std::mt19937_64& rng, double max_angle) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, max_angle);
  const Eigen::Vector3d axis = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
  return Eigen::AngleAxisd(u(rng), axis).toRotationMatrix();
}

// Point cloud whose scatter matrix is diagonal with distinct entries.
Eigen::Matrix3Xd principal_body(std::mt19937_64& rng, int n, const Eigen::Vector3d& scale) {
  const Eigen::Matrix3Xd raw = centred(oracle::random_body(rng, n, scale));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(raw * raw.transpose());
  Eigen::Matrix3d v = es.eigenvectors().rowwise().reverse();
  if (v.determinant() < 0) v.col(2) *= -1;
  return v.transpose() * raw;
}

struct Ego {
  RotationEstimate est;
  Eigen::Matrix3Xd s2_aligned;
  CrossDistanceMatrix d12;
};

Ego run_ego(const Eigen::Matrix3Xd& c1, const Eigen::Matrix3Xd& c2, const Eigen::Matrix3d& q, const Eigen::Vector3d& t) {
  const Conformation body(c1);
  const CrossDistanceMatrix d12(oracle::cross_distances(c1, oracle::transform(q, t, c2)));
  const auto w = ConnectivityMask::ones(d12.n1(), d12.n2());
  const auto emb = embed_target(body, d12);
  return {estimate_rotation_ego(body, d12, w, emb.estimate.s2_aligned), emb.estimate.s2_aligned, d12};
}

bool proper(const Eigen::Matrix3d& q) {
  return (q.transpose() * q - Eigen::Matrix3d::Identity()).norm() < 1e-9 && std::abs(q.determinant() - 1) < 1e-9;
}

const Eigen::Matrix3d kTableQ = oracle::euler_zyx(oracle::deg(10), oracle::deg(20), oracle::deg(45));

}  // namespace

TEST(DoubleCenterCross, CentredTableEqualsGramProduct) {
  const Eigen::Matrix3Xd c1 = centred(oracle::table1_c1()), c2 = centred(oracle::table1_c2());
  const Eigen::MatrixXd d = oracle::cross_distances(c1, oracle::transform(kTableQ, {7, 3, 0.5}, c2));
  const Eigen::MatrixXd dbar = double_center_cross(d.cwiseProduct(d));
  EXPECT_LT((dbar - c1.transpose() * kTableQ * c2).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(double_center_cross(Eigen::MatrixXd::Constant(4, 6, 3.5)).norm(), 1e-13);
  EXPECT_LT((double_center_cross(d) + 0.5 * oracle::double_center(d)).norm(), 1e-12);
}

TEST(ProjectLeft, RecoversRotatedTarget) {
  const Conformation c1(oracle::table1_c1());
  const Eigen::Matrix3Xd c1c = centred(oracle::table1_c1()), c2 = centred(oracle::table1_c2());
  const Eigen::MatrixXd d = oracle::cross_distances(c1.points(), oracle::transform(kTableQ, {7, 3, 0.5}, c2));
  const Eigen::Matrix3Xd p = project_left(c1, double_center_cross(d.cwiseProduct(d)));
  EXPECT_LT((p - kTableQ * c2).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(project_left(c1, Eigen::MatrixXd::Zero(12, 10)).norm(), 1e-15);
  // row scaling of the body only changes the pseudo-inverse, not the recovered factor
  const Eigen::Matrix3d scale = Eigen::Vector3d(2.0, 0.5, 3.0).asDiagonal();
  const Conformation scaled(scale * c1.points());
  const Eigen::Matrix3Xd x = kTableQ * c2;
  EXPECT_LT((project_left(scaled, centred(scaled.points()).transpose() * x) - x).norm(), 1e-9);
  EXPECT_LT((project_left(c1, c1c.transpose() * x) - x).norm(), 1e-9);
}

TEST(RotationEgo, NoiselessTable) {
  for (bool c : {false, true}) {
    const Eigen::Matrix3Xd c1 = c ? centred(oracle::table1_c1()) : oracle::table1_c1();
    const Eigen::Matrix3Xd c2 = c ? centred(oracle::table1_c2()) : oracle::table1_c2();
    const auto r = run_ego(c1, c2, kTableQ, {7, 3, 0.5});
    EXPECT_LT((r.est.q_hat.matrix() - kTableQ).norm(), 1e-3) << c;
    EXPECT_EQ(r.est.method, RotationMethod::kEgo);
    EXPECT_TRUE(proper(r.est.q_hat.matrix()));
  }
}

TEST(RotationEgo, IdentityTarget) {
  const auto r = run_ego(oracle::table1_c1(), oracle::table1_c2(), Eigen::Matrix3d::Identity(), {6, -2, 1});
  EXPECT_LT((r.est.q_hat.matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-3);
}

TEST(RotationEgo, SelectedCandidateIsGlobalMinimum) {
  std::mt19937_64 rng(8);
  for (const Eigen::Vector3d& axes : {Eigen::Vector3d(4, 2, 1), Eigen::Vector3d(1.05, 1.0, 0.95)}) {
    const Eigen::Matrix3Xd c2 = principal_body(rng, 10, axes);
    const Eigen::Matrix3Xd c1 = oracle::table1_c1();
    const auto r = run_ego(c1, c2, small_rotation(rng, 0.6), {5, 4, -1});
    // re-enumerate every ordering and proper sign pattern independently
    const Eigen::MatrixXd dsq = r.d12.values().cwiseProduct(r.d12.values());
    const Eigen::Matrix3Xd dc = project_left(Conformation(c1), -0.5 * oracle::double_center(dsq));
    const Eigen::Matrix3d m = dc * dc.transpose();
    const Eigen::Matrix3Xd s2c = centred(r.s2_aligned);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> sm(m), sl(s2c * s2c.transpose());
    const Eigen::Matrix3d v = sm.eigenvectors().rowwise().reverse();
    const Eigen::Vector3d lam = sl.eigenvalues().reverse();
    std::array<int, 3> perm{0, 1, 2};
    double best = 1e300;
    int count = 0;
    do {
      for (int s = 0; s < 8; ++s) {
        Eigen::Matrix3d q = v;
        for (int k = 0; k < 3; ++k) {
          q.col(k) = v.col(perm[k]) * ((s >> k & 1) ? -1.0 : 1.0);
        }
        if (q.determinant() < 0) continue;
        Eigen::Vector3d lp(lam(perm[0]), lam(perm[1]), lam(perm[2]));
        best = std::min(best, (m - q * lp.asDiagonal() * q.transpose()).squaredNorm());
        ++count;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(count, 24);
    EXPECT_NEAR(r.est.objective, best, 1e-9 * (1 + m.squaredNorm()));
    const auto cands = rotation_candidates(m, sl.eigenvalues().reverse());
    ASSERT_EQ(cands.size(), 24u);
    double lib_best = 1e300;
    for (const auto& c : cands) {
      EXPECT_TRUE(proper(c.q));
      lib_best = std::min(lib_best, c.objective);
    }
    EXPECT_NEAR(lib_best, best, 1e-9 * (1 + m.squaredNorm()));
  }
}

TEST(RotationEgo, NearSphericalBodyFlagsAmbiguity) {
  const auto r = run_ego(oracle::table1_c1(), oracle::box_corners(2, 2, 1), kTableQ, {7, 3, 0.5});
  EXPECT_TRUE(r.est.ambiguous);
  EXPECT_TRUE(proper(r.est.q_hat.matrix()));
}

TEST(RotationEgo, PrincipalFrameBodiesProperty) {
  // The egoistic estimator only sees second moments of the target, so Q is
  // identifiable when the target frame is its principal frame and the rotation
  // is closer to the reference than to any axis relabelling.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Matrix3Xd c2 = principal_body(rng, 6 + trial % 8, {3.0, 1.8, 0.8});
    const Eigen::Matrix3d q = small_rotation(rng, 0.7);
    const auto r = run_ego(oracle::random_body(rng, 15, {3, 2, 1.5}), c2, q, {u(rng), u(rng), u(rng)});
    EXPECT_LT((r.est.q_hat.matrix() - q).norm(), 1e-3) << "trial " << trial;
  }
}

TEST(RotationOpp, ExactAndLinkRequirements) {
  const Conformation c1(oracle::table1_c1()), c2(oracle::table1_c2());
  const CrossDistanceMatrix d12(oracle::cross_distances(c1.points(), oracle::transform(kTableQ, {7, 3, 0.5}, c2.points())));
  const auto full = estimate_rotation_opp(c1, c2, d12, ConnectivityMask::ones(12, 10));
  EXPECT_LT((full.q_hat.matrix() - kTableQ).norm(), 1e-9);
  EXPECT_EQ(full.method, RotationMethod::kOppGenie);
  for (std::size_t m = 5; m <= 10; ++m) {
    const auto w = connectivity_mask(12, 10, m);
    const auto est = estimate_rotation_opp(c1, c2, apply_mask(d12, w), w);
    EXPECT_LT((est.q_hat.matrix() - full.q_hat.matrix()).norm(), 1e-9) << "M=" << m;
  }
  // Target landmarks 0..3 lie on the plane z = 2 - y/2.
  const auto w4 = connectivity_mask(12, 10, 4);
  try {
    estimate_rotation_opp(c1, c2, apply_mask(d12, w4), w4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficiency);
  }
  const auto w3 = connectivity_mask(12, 10, 3);
  try {
    estimate_rotation_opp(c1, c2, apply_mask(d12, w3), w3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientLinks);
  }
}

TEST(RotationOpp, CoplanarVisibleTargetIsRankDeficient) {
  // First five landmarks of this target lie in one plane.
  Eigen::Matrix3Xd c2(3, 6);
  c2 << 0, 1, 0, 1, 2, 0.3,  //
      0, 0, 1, 1, 2, 0.7,    //
      0, 0, 0, 0, 0, 1.5;
  const Conformation c1(oracle::table1_c1()), body2(c2);
  const CrossDistanceMatrix d12(oracle::cross_distances(c1.points(), c2));
  const auto w = connectivity_mask(12, 6, 5);
  try {
    estimate_rotation_opp(c1, body2, apply_mask(d12, w), w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficiency);
  }
}

TEST(NearestRotation, Examples) {
  EXPECT_LT((nearest_rotation(kTableQ).matrix() - kTableQ).norm(), 1e-12);
  EXPECT_LT((nearest_rotation(1.5 * kTableQ).matrix() - kTableQ).norm(), 1e-12);
  std::mt19937_64 rng(4);
  Eigen::Matrix3d e = oracle::random_body(rng, 3, Eigen::Vector3d::Ones());
  e *= 0.01 / e.norm();
  EXPECT_LT((nearest_rotation(kTableQ + e).matrix() - kTableQ).norm(), 0.02);
  Eigen::Matrix3d reflect = kTableQ;
  reflect.col(2) *= -1;
  EXPECT_TRUE(proper(nearest_rotation(reflect).matrix()));
  EXPECT_THROW(nearest_rotation(Eigen::Vector3d(1, 0, 0).asDiagonal()), Error);
}

TEST(RotationNaive, ColumnSwapOnPermutedSpectrum) {
  const Eigen::Matrix3d q = oracle::euler_zyx(oracle::deg(10), oracle::deg(-15), oracle::deg(30));
  const auto good = run_ego(oracle::table1_c1(), oracle::box_corners(4, 2, 1), q, {7, 3, 0.5});
  EXPECT_LT((estimate_rotation_naive(good.s2_aligned).q_hat.matrix() - q).norm(), 1e-3);
  const auto bad = run_ego(oracle::table1_c1(), oracle::box_corners(1, 2, 4), q, {7, 3, 0.5});
  const auto naive = estimate_rotation_naive(bad.s2_aligned);
  EXPECT_EQ(naive.method, RotationMethod::kNaiveEig);
  EXPECT_GT((naive.q_hat.matrix() - q).norm(), 0.5);
  EXPECT_LT((bad.est.q_hat.matrix() - q).norm(), 1e-3);
}
