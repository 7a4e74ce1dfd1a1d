#include "rblkit/rotation.hpp"

#include "linalg.hpp"
#include "rblkit/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace rblkit {

namespace {

constexpr std::array<std::array<int, 3>, 6> kPermutations{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

// Eigen-decomposition of a symmetric 3x3 with descending eigenvalues.
void descending_eig(const Eigen::Matrix3d& m, Eigen::Matrix3d& vecs, Eigen::Vector3d& vals) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m);
  vals = eig.eigenvalues().reverse();
  vecs = eig.eigenvectors().rowwise().reverse();
}

bool has_close_pair(const Eigen::Vector3d& lambda, double tol) {
  const double scale = std::max(lambda.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(lambda(i) - lambda(j)) <= tol * scale) return true;
    }
  }
  return false;
}

// Picks the smallest objective; near-ties go to the candidate closest to reference.
const RotationCandidate& select(const std::vector<RotationCandidate>& cands,
                                const Eigen::Matrix3d& reference, double tie_tol) {
  double best = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (const auto& c : cands) {
    best = std::min(best, c.objective);
    scale = std::max(scale, std::abs(c.objective));
  }
  const double cut = best + tie_tol * std::max(scale, 1.0);
  const RotationCandidate* pick = nullptr;
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    if (c.objective > cut) continue;
    const double d = (c.q - reference).norm();
    if (d < dist) {
      dist = d;
      pick = &c;
    }
  }
  return *pick;
}

std::vector<Eigen::Index> full_rows(const Eigen::MatrixXd& w) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if ((w.row(i).array() != 0.0).all()) out.push_back(i);
  }
  return out;
}

std::vector<Eigen::Index> full_cols(const Eigen::MatrixXd& w) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    if ((w.col(j).array() != 0.0).all()) out.push_back(j);
  }
  return out;
}

}  // namespace

std::string_view to_string(RotationMethod m) {
  switch (m) {
    case RotationMethod::kEgo: return "ego";
    case RotationMethod::kOppGenie: return "opp-genie";
    case RotationMethod::kNaiveEig: return "naive-eig";
  }
  return "unknown";
}

Eigen::MatrixXd double_center_cross(const Eigen::MatrixXd& d12_sq_masked) {
  return -0.5 * double_center(d12_sq_masked);
}

Eigen::Matrix3Xd project_left(const Conformation& c1, const Eigen::MatrixXd& d_bar) {
  require(static_cast<std::size_t>(d_bar.rows()) == c1.size(), "d_bar rows must match C1");
  const Eigen::Matrix3Xd c1c = centered(c1.points());
  const Eigen::Matrix3d gram = c1c * c1c.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(gram);
  if (!(svd.singularValues()(2) > 1e-12 * svd.singularValues()(0))) {
    fail(ErrorCode::kRankDeficiency, "centred C1 does not have rank 3");
  }
  return gram.ldlt().solve(c1c * d_bar);
}

std::vector<RotationCandidate> rotation_candidates(const Eigen::Matrix3d& m,
                                                   const Eigen::Vector3d& lambda) {
  Eigen::Matrix3d v;
  Eigen::Vector3d mvals;
  descending_eig(0.5 * (m + m.transpose()), v, mvals);
  std::vector<RotationCandidate> out;
  out.reserve(24);
  for (int p = 0; p < 6; ++p) {
    Eigen::Matrix3d perm = Eigen::Matrix3d::Zero();
    Eigen::Vector3d lam;
    for (int k = 0; k < 3; ++k) {
      perm(kPermutations[p][k], k) = 1.0;
      lam(k) = lambda(kPermutations[p][k]);
    }
    const Eigen::Matrix3d vp = v * perm;
    int proper = 0;
    for (int s = 0; s < 8; ++s) {
      const Eigen::Vector3d signs((s & 1) ? -1.0 : 1.0, (s & 2) ? -1.0 : 1.0,
                                  (s & 4) ? -1.0 : 1.0);
      const Eigen::Matrix3d q = vp * signs.asDiagonal();
      if (q.determinant() <= 0.0) continue;
      RotationCandidate c;
      c.q = q;
      c.permutation_index = p;
      c.sign_index = proper++;
      c.objective = (m - q * lam.asDiagonal() * q.transpose()).squaredNorm();
      out.push_back(c);
    }
  }
  return out;
}

RotationEstimate estimate_rotation_ego(const Conformation& c1,
                                       const CrossDistanceMatrix& d12_measured,
                                       const ConnectivityMask& w,
                                       const Eigen::Matrix3Xd& s2_aligned,
                                       const RotationOptions& opts) {
  require(d12_measured.n1() == c1.size(), "conformation size does not match d12 rows");
  require(d12_measured.n1() == w.n1() && d12_measured.n2() == w.n2(),
          "mask shape does not match measurements");
  require(static_cast<std::size_t>(s2_aligned.cols()) == d12_measured.n2(),
          "target estimate does not match d12 columns");
  const Eigen::MatrixXd d_bar =
      double_center_cross(d12_measured.squared_values().cwiseProduct(w.values()));
  const Eigen::Matrix3Xd d_check = project_left(c1, d_bar);
  const Eigen::Matrix3d m = d_check * d_check.transpose();

  const Eigen::Matrix3Xd s2c = centered(s2_aligned);
  Eigen::Matrix3d unused;
  Eigen::Vector3d lambda;
  descending_eig(s2c * s2c.transpose(), unused, lambda);

  const auto cands = rotation_candidates(m, lambda);
  const RotationCandidate& best = select(cands, opts.reference.matrix(), opts.tie_tol);
  RotationEstimate est;
  est.q_hat = nearest_rotation(best.q);
  est.method = RotationMethod::kEgo;
  est.permutation_index = best.permutation_index;
  est.sign_index = best.sign_index;
  est.objective = best.objective;
  est.ambiguous = has_close_pair(lambda, 1e-9);
  return est;
}

RotationEstimate estimate_rotation_naive(const Eigen::Matrix3Xd& s2_aligned,
                                         const RotationOptions& opts) {
  require(s2_aligned.cols() >= 4, "target estimate needs at least 4 points");
  const Eigen::Matrix3Xd s2c = centered(s2_aligned);
  const Eigen::Matrix3d scatter = s2c * s2c.transpose();
  Eigen::Matrix3d v;
  Eigen::Vector3d lambda;
  descending_eig(scatter, v, lambda);
  std::vector<RotationCandidate> signs;
  for (int s = 0, proper = 0; s < 8; ++s) {
    const Eigen::Vector3d sv((s & 1) ? -1.0 : 1.0, (s & 2) ? -1.0 : 1.0, (s & 4) ? -1.0 : 1.0);
    const Eigen::Matrix3d q = v * sv.asDiagonal();
    if (q.determinant() <= 0.0) continue;
    signs.push_back({q, 0, proper++, 0.0});
  }
  const RotationCandidate& best = select(signs, opts.reference.matrix(), 0.0);
  RotationEstimate est;
  est.q_hat = nearest_rotation(best.q);
  est.method = RotationMethod::kNaiveEig;
  est.sign_index = best.sign_index;
  est.objective = (scatter - best.q * lambda.asDiagonal() * best.q.transpose()).squaredNorm();
  est.ambiguous = has_close_pair(lambda, 1e-9);
  return est;
}

RotationEstimate estimate_rotation_opp(const Conformation& c1, const Conformation& c2_genie,
                                       const CrossDistanceMatrix& d12_measured,
                                       const ConnectivityMask& w) {
  require(d12_measured.n1() == c1.size() && d12_measured.n2() == c2_genie.size(),
          "d12 shape does not match the conformations");
  require(d12_measured.n1() == w.n1() && d12_measured.n2() == w.n2(),
          "mask shape does not match measurements");
  const auto rows = full_rows(w.values());
  const auto cols = full_cols(w.values());
  if (std::min(rows.size(), cols.size()) < 4) {
    fail(ErrorCode::kInsufficientLinks, "at least 4 visible links are required");
  }
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  Eigen::Matrix3Xd c1v(3, nr);
  Eigen::Matrix3Xd c2v(3, nc);
  Eigen::MatrixXd y(nr, nc);
  const Eigen::MatrixXd sq = d12_measured.squared_values();
  for (Eigen::Index i = 0; i < nr; ++i) c1v.col(i) = c1.points().col(rows[static_cast<std::size_t>(i)]);
  for (Eigen::Index j = 0; j < nc; ++j) c2v.col(j) = c2_genie.points().col(cols[static_cast<std::size_t>(j)]);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      y(i, j) = sq(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
    }
  }
  const Eigen::Matrix3Xd c1c = centered(c1v);
  const Eigen::Matrix3Xd c2c = centered(c2v);
  Eigen::JacobiSVD<Eigen::Matrix3Xd> rank_check(c2c);
  const auto sv = rank_check.singularValues();
  if (!(sv(2) > 1e-10 * sv(0))) {
    fail(ErrorCode::kRankDeficiency, "visible target landmarks do not span 3-D");
  }
  // d_bar = C1c' Q C2c; strip C2c from the right, then solve min ||C1c' Q - B||.
  const Eigen::MatrixXd d_bar = double_center_cross(y);
  const Eigen::MatrixXd b = d_bar * detail::pinv(c2c);
  const Eigen::Matrix3d q = detail::proper_polar(c1c * b);

  RotationEstimate est;
  est.q_hat = RotationMatrix(q);
  est.method = RotationMethod::kOppGenie;
  est.objective = (c1c.transpose() * q - b).squaredNorm();
  return est;
}

RotationMatrix nearest_rotation(const Eigen::Matrix3d& m) {
  require(m.allFinite(), "nearest_rotation input must be finite");
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
  const auto sv = svd.singularValues();
  if (!(sv(1) > 1e-12 * sv(0))) {
    fail(ErrorCode::kDegenerateConfiguration, "matrix rank is below 2");
  }
  return RotationMatrix(detail::proper_polar(m));
}

}  // namespace rblkit
