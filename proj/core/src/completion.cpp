#include "rblkit/completion.hpp"

#include "linalg.hpp"
#include "rblkit/error.hpp"

#include <cmath>
#include <vector>

namespace rblkit {

namespace {

Eigen::MatrixXd clamped_sqrt(const Eigen::MatrixXd& x) {
  return x.cwiseMax(0.0).cwiseSqrt();
}

Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& x) { return 0.5 * (x + x.transpose()); }

std::vector<Eigen::Index> observed_rows(const Eigen::MatrixXd& mask, Eigen::Index j) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    if (mask(i, j) != 0.0) rows.push_back(i);
  }
  return rows;
}

// Solves min ||a x - b||^2 + ridge ||x||^2; minimum-norm when ridge is zero.
Eigen::VectorXd solve_ls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double ridge) {
  if (ridge > 0.0) {
    Eigen::MatrixXd g = a.transpose() * a;
    g.diagonal().array() += ridge;
    return g.ldlt().solve(a.transpose() * b);
  }
  return a.completeOrthogonalDecomposition().solve(b);
}

}  // namespace

Eigen::MatrixXd hollow(const Eigen::MatrixXd& x) {
  require(x.rows() == x.cols(), "hollow needs a square matrix");
  Eigen::MatrixXd out = x;
  out.diagonal().setZero();
  return out;
}

Eigen::MatrixXd nystrom_d2(const Eigen::MatrixXd& d1, const CrossDistanceMatrix& d12,
                           NystromMode mode) {
  require(d1.rows() == d1.cols(), "d1 must be square");
  require(static_cast<std::size_t>(d1.rows()) == d12.n1(), "d1 and d12 disagree on n1");
  if (mode == NystromMode::kPlain) {
    const Eigen::MatrixXd plain = d12.squared() ? clamped_sqrt(d12.values()) : d12.values();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d1);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(s.size() - 1) > 1e-12 * s(0))) {
      fail(ErrorCode::kRankDeficiency, "d1 is singular; use the squared Nystrom mode");
    }
    const Eigen::MatrixXd est = plain.transpose() * d1.partialPivLu().solve(plain);
    Eigen::MatrixXd out = hollow(symmetric_part(est)).cwiseMax(0.0);
    return out;
  }
  const Eigen::MatrixXd y = d12.squared_values();
  const Eigen::MatrixXd d1_sq = d1.array().square().matrix();
  // The squared EDM factors through [C1', psi1, 1]. Below rank 5 (landmarks on
  // one sphere, or fewer than 5) the target block is not determined.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d1_sq);
  const auto& sv = svd.singularValues();
  if (sv.size() < 5 || !(sv(4) > 1e-9 * sv(0))) {
    fail(ErrorCode::kRankDeficiency,
         "squared intra-distances of body 1 have rank < 5 (landmarks on a common sphere?)");
  }
  const Eigen::MatrixXd est = y.transpose() * detail::pinv(d1_sq) * y;
  return clamped_sqrt(hollow(symmetric_part(est)));
}

FullEdm assemble_full_edm(const Eigen::MatrixXd& d1, const CrossDistanceMatrix& d12_measured,
                          const Eigen::MatrixXd& d2_hat) {
  const auto n1 = static_cast<Eigen::Index>(d12_measured.n1());
  const auto n2 = static_cast<Eigen::Index>(d12_measured.n2());
  require(d1.rows() == n1 && d1.cols() == n1, "d1 shape does not match d12");
  require(d2_hat.rows() == n2 && d2_hat.cols() == n2, "d2 shape does not match d12");
  const Eigen::MatrixXd d12 =
      d12_measured.squared() ? clamped_sqrt(d12_measured.values()) : d12_measured.values();
  Eigen::MatrixXd d(n1 + n2, n1 + n2);
  d.topLeftCorner(n1, n1) = d1;
  d.topRightCorner(n1, n2) = d12;
  d.bottomLeftCorner(n2, n1) = d12.transpose();
  d.bottomRightCorner(n2, n2) = hollow(symmetric_part(d2_hat));
  return FullEdm(std::move(d), static_cast<std::size_t>(n1));
}

RankCompletionResult rank_r_complete(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& mask,
                                     int r, const RankCompletionOptions& opts) {
  require(r >= 1, "completion rank must be >= 1");
  require(observed.rows() == mask.rows() && observed.cols() == mask.cols(),
          "mask shape does not match the observed matrix");
  require(observed.allFinite(), "observed matrix has non-finite entries");
  const Eigen::Index rows = observed.rows();
  const Eigen::Index cols = observed.cols();
  const Eigen::Index rank = r;
  require(rank <= std::min(rows, cols), "completion rank exceeds matrix size");

  const Eigen::MatrixXd w = (mask.array() != 0.0).cast<double>();
  const double n_obs = w.sum();
  if (n_obs < static_cast<double>(rank * (rows + cols - rank))) {
    fail(ErrorCode::kUnderdetermined, "too few observed entries for the requested rank");
  }
  const Eigen::MatrixXd x = observed.cwiseProduct(w);
  RankCompletionResult result;
  const double x_norm = x.norm();
  if (n_obs == static_cast<double>(rows * cols) || x_norm == 0.0) {
    result.matrix = x;
    result.converged = true;
    return result;
  }

  const double p = n_obs / static_cast<double>(rows * cols);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x / p, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd root = svd.singularValues().head(rank).cwiseSqrt();
  Eigen::MatrixXd left = svd.matrixU().leftCols(rank) * root.asDiagonal();
  Eigen::MatrixXd right = svd.matrixV().leftCols(rank) * root.asDiagonal();

  std::vector<std::vector<Eigen::Index>> row_obs(static_cast<std::size_t>(rows));
  std::vector<std::vector<Eigen::Index>> col_obs(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (w(i, j) != 0.0) {
        row_obs[static_cast<std::size_t>(i)].push_back(j);
        col_obs[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }

  auto residual = [&] {
    return ((left * right.transpose() - x).cwiseProduct(w)).norm() / x_norm;
  };

  double res = residual();
  double prev = res;
  int it = 0;
  while (it < opts.max_iters && res > opts.tol) {
    ++it;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& idx = row_obs[static_cast<std::size_t>(i)];
      if (idx.empty()) continue;
      Eigen::MatrixXd a(static_cast<Eigen::Index>(idx.size()), rank);
      Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) {
        a.row(static_cast<Eigen::Index>(k)) = right.row(idx[k]);
        b(static_cast<Eigen::Index>(k)) = x(i, idx[k]);
      }
      left.row(i) = solve_ls(a, b, opts.ridge).transpose();
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& idx = col_obs[static_cast<std::size_t>(j)];
      if (idx.empty()) continue;
      Eigen::MatrixXd a(static_cast<Eigen::Index>(idx.size()), rank);
      Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) {
        a.row(static_cast<Eigen::Index>(k)) = left.row(idx[k]);
        b(static_cast<Eigen::Index>(k)) = x(idx[k], j);
      }
      right.row(j) = solve_ls(a, b, opts.ridge).transpose();
    }
    res = residual();
    if (prev - res <= 1e-14 * prev) break;  // stagnated
    prev = res;
  }
  result.matrix = left * right.transpose();
  result.iterations = it;
  result.residual = res;
  result.converged = res <= opts.tol;
  return result;
}

CrossDistanceMatrix complete_cross_block(const CrossDistanceMatrix& d12_observed,
                                         const ConnectivityMask& w,
                                         const CompletionOptions& opts) {
  require(d12_observed.n1() == w.n1() && d12_observed.n2() == w.n2(),
          "mask shape does not match measurements");
  if (w.full()) return d12_observed;
  const Eigen::MatrixXd y = d12_observed.squared_values();
  const auto fit = rank_r_complete(y, w.values(), opts.rank, opts.solver);
  const Eigen::MatrixXd& mw = w.values();
  const Eigen::MatrixXd merged =
      y.cwiseProduct(mw) + fit.matrix.cwiseProduct((1.0 - mw.array()).matrix());
  if (d12_observed.squared()) return CrossDistanceMatrix(merged.cwiseMax(0.0), Domain::kSquared);
  Eigen::MatrixXd plain = clamped_sqrt(merged);
  // Keep measured plain values bit-identical.
  for (Eigen::Index j = 0; j < plain.cols(); ++j) {
    for (Eigen::Index i = 0; i < plain.rows(); ++i) {
      if (mw(i, j) != 0.0) plain(i, j) = d12_observed.values()(i, j);
    }
  }
  return CrossDistanceMatrix(std::move(plain));
}

CrossDistanceMatrix complete_cross_block_anchored(const Conformation& c1,
                                                  const CrossDistanceMatrix& d12_observed,
                                                  const ConnectivityMask& w) {
  require(d12_observed.n1() == c1.size(), "conformation size does not match d12 rows");
  require(d12_observed.n1() == w.n1() && d12_observed.n2() == w.n2(),
          "mask shape does not match measurements");
  if (w.full()) return d12_observed;
  const Eigen::MatrixXd y = d12_observed.squared_values();
  const Eigen::VectorXd psi1 = squared_norms(c1.points());
  const Eigen::Index n1 = y.rows();
  // Row i of the design is [c1_i', 1]; the unknown per column is [-2 s2_j; |s2_j|^2].
  Eigen::MatrixXd design(n1, 4);
  design.leftCols(3) = c1.points().transpose();
  design.col(3).setOnes();

  Eigen::MatrixXd filled = y;
  const Eigen::MatrixXd& mw = w.values();
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const auto rows = observed_rows(mw, j);
    if (rows.size() == static_cast<std::size_t>(n1)) continue;
    const auto k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd a(k, 4);
    Eigen::VectorXd b(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      a.row(r) = design.row(rows[static_cast<std::size_t>(r)]);
      b(r) = y(rows[static_cast<std::size_t>(r)], j) - psi1(rows[static_cast<std::size_t>(r)]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4) {
      fail(ErrorCode::kUnderdetermined, "a cross-distance column has too few usable observations");
    }
    const Eigen::Vector4d u = qr.solve(b);
    for (Eigen::Index i = 0; i < n1; ++i) {
      if (mw(i, j) == 0.0) filled(i, j) = psi1(i) + design.row(i).dot(u);
    }
  }
  if (d12_observed.squared()) return CrossDistanceMatrix(filled.cwiseMax(0.0), Domain::kSquared);
  Eigen::MatrixXd plain = d12_observed.values();
  for (Eigen::Index j = 0; j < plain.cols(); ++j) {
    for (Eigen::Index i = 0; i < plain.rows(); ++i) {
      if (mw(i, j) == 0.0) plain(i, j) = std::sqrt(std::max(0.0, filled(i, j)));
    }
  }
  return CrossDistanceMatrix(std::move(plain));
}

}  // namespace rblkit
