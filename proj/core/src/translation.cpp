#include "rblkit/translation.hpp"

#include "minimize.hpp"
#include "rblkit/completion.hpp"
#include "rblkit/error.hpp"

#include <cmath>

namespace rblkit {

std::string_view to_string(TranslationMethod m) {
  switch (m) {
    case TranslationMethod::kMds: return "mds";
    case TranslationMethod::kRobust: return "robust";
    case TranslationMethod::kGenieMds: return "genie-mds";
    case TranslationMethod::kGenieRobust: return "genie-robust";
  }
  return "unknown";
}

ObjectiveValue mds_objective(const Eigen::Matrix3Xd& c1, const Eigen::Matrix3Xd& shape,
                             const Eigen::MatrixXd& half_sq, const Eigen::Vector3d& t) {
  const Eigen::Index n1 = c1.cols();
  const Eigen::Index n2 = shape.cols();
  Eigen::Matrix3Xd s(3, n1 + n2);
  s << c1, shape.colwise() + t;
  const Eigen::MatrixXd k = double_center(s.transpose() * s + half_sq);
  ObjectiveValue out;
  out.value = k.squaredNorm();
  // d/dt of ||K||^2 is 4 S K e with e selecting the target columns.
  out.gradient = 4.0 * s * k.rightCols(n2).rowwise().sum();
  return out;
}

namespace {

TranslationEstimate solve_mds(const Eigen::Matrix3Xd& c1, const Eigen::Matrix3Xd& shape,
                              const FullEdm& d_hat, const ConnectivityMask& w,
                              const Eigen::Vector3d& t0, TranslationMethod method,
                              const TranslationOptions& opts) {
  const Eigen::MatrixXd half_sq =
      0.5 * d_hat.values().array().square().matrix().cwiseProduct(
                erasure_matrix(w, opts.erasure_blocks).w_hat);
  auto fn = [&](const Eigen::Vector3d& t) {
    const ObjectiveValue v = mds_objective(c1, shape, half_sq, t);
    return std::pair<double, Eigen::Vector3d>(v.value, v.gradient);
  };
  const auto res = detail::minimize_bfgs(fn, t0, opts.tol, opts.max_iters);
  TranslationEstimate est;
  est.t_hat = res.x;
  est.method = method;
  est.iterations = res.iterations;
  est.objective = res.f;
  est.converged = res.converged;
  return est;
}

void check_inputs(const Conformation& c1, const CrossDistanceMatrix& d12,
                  const ConnectivityMask& w) {
  require(d12.n1() == c1.size(), "conformation size does not match d12 rows");
  require(d12.n1() == w.n1() && d12.n2() == w.n2(), "mask shape does not match measurements");
}

// Plain-distance measurements with erased entries zeroed.
CrossDistanceMatrix masked_plain(const CrossDistanceMatrix& d12, const ConnectivityMask& w) {
  const CrossDistanceMatrix plain =
      d12.squared() ? CrossDistanceMatrix(d12.values().cwiseMax(0.0).cwiseSqrt()) : d12;
  return apply_mask(plain, w);
}

struct GenieFrame {
  FullEdm d_hat;
  Eigen::Matrix3Xd shape;
  Eigen::Vector3d t0;
};

GenieFrame genie_frame(const Conformation& c1, const CrossDistanceMatrix& d12,
                       const GenieKnowledge& genie) {
  const Eigen::MatrixXd d1 = full_edm(c1.points(), c1.size()).values();
  const Eigen::MatrixXd d2 = full_edm(genie.c2.points(), genie.c2.size()).values();
  FullEdm d_hat = assemble_full_edm(d1, d12, d2);
  const EmbeddingEstimate emb = align_target(classical_mds(d_hat, 3), c1);
  Eigen::Matrix3Xd shape = genie.q_hat.matrix() * genie.c2.points();
  const Eigen::Vector3d t0 =
      geometric_center(emb.s2_aligned) - genie.q_hat.matrix() * geometric_center(genie.c2.points());
  return {std::move(d_hat), std::move(shape), t0};
}

TranslationEstimate solve_robust(const Conformation& c1, const Eigen::Matrix3Xd& shape,
                                 const RobustCoefficients& coef, const CrossDistanceMatrix& d12,
                                 const ConnectivityMask& w, double epsilon,
                                 const Eigen::Vector3d& t0, TranslationMethod method,
                                 const TranslationOptions& opts) {
  require(epsilon >= 0.0, "epsilon must be >= 0");
  const Eigen::MatrixXd y = d12.squared_values().cwiseProduct(w.values());
  const Eigen::MatrixXd& wv = w.values();
  const double slack = 1e-14 * (1.0 + y.squaredNorm());
  auto feasible = [&](const Eigen::Vector3d& t) {
    return robust_constraint(c1.points(), shape, y, wv, t).value <= epsilon + slack;
  };

  Eigen::Vector3d t = t0;
  int total = 0;
  double mu = opts.penalty_initial;
  for (int stage = 0; stage <= opts.penalty_escalations; ++stage) {
    auto fn = [&](const Eigen::Vector3d& x) {
      const double lin = coef.a.dot(x) + coef.b;
      double value = std::abs(lin);
      Eigen::Vector3d grad = (lin > 0.0 ? 1.0 : (lin < 0.0 ? -1.0 : 0.0)) * coef.a.transpose();
      const ObjectiveValue g = robust_constraint(c1.points(), shape, y, wv, x);
      if (g.value > epsilon) {
        value += mu * (g.value - epsilon);
        grad += mu * g.gradient;
      }
      return std::pair<double, Eigen::Vector3d>(value, grad);
    };
    const auto res = detail::minimize_bfgs(fn, t, opts.tol, opts.max_iters);
    const bool moved = (res.x - t).norm() > 1e-12 * (1.0 + t.norm());
    t = res.x;
    total += res.iterations;
    if (feasible(t)) break;
    // A stage that leaves t in place sits at the constraint's own minimiser;
    // heavier penalties cannot reach feasibility from there.
    if (stage > 0 && !moved) break;
    mu *= opts.penalty_growth;
  }
  TranslationEstimate est;
  est.t_hat = t;
  est.method = method;
  est.iterations = total;
  est.objective = std::abs(coef.a.dot(t) + coef.b);
  est.converged = feasible(t) && t.allFinite();
  return est;
}

}  // namespace

TranslationEstimate estimate_translation_mds(const Conformation& c1,
                                             const CrossDistanceMatrix& d12_measured,
                                             const ConnectivityMask& w,
                                             const TranslationOptions& opts) {
  check_inputs(c1, d12_measured, w);
  const CrossDistanceMatrix d12 = masked_plain(d12_measured, w);
  const TargetEmbedding emb = embed_target(c1, d12, opts.embedding);
  const Eigen::Matrix3Xd& s2 = emb.estimate.s2_aligned;
  return solve_mds(c1.points(), centered(s2), emb.d_hat, w, geometric_center(s2),
                   TranslationMethod::kMds, opts);
}

TranslationEstimate estimate_translation_mds_genie(const Conformation& c1,
                                                   const CrossDistanceMatrix& d12_measured,
                                                   const ConnectivityMask& w,
                                                   const GenieKnowledge& genie,
                                                   const TranslationOptions& opts) {
  check_inputs(c1, d12_measured, w);
  require(d12_measured.n2() == genie.c2.size(), "genie conformation does not match d12 columns");
  const GenieFrame g = genie_frame(c1, masked_plain(d12_measured, w), genie);
  return solve_mds(c1.points(), g.shape, g.d_hat, w, g.t0, TranslationMethod::kGenieMds, opts);
}

RobustCoefficients robust_coefficients(const Conformation& c1, const Eigen::Matrix3Xd& s2_aligned,
                                       const CrossDistanceMatrix& d12_measured) {
  const auto n1 = static_cast<double>(c1.size());
  const auto n2 = static_cast<double>(s2_aligned.cols());
  require(d12_measured.n1() == c1.size() &&
              d12_measured.n2() == static_cast<std::size_t>(s2_aligned.cols()),
          "robust_coefficients: shapes disagree");
  RobustCoefficients out;
  out.a = (2.0 / n1) * c1.points().rowwise().sum().transpose();
  const double cross =
      (c1.points().rowwise().sum()).dot(centered(s2_aligned).rowwise().sum());
  out.b = -squared_norms(c1.points()).mean() - squared_norms(s2_aligned).mean() +
          d12_measured.squared_values().sum() / (n1 * n2) + 2.0 / (n1 * n2) * cross;
  return out;
}

ObjectiveValue robust_constraint(const Eigen::Matrix3Xd& c1, const Eigen::Matrix3Xd& shape,
                                 const Eigen::MatrixXd& y, const Eigen::MatrixXd& w,
                                 const Eigen::Vector3d& t) {
  ObjectiveValue out;
  for (Eigen::Index j = 0; j < shape.cols(); ++j) {
    const Eigen::Vector3d s = shape.col(j) + t;
    for (Eigen::Index i = 0; i < c1.cols(); ++i) {
      if (w(i, j) == 0.0) continue;
      const Eigen::Vector3d diff = s - c1.col(i);
      const double r = diff.squaredNorm() - y(i, j);
      out.value += r * r;
      out.gradient += 4.0 * r * diff;
    }
  }
  return out;
}

double noise_epsilon(const CrossDistanceMatrix& d12_measured, const ConnectivityMask& w,
                     double sigma) {
  require(sigma >= 0.0, "sigma must be >= 0");
  const double nnz = static_cast<double>(w.observed());
  if (nnz == 0.0) return 0.0;
  const Eigen::MatrixXd plain =
      d12_measured.squared() ? Eigen::MatrixXd(d12_measured.values().cwiseSqrt())
                             : d12_measured.values();
  const double dbar = plain.cwiseProduct(w.values()).sum() / nnz;
  const double s2 = sigma * sigma;
  return nnz * (4.0 * dbar * dbar * s2 + 2.0 * s2 * s2);
}

TranslationEstimate estimate_translation_robust(const Conformation& c1,
                                                const CrossDistanceMatrix& d12_measured,
                                                const ConnectivityMask& w, double epsilon,
                                                const TranslationOptions& opts) {
  check_inputs(c1, d12_measured, w);
  const CrossDistanceMatrix d12 = masked_plain(d12_measured, w);
  const TargetEmbedding emb = embed_target(c1, d12, opts.embedding);
  const Eigen::Matrix3Xd& s2 = emb.estimate.s2_aligned;
  const RobustCoefficients coef = robust_coefficients(c1, s2, d12);
  return solve_robust(c1, centered(s2), coef, d12, w, epsilon, geometric_center(s2),
                      TranslationMethod::kRobust, opts);
}

TranslationEstimate estimate_translation_robust_genie(const Conformation& c1,
                                                      const CrossDistanceMatrix& d12_measured,
                                                      const ConnectivityMask& w, double epsilon,
                                                      const GenieKnowledge& genie,
                                                      const TranslationOptions& opts) {
  check_inputs(c1, d12_measured, w);
  require(d12_measured.n2() == genie.c2.size(), "genie conformation does not match d12 columns");
  const CrossDistanceMatrix d12 = masked_plain(d12_measured, w);
  const GenieFrame g = genie_frame(c1, d12, genie);
  const Eigen::Matrix3Xd s2_ref = g.shape.colwise() + g.t0;
  const RobustCoefficients coef = robust_coefficients(c1, s2_ref, d12);
  return solve_robust(c1, g.shape, coef, d12, w, epsilon, g.t0, TranslationMethod::kGenieRobust,
                      opts);
}

double corrected_distance_estimator(const Conformation& c1, const Conformation& c2,
                                    const Pose& pose1, const Pose& pose2,
                                    const CrossDistanceMatrix& d12, bool include_correction) {
  require(c1.size() == c2.size(), "the distance estimator needs equally sized bodies");
  require(d12.n1() == c1.size() && d12.n2() == c2.size(), "d12 shape does not match the bodies");
  const auto n = static_cast<double>(c1.size());
  const Eigen::Matrix3d& q1 = pose1.rotation.matrix();
  const Eigen::Matrix3d& q2 = pose2.rotation.matrix();
  const Eigen::Vector3d& t1 = pose1.translation;
  const Eigen::Vector3d& t2 = pose2.translation;
  const Eigen::Vector3d sum1 = c1.points().rowwise().sum();
  const Eigen::Vector3d sum2 = c2.points().rowwise().sum();

  double est = d12.squared_values().sum() / (n * n) -
               (squared_norms(c1.points()).sum() + squared_norms(c2.points()).sum()) / n;
  if (include_correction) {
    const double bracket = (q1 * sum1).dot(q2 * sum2) + n * (q1 * sum1).dot(t2) +
                           n * t1.dot(q2 * sum2);
    const double pose_terms = 2.0 * (q1 * sum1).dot(t1) + 2.0 * (q2 * sum2).dot(t2);
    est += 2.0 / (n * n) * bracket - pose_terms / n;
  }
  return est;
}

}  // namespace rblkit
