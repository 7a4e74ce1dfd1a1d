#include "rblkit/harness.hpp"

#include "rblkit/error.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace rblkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Method genie_counterpart(Method m) {
  switch (m) {
    case Method::kEgoMds: return Method::kGenieMds;
    case Method::kEgoRobust: return Method::kGenieRobust;
    default: return m;
  }
}

std::vector<Method> effective_methods(const ExperimentConfig& cfg) {
  std::vector<Method> out;
  auto add = [&](Method m) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  };
  for (Method m : cfg.methods) {
    add(m);
    if (cfg.include_genie) add(genie_counterpart(m));
  }
  return out;
}

void check_config(const ExperimentConfig& cfg) {
  validate(cfg.scenario);
  require(cfg.trials >= 1, "trials must be >= 1");
  require(!cfg.methods.empty(), "method list is empty");
  require(!cfg.sigma_grid.empty(), "sigma grid is empty");
  require(!cfg.completeness_grid.empty(), "completeness grid is empty");
  for (double s : cfg.sigma_grid) require(std::isfinite(s) && s >= 0.0, "sigma must be >= 0");
  const std::size_t lim = std::min(cfg.scenario.c1.size(), cfg.scenario.c2.size());
  for (std::size_t m : cfg.completeness_grid) require(m <= lim, "M exceeds min(N1, N2)");
  require(std::abs(cfg.v_p.norm() - 1.0) <= 1e-12, "v_p must be a unit vector");
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kEgoMds: return "ego-mds";
    case Method::kEgoRobust: return "ego-robust";
    case Method::kGenieMds: return "genie-mds";
    case Method::kGenieRobust: return "genie-robust";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view tag) {
  for (Method m : {Method::kEgoMds, Method::kEgoRobust, Method::kGenieMds, Method::kGenieRobust}) {
    if (tag == to_string(m)) return m;
  }
  return std::nullopt;
}

bool is_genie(Method m) { return m == Method::kGenieMds || m == Method::kGenieRobust; }

Scenario paper_table1(bool recenter) {
  Eigen::Matrix3Xd c1(3, 12);
  c1 << -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25,  //
      -4, -4, -4, -4, 0, 0, 0, 0, 4, 4, 4, 4,                                          //
      0.5, 0.5, 1, 1, 1, 1, 4, 4, 4, 4, 0.5, 0.5;
  Eigen::Matrix3Xd c2(3, 10);
  c2 << -1, 1, -1, 1, -1, 1, -1, 1, -1, 1,  //
      2, 2, 1, 1, -1, -1, -2, -2, 0, 0,     //
      1, 1, 1.5, 1.5, 1.5, 1.5, 1, 1, 0.5, 0.5;
  Pose pose;
  pose.rotation = rotation_from_euler(EulerAngles::from_degrees(10.0, 20.0, 45.0));
  pose.translation = Eigen::Vector3d(7.0, 3.0, 0.5);
  Conformation b1(c1);
  Conformation b2(c2);
  if (recenter) {
    b1 = rblkit::recenter(b1);
    b2 = rblkit::recenter(b2);
  }
  return {std::move(b1), std::move(b2), pose, recenter ? "paper-table1 (recentred)" : "paper-table1"};
}

void validate(const Scenario& s) {
  require(s.c1.size() >= s.c2.size(), "scenario needs N1 >= N2");
  require(s.pose2.translation.allFinite(), "scenario translation must be finite");
}

PoseEstimate run_egoistic(Method method, const EgoisticInputs& in, const TranslationOptions& opts) {
  require(!is_genie(method), "run_egoistic called with a genie method");
  PoseEstimate out;
  if (method == Method::kEgoMds) {
    out.translation = estimate_translation_mds(in.c1, in.d12, in.w, opts);
  } else {
    const double eps = noise_epsilon(in.d12, in.w, in.sigma);
    out.translation = estimate_translation_robust(in.c1, in.d12, in.w, eps, opts);
  }
  const CrossDistanceMatrix masked = apply_mask(in.d12, in.w);
  const TargetEmbedding emb = embed_target(in.c1, masked, opts.embedding);
  out.rotation = estimate_rotation_ego(in.c1, masked, in.w, emb.estimate.s2_aligned);
  return out;
}

PoseEstimate run_genie(Method method, const EgoisticInputs& in, const GenieInputs& genie,
                       const TranslationOptions& opts) {
  require(is_genie(method), "run_genie called with an egoistic method");
  PoseEstimate out;
  out.rotation = estimate_rotation_opp(in.c1, genie.c2, in.d12, in.w);
  const GenieKnowledge know{genie.c2, out.rotation.q_hat};
  if (method == Method::kGenieMds) {
    out.translation = estimate_translation_mds_genie(in.c1, in.d12, in.w, know, opts);
  } else {
    const double eps = noise_epsilon(in.d12, in.w, in.sigma);
    out.translation = estimate_translation_robust_genie(in.c1, in.d12, in.w, eps, know, opts);
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial_index, double sigma,
                         std::size_t m) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(trial_index));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(sigma + 0.0));
  h = splitmix64(h ^ static_cast<std::uint64_t>(m));
  return h;
}

CrossDistanceMatrix simulate_ranges(const Scenario& s, double sigma, std::uint64_t seed) {
  const SensorMatrix s2 = apply_pose(s.c2, s.pose2);
  return add_range_noise(cross_edm(s.c1.points(), s2), NoiseModel{sigma, seed});
}

ConnectivityMask trial_mask(const ExperimentConfig& cfg, std::size_t m, std::uint64_t seed) {
  const std::size_t n1 = cfg.scenario.c1.size();
  const std::size_t n2 = cfg.scenario.c2.size();
  const ConnectivityMask block = connectivity_mask(n1, n2, m);
  if (!cfg.random_mask) return block;
  return random_mask(n1, n2, completeness_fraction(block), splitmix64(seed ^ 0x6d61736bULL));
}

TrialResult run_trial(const ExperimentConfig& cfg, double sigma, std::size_t m, Method method,
                      std::size_t trial_index) {
  const auto start = std::chrono::steady_clock::now();
  TrialResult r;
  r.method = method;
  r.sigma = sigma;
  r.m = m;
  r.trial_index = trial_index;
  r.seed = trial_seed(cfg.base_seed, trial_index, sigma, m);
  try {
    const Scenario& sc = cfg.scenario;
    const ConnectivityMask w = trial_mask(cfg, m, r.seed);
    r.completeness = completeness_fraction(w);
    CrossDistanceMatrix d12 = apply_mask(simulate_ranges(sc, sigma, r.seed), w);
    ConnectivityMask used = w;
    if (cfg.completion_enabled && !w.full()) {
      CompletionOptions copts;
      copts.method = cfg.completion_method;
      d12 = cfg.completion_method == CompletionMethod::kAnchored
                ? complete_cross_block_anchored(sc.c1, d12, w)
                : complete_cross_block(d12, w, copts);
      used = ConnectivityMask::ones(w.n1(), w.n2());
    }
    const EgoisticInputs in{sc.c1, std::move(d12), std::move(used), sigma};
    const PoseEstimate est = is_genie(method)
                                 ? run_genie(method, in, GenieInputs{sc.c2}, cfg.translation)
                                 : run_egoistic(method, in, cfg.translation);
    r.t_hat = est.translation.t_hat;
    r.q_hat = est.rotation.q_hat;
    r.converged = est.translation.converged;
  } catch (const Error& e) {
    r.error = e.what();
    r.converged = false;
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double rmse_translation(const std::vector<Eigen::Vector3d>& estimates,
                        const Eigen::Vector3d& truth) {
  require(!estimates.empty(), "rmse_translation needs at least one estimate");
  double acc = 0.0;
  for (const auto& t : estimates) acc += (t - truth).squaredNorm();
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

Eigen::Vector3d pose_vector(const RotationMatrix& q, const Eigen::Vector3d& t,
                            const Eigen::Vector3d& v_p) {
  require(std::abs(v_p.norm() - 1.0) <= 1e-12, "v_p must be a unit vector");
  return q.matrix() * v_p + t;
}

double rmse_pose(const std::vector<std::pair<RotationMatrix, Eigen::Vector3d>>& estimates,
                 const Pose& truth, const Eigen::Vector3d& v_p) {
  require(!estimates.empty(), "rmse_pose needs at least one estimate");
  const Eigen::Vector3d v_true = pose_vector(truth.rotation, truth.translation, v_p);
  double acc = 0.0;
  for (const auto& [q, t] : estimates) acc += (pose_vector(q, t, v_p) - v_true).squaredNorm();
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

ResultTable run_sweep(const ExperimentConfig& cfg) { return run_sweep(cfg, nullptr); }

ResultTable run_sweep(const ExperimentConfig& cfg, std::vector<TrialResult>* trials) {
  check_config(cfg);
  struct Cell {
    Method method;
    double sigma;
    std::size_t m;
  };
  std::vector<Cell> cells;
  for (Method method : effective_methods(cfg)) {
    for (std::size_t m : cfg.completeness_grid) {
      for (double sigma : cfg.sigma_grid) cells.push_back({method, sigma, m});
    }
  }
  const std::size_t k = cfg.trials;
  std::vector<TrialResult> results(cells.size() * k);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < results.size(); i = next.fetch_add(1)) {
      const Cell& c = cells[i / k];
      results[i] = run_trial(cfg, c.sigma, c.m, c.method, i % k);
    }
  };
  std::size_t n_threads = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  n_threads = std::clamp<std::size_t>(n_threads, 1, std::max<std::size_t>(results.size(), 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  const Pose& truth = cfg.scenario.pose2;
  ResultTable table;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    std::vector<Eigen::Vector3d> ts;
    std::vector<std::pair<RotationMatrix, Eigen::Vector3d>> poses;
    ResultRow row;
    row.method = cells[ci].method;
    row.sigma = cells[ci].sigma;
    row.m = cells[ci].m;
    row.trials = k;
    row.seed = cfg.base_seed;
    for (std::size_t j = 0; j < k; ++j) {
      const TrialResult& r = results[ci * k + j];
      row.completeness = r.completeness;
      if (!r.error.empty() || !r.converged) ++row.failures;
      if (r.t_hat) {
        ts.push_back(*r.t_hat);
        if (r.q_hat) poses.emplace_back(*r.q_hat, *r.t_hat);
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.rmse_t = ts.empty() ? nan : rmse_translation(ts, truth.translation);
    row.rmse_pose = poses.empty() ? nan : rmse_pose(poses, truth, cfg.v_p);
    table.rows.push_back(row);
  }
  if (trials) *trials = std::move(results);
  return table;
}

std::string to_csv(const ResultTable& table) {
  std::string out(kCsvHeader);
  out += '\n';
  char buf[512];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6g,%.6f,%.9e,%.9e,%zu,%zu,%llu\n",
                  std::string(to_string(r.method)).c_str(), r.sigma, r.completeness, r.rmse_t,
                  r.rmse_pose, r.trials, r.failures, static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

}  // namespace rblkit
