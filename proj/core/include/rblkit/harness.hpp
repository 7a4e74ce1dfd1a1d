#pragma once

#include "rblkit/body.hpp"
#include "rblkit/completion.hpp"
#include "rblkit/measurement.hpp"
#include "rblkit/rotation.hpp"
#include "rblkit/translation.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rblkit {

enum class Method { kEgoMds, kEgoRobust, kGenieMds, kGenieRobust };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view tag);
bool is_genie(Method m);

struct Scenario {
  Conformation c1;
  Conformation c2;  ///< simulator-only; never reaches an egoistic estimator
  Pose pose2;
  std::string label;
};

/// The two-body scenario of the reference simulation table: 12 and 10
/// landmarks, angles (10, 20, 45) degrees, t = [7, 3, 0.5].
Scenario paper_table1(bool recenter = false);

/// Throws kInvalidArgument unless N1 >= N2.
void validate(const Scenario& s);

struct ExperimentConfig {
  Scenario scenario;
  std::vector<double> sigma_grid;
  std::vector<std::size_t> completeness_grid;  ///< visible-link counts M
  std::vector<Method> methods;
  std::size_t trials = 1000;
  std::uint64_t base_seed = 0;
  bool completion_enabled = false;
  CompletionMethod completion_method = CompletionMethod::kAnchored;
  bool include_genie = false;  ///< add the genie counterpart of every egoistic method
  bool random_mask = false;    ///< uniform mask with the block pattern's completeness
  Eigen::Vector3d v_p = Eigen::Vector3d::UnitX();
  TranslationOptions translation;
  std::size_t threads = 1;  ///< 0 selects the hardware concurrency
};

/// What an egoistic estimator may see. Holds no target-body information.
struct EgoisticInputs {
  const Conformation& c1;
  CrossDistanceMatrix d12;
  ConnectivityMask w;
  double sigma = 0.0;  ///< configured noise level for the robust constraint
};

/// Target knowledge handed to genie-aided estimators only.
struct GenieInputs {
  const Conformation& c2;
};

struct PoseEstimate {
  TranslationEstimate translation;
  RotationEstimate rotation;
};

PoseEstimate run_egoistic(Method method, const EgoisticInputs& in, const TranslationOptions& opts);

PoseEstimate run_genie(Method method, const EgoisticInputs& in, const GenieInputs& genie,
                       const TranslationOptions& opts);

struct TrialResult {
  Method method = Method::kEgoMds;
  double sigma = 0.0;
  std::size_t m = 0;
  double completeness = 1.0;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  std::optional<Eigen::Vector3d> t_hat;
  std::optional<RotationMatrix> q_hat;
  bool converged = false;
  std::string error;  ///< empty unless the estimator threw
  double wall_time = 0.0;  ///< seconds
};

/// Seed of one trial. Independent of the method so methods see identical noise.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial_index, double sigma,
                         std::size_t m);

/// Simulated cross ranges of one trial before masking.
CrossDistanceMatrix simulate_ranges(const Scenario& s, double sigma, std::uint64_t seed);

ConnectivityMask trial_mask(const ExperimentConfig& cfg, std::size_t m, std::uint64_t seed);

TrialResult run_trial(const ExperimentConfig& cfg, double sigma, std::size_t m, Method method,
                      std::size_t trial_index);

double rmse_translation(const std::vector<Eigen::Vector3d>& estimates,
                        const Eigen::Vector3d& truth);

Eigen::Vector3d pose_vector(const RotationMatrix& q, const Eigen::Vector3d& t,
                            const Eigen::Vector3d& v_p);

double rmse_pose(const std::vector<std::pair<RotationMatrix, Eigen::Vector3d>>& estimates,
                 const Pose& truth, const Eigen::Vector3d& v_p);

struct ResultRow {
  Method method = Method::kEgoMds;
  double sigma = 0.0;
  std::size_t m = 0;
  double completeness = 1.0;
  double rmse_t = 0.0;
  double rmse_pose = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::uint64_t seed = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

/// Every (method, sigma, M) cell with cfg.trials trials. Output is independent
/// of thread count and scheduling.
ResultTable run_sweep(const ExperimentConfig& cfg);

/// Runs the cells and also returns the raw trials, ordered by cell then index.
ResultTable run_sweep(const ExperimentConfig& cfg, std::vector<TrialResult>* trials);

inline constexpr std::string_view kCsvHeader =
    "method,sigma,completeness,rmse_t,rmse_pose,trials,failures,seed";

std::string to_csv(const ResultTable& table);

}  // namespace rblkit
