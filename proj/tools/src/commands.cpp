#include "commands.hpp"

#include "config.hpp"
#include "files.hpp"
#include "plot.hpp"
#include "rblkit/rblkit.hpp"
#include "rblkit/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>

namespace rblkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SharedFlags {
  std::string seed;
  std::string trials;
  std::string methods;
  std::string completeness;
  std::string sigma_grid;
  std::string completion;
  std::string recenter;
  std::string genie;
};

void add_shared_flags(CLI::App* sub, SharedFlags& f) {
  sub->add_option("--seed", f.seed, "Base seed");
  sub->add_option("--trials", f.trials, "Monte Carlo trials per cell");
  sub->add_option("--methods", f.methods, "Comma separated method tags");
  sub->add_option("--completeness", f.completeness, "Comma separated visible-link counts M");
  sub->add_option("--sigma-grid", f.sigma_grid, "Comma separated noise levels");
  sub->add_option("--completion", f.completion, "on|off");
  sub->add_option("--recenter", f.recenter, "on|off");
  sub->add_option("--genie", f.genie, "on|off");
}

std::uint64_t parse_count(const std::string& text, const std::string& flag) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InputError(flag + ": '" + text + "' is not a non-negative integer");
  return v;
}

Overrides to_overrides(const SharedFlags& f) {
  Overrides ov;
  if (!f.seed.empty()) ov.seed = parse_count(f.seed, "--seed");
  if (!f.trials.empty()) ov.trials = static_cast<std::size_t>(parse_count(f.trials, "--trials"));
  if (!f.methods.empty()) ov.methods = f.methods;
  if (!f.completeness.empty()) ov.completeness = f.completeness;
  if (!f.sigma_grid.empty()) ov.sigma_grid = f.sigma_grid;
  if (!f.completion.empty()) ov.completion = parse_switch(f.completion, "--completion");
  if (!f.recenter.empty()) ov.recenter = parse_switch(f.recenter, "--recenter");
  if (!f.genie.empty()) ov.genie = parse_switch(f.genie, "--genie");
  return ov;
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t threads_from_env() {
  const char* raw = std::getenv("RBLKIT_THREADS");
  if (!raw || !*raw) return 0;
  const std::string text(raw);
  const auto v = parse_count(text, "RBLKIT_THREADS");
  if (v == 0) throw InputError("RBLKIT_THREADS: must be >= 1");
  return static_cast<std::size_t>(v);
}

ExperimentConfig load_experiment(const std::string& path, const SharedFlags& flags) {
  const std::string text = read_file(path);
  return build_experiment(parse_config_text(text), to_overrides(flags));
}

int cmd_simulate(const std::string& config, const std::string& out_dir, const SharedFlags& flags,
                 std::ostream& out) {
  const ExperimentConfig cfg = load_experiment(config, flags);
  const Scenario& sc = cfg.scenario;
  make_dir(out_dir);

  const SensorMatrix s = stack_scenario(sc.c1, sc.c2, sc.pose2);
  const FullEdm edm = full_edm(s, sc.c1.size());
  const ConnectivityMask full = ConnectivityMask::ones(sc.c1.size(), sc.c2.size());

  Eigen::MatrixXd pose(4, 3);
  pose.topRows(3) = sc.pose2.rotation.matrix();
  pose.row(3) = sc.pose2.translation.transpose();

  write_file(join(out_dir, "c1.txt"), format_matrix(sc.c1.points()));
  write_file(join(out_dir, "c2.txt"), format_matrix(sc.c2.points()));
  write_file(join(out_dir, "pose.txt"), format_matrix(pose));
  write_file(join(out_dir, "sensors.txt"), format_matrix(s));
  write_file(join(out_dir, "edm.txt"), format_matrix(edm.values()));
  write_file(join(out_dir, "measurements.txt"),
             format_measurements(cross_edm(s.leftCols(sc.c1.size()), s.rightCols(sc.c2.size())), full));

  std::size_t files = 6;
  for (const std::size_t m : cfg.completeness_grid) {
    const std::uint64_t mask_seed = trial_seed(cfg.base_seed, 0, 0.0, m);
    const ConnectivityMask w = trial_mask(cfg, m, mask_seed);
    write_file(join(out_dir, "mask_m" + std::to_string(m) + ".txt"), format_matrix(w.values()));
    ++files;
    for (const double sigma : cfg.sigma_grid) {
      const std::uint64_t seed = trial_seed(cfg.base_seed, 0, sigma, m);
      const ConnectivityMask wt = trial_mask(cfg, m, seed);
      const CrossDistanceMatrix d12 = apply_mask(simulate_ranges(sc, sigma, seed), wt);
      write_file(join(out_dir, "measurements_sigma" + short_num(sigma) + "_m" + std::to_string(m) + ".txt"),
                 format_measurements(d12, wt));
      ++files;
    }
  }
  out << "wrote " << files << " files to " << out_dir << "\n";
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& out_dir, const SharedFlags& flags,
              std::ostream& out) {
  const std::string bytes = read_file(config);
  ExperimentConfig cfg = build_experiment(parse_config_text(bytes), to_overrides(flags));
  cfg.threads = threads_from_env();
  make_dir(out_dir);

  const ResultTable table = run_sweep(cfg);
  const std::string csv_path = join(out_dir, "results.csv");
  write_file(csv_path, to_csv(table));

  const json manifest = {
      {"config_path", config},
      {"output_dir", out_dir},
      {"tool_version", std::string(kVersion)},
      {"config_digest", "sha256:" + sha256_hex(bytes)},
      {"timestamp", utc_timestamp()},
  };
  write_file(join(out_dir, "manifest.json"), manifest.dump(2) + "\n");

  std::size_t failures = 0;
  for (const auto& r : table.rows) failures += r.failures;
  out << "wrote " << table.rows.size() << " rows to " << csv_path << " (" << failures
      << " failed trials)\n";
  return 0;
}

struct EstimateArgs {
  std::string measurements;
  std::string conformation;
  std::string target;
  std::string method = "ego-mds";
  double sigma = 0.0;
  std::string completion = "off";
};

Conformation load_conformation(const std::string& path, const std::string& what) {
  const Eigen::Matrix3Xd c = parse_conformation(read_file(path), what);
  try {
    return Conformation(c);
  } catch (const Error& e) {
    throw InputError(what + ": " + e.what());
  }
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  MeasurementFile mf = parse_measurements(read_file(a.measurements));
  const Conformation c1 = load_conformation(a.conformation, "conformation file");
  if (c1.size() != mf.d12.n1()) {
    throw InputError("dimension mismatch: conformation has " + std::to_string(c1.size()) +
                     " landmarks, measurement file has n1 = " + std::to_string(mf.d12.n1()));
  }
  std::optional<Conformation> c2;
  if (!a.target.empty()) {
    c2 = load_conformation(a.target, "target conformation file");
    if (c2->size() != mf.d12.n2()) {
      throw InputError("dimension mismatch: target conformation has " + std::to_string(c2->size()) +
                       " landmarks, measurement file has n2 = " + std::to_string(mf.d12.n2()));
    }
  }
  if (!(a.sigma >= 0.0)) throw InputError("--sigma must be >= 0");

  const bool opp = a.method == "opp";
  const auto method = opp ? std::optional<Method>(Method::kGenieMds) : parse_method(a.method);
  if (!method) throw InputError("unknown method '" + a.method + "'");
  if (is_genie(*method) && !c2) {
    throw InputError("method '" + a.method + "' needs --target-conformation");
  }

  CrossDistanceMatrix d12 = apply_mask(mf.d12, mf.w);
  ConnectivityMask w = mf.w;
  if (parse_switch(a.completion, "--completion") && !w.full()) {
    d12 = complete_cross_block_anchored(c1, d12, w);
    w = ConnectivityMask::ones(w.n1(), w.n2());
  }

  const EgoisticInputs in{c1, std::move(d12), std::move(w), a.sigma};
  const TranslationOptions topts;
  const PoseEstimate est = is_genie(*method) ? run_genie(*method, in, GenieInputs{*c2}, topts)
                                             : run_egoistic(*method, in, topts);

  const auto& t = est.translation.t_hat;
  const auto& q = est.rotation.q_hat.matrix();
  json rec = {
      {"method", opp ? std::string("opp") : std::string(to_string(*method))},
      {"translation_method", std::string(to_string(est.translation.method))},
      {"rotation_method", std::string(to_string(est.rotation.method))},
      {"t_hat", {t.x(), t.y(), t.z()}},
      {"q_hat", {q(0, 0), q(0, 1), q(0, 2), q(1, 0), q(1, 1), q(1, 2), q(2, 0), q(2, 1), q(2, 2)}},
      {"converged", est.translation.converged},
      {"iterations", est.translation.iterations},
      {"objective", est.translation.objective},
      {"rotation_ambiguous", est.rotation.ambiguous},
  };
  out << rec.dump() << "\n";
  return 0;
}

int cmd_plot(const std::string& csv, const std::string& out_path, bool log_y, const std::string& metric,
             std::ostream& out) {
  PlotOptions opts;
  opts.log_y = log_y;
  if (metric == "rmse_t") opts.metric = PlotMetric::kTranslation;
  else if (metric == "rmse_pose") opts.metric = PlotMetric::kPose;
  else throw InputError("--metric: expected rmse_t or rmse_pose");
  const auto rows = parse_results_csv(read_file(csv));
  write_file(out_path, render_svg(rows, opts));
  out << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xf];
  }
  return hex;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rigid body localization toolkit", "rblkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config, out_dir;
  SharedFlags sim_flags, sweep_flags;
  auto* simulate = app.add_subcommand("simulate", "Dump scenario artifacts");
  simulate->add_option("--config", config, "Config file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  add_shared_flags(simulate, sim_flags);

  auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep");
  sweep->add_option("--config", config, "Config file")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  add_shared_flags(sweep, sweep_flags);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate one pose from a measurement file");
  estimate->add_option("--measurements", est.measurements, "Measurement file")->required();
  estimate->add_option("--conformation", est.conformation, "Body 1 conformation file")->required();
  estimate->add_option("--target-conformation", est.target, "Body 2 conformation (genie methods)");
  estimate->add_option("--method", est.method, "ego-mds|ego-robust|genie-mds|genie-robust|opp");
  estimate->add_option("--sigma", est.sigma, "Noise level for the robust constraint");
  estimate->add_option("--completion", est.completion, "on|off");

  std::string csv, svg, metric = "rmse_t";
  bool log_y = false;
  auto* plot = app.add_subcommand("plot", "Render a sweep CSV as SVG");
  plot->add_option("--csv", csv, "Sweep CSV")->required();
  plot->add_option("--out", svg, "Output SVG")->required();
  plot->add_flag("--log-y", log_y, "Logarithmic y axis");
  plot->add_option("--metric", metric, "rmse_t|rmse_pose");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(config, out_dir, sim_flags, out);
    if (*sweep) return cmd_sweep(config, out_dir, sweep_flags, out);
    if (*estimate) return cmd_estimate(est, out);
    if (*plot) return cmd_plot(csv, svg, log_y, metric, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace rblkit::cli
