#include "commands.hpp"
#include "config.hpp"
#include "files.hpp"
#include "oracles.hpp"
#include "plot.hpp"

#include <rblkit/harness.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using rblkit::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rblkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string config(const std::string& extra_experiment = "", bool recenter = false) {
    const std::string p = path("run.ini");
    put(p, std::string("[scenario]\nname = paper-table1\nrecenter = ") + (recenter ? "on" : "off") +
               "\n\n[experiment]\nsigma_grid = 0.01, 0.05\nmethods = ego-mds\ntrials = 8\nseed = 5\n" +
               extra_experiment);
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateDumpsTableBodies) {
  const auto r = cli({"simulate", "--config", config("completeness = 10, 6\n"), "--out", path("sim")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto c1 = rblkit::cli::parse_matrix(slurp(dir_ / "sim/c1.txt"), "c1");
  const auto c2 = rblkit::cli::parse_matrix(slurp(dir_ / "sim/c2.txt"), "c2");
  EXPECT_EQ(c1.rows(), 3);
  EXPECT_EQ(c1.cols(), 12);
  EXPECT_EQ(c2.cols(), 10);
  EXPECT_EQ(c1, oracle::table1_c1());
  EXPECT_EQ(c2, oracle::table1_c2());
  EXPECT_TRUE(fs::exists(dir_ / "sim/edm.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "sim/mask_m6.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "sim/measurements_sigma0.05_m6.txt"));
  const auto mask = rblkit::cli::parse_matrix(slurp(dir_ / "sim/mask_m6.txt"), "mask");
  EXPECT_EQ(mask.sum(), 96.0);
}

TEST_F(CliTest, SimulateIsIdempotent) {
  const std::string cfg = config();
  ASSERT_EQ(cli({"simulate", "--config", cfg, "--out", path("a")}).code, 0);
  ASSERT_EQ(cli({"simulate", "--config", cfg, "--out", path("b")}).code, 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_GE(files, 7u);
}

TEST_F(CliTest, MissingFieldNamed) {
  const std::string p = path("bad.ini");
  put(p, "[scenario]\nname = paper-table1\n[experiment]\nsigma_grid = 0.1\nmethods = ego-mds\n");
  const auto r = cli({"simulate", "--config", p, "--out", path("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("experiment.trials"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedLineReported) {
  const std::string p = path("bad.ini");
  put(p, "[scenario]\nname = paper-table1\nthis is not a key\n");
  const auto r = cli({"simulate", "--config", p, "--out", path("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  put(p, "[scenario]\nname = paper-table1\ncolour = red\n");
  const auto u = cli({"sweep", "--config", p, "--out", path("x")});
  EXPECT_EQ(u.code, 2);
  EXPECT_NE(u.err.find("scenario.colour"), std::string::npos) << u.err;
}

TEST_F(CliTest, CustomScenarioSection) {
  const std::string p = path("custom.ini");
  put(p,
      "[scenario]\nname = custom\neuler_deg = 0, 0, 30\ntranslation = 4, 1, 0\n"
      "[c1]\n1 -1 1 -1 0\n1 1 -1 -1 0\n0 0 0 0 2\n"
      "[c2]\n0.5 -0.5 0 0\n0 0 0.5 -0.5\n0 0 0 1\n"
      "[experiment]\nsigma_grid = 0\nmethods = ego-mds\ntrials = 1\n");
  const auto r = cli({"simulate", "--config", p, "--out", path("sim")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rblkit::cli::parse_matrix(slurp(dir_ / "sim/c2.txt"), "c2").cols(), 4);
  put(p, "[scenario]\nname = custom\neuler_deg = 0, 0, 30\ntranslation = 4, 1, 0\n[c1]\n1 2\n3 4\n"
         "[experiment]\nsigma_grid = 0\nmethods = ego-mds\ntrials = 1\n");
  EXPECT_EQ(cli({"simulate", "--config", p, "--out", path("sim")}).code, 2);
}

TEST_F(CliTest, SweepWritesCsvAndManifest) {
  const std::string cfg = config("genie = on\n", true);
  const auto r = cli({"sweep", "--config", cfg, "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir_ / "out/results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), std::string(rblkit::kCsvHeader));
  EXPECT_NE(csv.find("\nego-mds,"), std::string::npos);
  EXPECT_NE(csv.find("\ngenie-mds,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "out/manifest.json"));
  EXPECT_EQ(manifest.at("config_path"), cfg);
  EXPECT_EQ(manifest.at("config_digest"), "sha256:" + rblkit::cli::sha256_hex(slurp(cfg)));
  EXPECT_FALSE(manifest.at("tool_version").get<std::string>().empty());
  EXPECT_FALSE(manifest.at("timestamp").get<std::string>().empty());
}

TEST_F(CliTest, SweepIsByteIdenticalOnRerun) {
  const std::string cfg = config("completeness = 10, 6\n");
  ASSERT_EQ(cli({"sweep", "--config", cfg, "--out", path("a")}).code, 0);
  setenv("RBLKIT_THREADS", "2", 1);
  ASSERT_EQ(cli({"sweep", "--config", cfg, "--out", path("b")}).code, 0);
  unsetenv("RBLKIT_THREADS");
  EXPECT_EQ(slurp(dir_ / "a/results.csv"), slurp(dir_ / "b/results.csv"));
}

TEST_F(CliTest, SweepOverridesApply) {
  const std::string cfg = config();
  const auto r = cli({"sweep", "--config", cfg, "--out", path("o"), "--trials", "3", "--methods", "ego-robust",
                      "--sigma-grid", "0.02", "--completeness", "6", "--completion", "on", "--seed", "9",
                      "--recenter", "on", "--genie", "off"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rblkit::cli::parse_results_csv(slurp(dir_ / "o/results.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].method, "ego-robust");
  EXPECT_EQ(rows[0].trials, 3u);
  EXPECT_EQ(rows[0].seed, 9u);
  EXPECT_DOUBLE_EQ(rows[0].sigma, 0.02);
  EXPECT_DOUBLE_EQ(rows[0].completeness, 0.8);
  EXPECT_EQ(cli({"sweep", "--config", cfg, "--out", path("o"), "--completion", "maybe"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--config", cfg, "--out", path("o"), "--trials", "x"}).code, 2);
}

TEST_F(CliTest, EmptyMethodListRejected) {
  const std::string p = path("m.ini");
  put(p, "[scenario]\nname = paper-table1\n[experiment]\nsigma_grid = 0.1\nmethods =\ntrials = 2\n");
  EXPECT_EQ(cli({"sweep", "--config", p, "--out", path("o")}).code, 2);
}

TEST_F(CliTest, IoFailuresExitThree) {
  EXPECT_EQ(cli({"sweep", "--config", path("absent.ini"), "--out", path("o")}).code, 3);
  put(path("blocker"), "x");
  EXPECT_EQ(cli({"sweep", "--config", config(), "--out", path("blocker/sub")}).code, 3);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--config"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, EstimateNoiselessDump) {
  ASSERT_EQ(cli({"simulate", "--config", config("", true), "--out", path("sim")}).code, 0);
  const auto ego = cli({"estimate", "--measurements", path("sim/measurements.txt"), "--conformation", path("sim/c1.txt")});
  ASSERT_EQ(ego.code, 0) << ego.err;
  const auto rec = nlohmann::json::parse(ego.out);
  EXPECT_EQ(rec.at("method"), "ego-mds");
  EXPECT_EQ(rec.at("rotation_method"), "ego");
  ASSERT_EQ(rec.at("q_hat").size(), 9u);
  EXPECT_NEAR(rec.at("t_hat")[0].get<double>(), 7.0, 1e-6);
  EXPECT_NEAR(rec.at("t_hat")[1].get<double>(), 3.0, 1e-6);
  EXPECT_NEAR(rec.at("t_hat")[2].get<double>(), 0.5, 1e-6);
  const Eigen::Matrix3d q = oracle::euler_zyx(oracle::deg(10), oracle::deg(20), oracle::deg(45));
  EXPECT_NEAR(rec.at("q_hat")[1].get<double>(), q(0, 1), 1e-6);
  EXPECT_NEAR(rec.at("q_hat")[3].get<double>(), q(1, 0), 1e-6);

  for (const std::string m : {"genie-robust", "opp"}) {
    const auto g = cli({"estimate", "--measurements", path("sim/measurements.txt"), "--conformation",
                        path("sim/c1.txt"), "--target-conformation", path("sim/c2.txt"), "--method", m});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto gr = nlohmann::json::parse(g.out);
    EXPECT_EQ(gr.at("rotation_method"), "opp-genie");
    EXPECT_NEAR(gr.at("t_hat")[0].get<double>(), 7.0, 1e-4);
  }
}

TEST_F(CliTest, EstimateLiteralDumpWithGenie) {
  ASSERT_EQ(cli({"simulate", "--config", config(), "--out", path("sim")}).code, 0);
  const auto g = cli({"estimate", "--measurements", path("sim/measurements.txt"), "--conformation",
                      path("sim/c1.txt"), "--target-conformation", path("sim/c2.txt"), "--method", "genie-mds"});
  ASSERT_EQ(g.code, 0) << g.err;
  const auto rec = nlohmann::json::parse(g.out);
  EXPECT_NEAR(rec.at("t_hat")[2].get<double>(), 0.5, 1e-6);
}

TEST_F(CliTest, EstimateInputErrors) {
  ASSERT_EQ(cli({"simulate", "--config", config("completeness = 3\n"), "--out", path("sim")}).code, 0);
  const std::string meas3 = path("sim/measurements_sigma0.01_m3.txt");
  const auto opp = cli({"estimate", "--measurements", meas3, "--conformation", path("sim/c1.txt"),
                        "--target-conformation", path("sim/c2.txt"), "--method", "opp"});
  EXPECT_EQ(opp.code, 2);
  EXPECT_NE(opp.err.find("links"), std::string::npos) << opp.err;

  const auto mismatch = cli({"estimate", "--measurements", meas3, "--conformation", path("sim/c2.txt")});
  EXPECT_EQ(mismatch.code, 2);
  EXPECT_NE(mismatch.err.find("dimension mismatch"), std::string::npos);

  put(path("garbage.txt"), "hello world\n\x01\x02");
  EXPECT_EQ(cli({"estimate", "--measurements", path("garbage.txt"), "--conformation", path("sim/c1.txt")}).code, 2);
  EXPECT_EQ(cli({"estimate", "--measurements", meas3, "--conformation", path("sim/c1.txt"), "--method", "genie-mds"}).code, 2);
  EXPECT_EQ(cli({"estimate", "--measurements", meas3, "--conformation", path("sim/c1.txt"), "--method", "x"}).code, 2);
}

TEST_F(CliTest, PlotRendersOnePolylinePerSeries) {
  const std::string cfg = config("completeness = 10, 6\ngenie = on\n");
  ASSERT_EQ(cli({"sweep", "--config", cfg, "--out", path("o")}).code, 0);
  ASSERT_EQ(cli({"plot", "--csv", path("o/results.csv"), "--out", path("p.svg"), "--log-y"}).code, 0);
  const std::string svg = slurp(dir_ / "p.svg");
  std::size_t polylines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
  EXPECT_EQ(polylines, 4u);
  EXPECT_NE(svg.find("class=\"legend\" x=\"") , std::string::npos);
  EXPECT_NE(svg.find(">ego-mds (100%)<"), std::string::npos);
  EXPECT_NE(svg.find(">genie-mds (80%)<"), std::string::npos);
  ASSERT_EQ(cli({"plot", "--csv", path("o/results.csv"), "--out", path("p2.svg"), "--log-y"}).code, 0);
  EXPECT_EQ(svg, slurp(dir_ / "p2.svg"));
  EXPECT_EQ(cli({"plot", "--csv", path("o/results.csv"), "--out", path("p3.svg"), "--metric", "rmse_pose"}).code, 0);
}

TEST_F(CliTest, PlotRejectsSchemaMismatch) {
  put(path("empty.csv"), std::string(rblkit::kCsvHeader) + "\n");
  EXPECT_EQ(cli({"plot", "--csv", path("empty.csv"), "--out", path("p.svg")}).code, 2);
  put(path("wrong.csv"), "a,b,c\n1,2,3\n");
  EXPECT_EQ(cli({"plot", "--csv", path("wrong.csv"), "--out", path("p.svg")}).code, 2);
  put(path("short.csv"), std::string(rblkit::kCsvHeader) + "\nego-mds,0.1,1.0\n");
  EXPECT_EQ(cli({"plot", "--csv", path("short.csv"), "--out", path("p.svg")}).code, 2);
}

TEST_F(CliTest, PlotLegendListsBothMethods) {
  put(path("two.csv"), std::string(rblkit::kCsvHeader) +
                           "\nego-mds,0.01,1.000000,1e-2,2e-2,10,0,1\nego-mds,0.1,1.000000,1e-1,2e-1,10,0,1\n"
                           "ego-robust,0.01,1.000000,2e-2,3e-2,10,0,1\nego-robust,0.1,1.000000,2e-1,3e-1,10,0,1\n");
  ASSERT_EQ(cli({"plot", "--csv", path("two.csv"), "--out", path("p.svg")}).code, 0);
  const std::string svg = slurp(dir_ / "p.svg");
  EXPECT_NE(svg.find("class=\"legend\""), std::string::npos);
  EXPECT_NE(svg.find(">ego-mds (100%)<"), std::string::npos);
  EXPECT_NE(svg.find(">ego-robust (100%)<"), std::string::npos);
}

TEST(MeasurementFile, RoundTripAndValidation) {
  const rblkit::CrossDistanceMatrix d(Eigen::MatrixXd::Random(4, 3).cwiseAbs());
  const auto w = rblkit::connectivity_mask(4, 3, 2);
  const auto parsed = rblkit::cli::parse_measurements(rblkit::cli::format_measurements(d, w));
  EXPECT_EQ(parsed.d12.values(), d.values());
  EXPECT_EQ(parsed.w.values(), w.values());
  EXPECT_THROW(rblkit::cli::parse_measurements("2 2\n1 2\n3 4\n1 1\n"), rblkit::cli::InputError);
  EXPECT_THROW(rblkit::cli::parse_measurements("1 2\n1 2\n1 0.5\n"), rblkit::cli::InputError);
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(rblkit::cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
