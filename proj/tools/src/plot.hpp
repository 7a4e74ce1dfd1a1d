#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rblkit::cli {

struct CsvRow {
  std::string method;
  double sigma = 0.0;
  double completeness = 1.0;
  double rmse_t = 0.0;
  double rmse_pose = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::uint64_t seed = 0;
};

/// Accepts exactly the sweep CSV schema. Throws InputError on any mismatch.
std::vector<CsvRow> parse_results_csv(const std::string& text);

enum class PlotMetric { kTranslation, kPose };

struct PlotOptions {
  bool log_y = false;
  PlotMetric metric = PlotMetric::kTranslation;
};

/// RMSE against sigma, one polyline per (method, completeness) series.
std::string render_svg(const std::vector<CsvRow>& rows, const PlotOptions& opts);

}  // namespace rblkit::cli
