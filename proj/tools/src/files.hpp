#pragma once

#include "rblkit/measurement.hpp"

#include <Eigen/Dense>

#include <string>

namespace rblkit::cli {

/// One row per line, space separated, round-trip precision.
std::string format_matrix(const Eigen::MatrixXd& m);

/// Whitespace-separated numeric rows; blank and '#' lines are skipped.
Eigen::MatrixXd parse_matrix(const std::string& text, const std::string& what);

struct MeasurementFile {
  CrossDistanceMatrix d12;
  ConnectivityMask w;
};

/// "n1 n2" header, n1 distance rows, n1 binary mask rows.
std::string format_measurements(const CrossDistanceMatrix& d12, const ConnectivityMask& w);
MeasurementFile parse_measurements(const std::string& text);

/// Three rows of landmark coordinates.
Eigen::Matrix3Xd parse_conformation(const std::string& text, const std::string& what);

/// Throws IoError on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace rblkit::cli
