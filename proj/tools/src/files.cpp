#include "files.hpp"

#include "config.hpp"
#include "rblkit/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace rblkit::cli {

namespace {

std::vector<std::vector<double>> numeric_rows(const std::string& text, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_number_list(line, what + " line " + std::to_string(line_no)));
  }
  return rows;
}

}  // namespace

std::string format_matrix(const Eigen::MatrixXd& m) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j) + 0.0);
      if (j > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& text, const std::string& what) {
  const auto rows = numeric_rows(text, what);
  if (rows.empty()) throw InputError(what + ": no numeric rows");
  const std::size_t n = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw InputError(what + ": ragged rows");
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::string format_measurements(const CrossDistanceMatrix& d12, const ConnectivityMask& w) {
  std::string out = std::to_string(d12.n1()) + " " + std::to_string(d12.n2()) + "\n";
  out += format_matrix(d12.values());
  out += format_matrix(w.values());
  return out;
}

MeasurementFile parse_measurements(const std::string& text) {
  const auto rows = numeric_rows(text, "measurement file");
  if (rows.empty() || rows.front().size() != 2) {
    throw InputError("measurement file: first line must be 'n1 n2'");
  }
  const double n1d = rows[0][0];
  const double n2d = rows[0][1];
  if (n1d < 1 || n2d < 1 || n1d != static_cast<double>(static_cast<long>(n1d)) ||
      n2d != static_cast<double>(static_cast<long>(n2d))) {
    throw InputError("measurement file: n1 and n2 must be positive integers");
  }
  const auto n1 = static_cast<std::size_t>(n1d);
  const auto n2 = static_cast<std::size_t>(n2d);
  if (rows.size() != 1 + 2 * n1) {
    throw InputError("measurement file: expected " + std::to_string(2 * n1) +
                     " matrix rows after the header, found " + std::to_string(rows.size() - 1));
  }
  Eigen::MatrixXd d(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
  Eigen::MatrixXd w(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
  for (std::size_t i = 0; i < 2 * n1; ++i) {
    const auto& row = rows[1 + i];
    if (row.size() != n2) {
      throw InputError("measurement file: row " + std::to_string(i + 1) + " has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(n2));
    }
    auto& target = i < n1 ? d : w;
    const auto r = static_cast<Eigen::Index>(i < n1 ? i : i - n1);
    for (std::size_t j = 0; j < n2; ++j) target(r, static_cast<Eigen::Index>(j)) = row[j];
  }
  try {
    return {CrossDistanceMatrix(std::move(d)), ConnectivityMask(std::move(w))};
  } catch (const Error& e) {
    throw InputError(std::string("measurement file: ") + e.what());
  }
}

Eigen::Matrix3Xd parse_conformation(const std::string& text, const std::string& what) {
  const Eigen::MatrixXd m = parse_matrix(text, what);
  if (m.rows() != 3) throw InputError(what + ": expected 3 rows of coordinates");
  return m;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace rblkit::cli
