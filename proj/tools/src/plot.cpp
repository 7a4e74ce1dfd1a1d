#include "plot.hpp"

#include "config.hpp"
#include "rblkit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>

namespace rblkit::cli {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 220.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

template <class T>
T parse_field(const std::string& tok, int line, const char* name) {
  T v{};
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("csv line " + std::to_string(line) + ": bad " + name + " '" + tok + "'");
  }
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::vector<CsvRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw InputError("csv: header does not match '" + std::string(kCsvHeader) + "'");
  std::vector<CsvRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
    if (f.size() != 8) {
      throw InputError("csv line " + std::to_string(line_no) + ": expected 8 fields, found " +
                       std::to_string(f.size()));
    }
    CsvRow r;
    r.method = f[0];
    if (r.method.empty()) throw InputError("csv line " + std::to_string(line_no) + ": empty method");
    r.sigma = parse_field<double>(f[1], line_no, "sigma");
    r.completeness = parse_field<double>(f[2], line_no, "completeness");
    r.rmse_t = parse_field<double>(f[3], line_no, "rmse_t");
    r.rmse_pose = parse_field<double>(f[4], line_no, "rmse_pose");
    r.trials = parse_field<std::size_t>(f[5], line_no, "trials");
    r.failures = parse_field<std::size_t>(f[6], line_no, "failures");
    r.seed = parse_field<std::uint64_t>(f[7], line_no, "seed");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InputError("csv: no data rows");
  return rows;
}

std::string render_svg(const std::vector<CsvRow>& rows, const PlotOptions& opts) {
  using Series = std::vector<std::pair<double, double>>;
  std::map<std::pair<std::string, double>, Series> series;
  for (const auto& r : rows) {
    const double y = opts.metric == PlotMetric::kTranslation ? r.rmse_t : r.rmse_pose;
    auto& s = series[{r.method, r.completeness}];
    if (std::isfinite(y) && (!opts.log_y || y > 0.0)) s.emplace_back(r.sigma, y);
  }

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, y] : pts) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = opts.log_y ? 1e-3 : 0.0;
    y_hi = 1.0;
  }
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (opts.log_y) {
    y_lo = std::pow(10.0, std::floor(std::log10(y_lo)));
    y_hi = std::pow(10.0, std::ceil(std::log10(y_hi)));
    if (y_hi <= y_lo) y_hi = y_lo * 10.0;
  } else {
    y_lo = std::min(0.0, y_lo);
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    y_hi *= 1.05;
  }

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) {
    const double f = opts.log_y ? (std::log10(y) - std::log10(y_lo)) / (std::log10(y_hi) - std::log10(y_lo))
                                : (y - y_lo) / (y_hi - y_lo);
    return kTop + (1.0 - f) * ph;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / 4.0;
    svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << label(x) << "</text>\n";
  }
  if (opts.log_y) {
    for (double y = y_lo; y <= y_hi * 1.0001; y *= 10.0) {
      svg << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(y))
          << "\" y2=\"" << num(py(y)) << "\" stroke=\"#dddddd\"/>\n";
      svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4)
          << "\" text-anchor=\"end\">" << label(y) << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double y = y_lo + (y_hi - y_lo) * i / 4.0;
      svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4)
          << "\" text-anchor=\"end\">" << label(y) << "</text>\n";
    }
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" text-anchor=\"middle\">sigma [m]</text>\n";
  svg << "<text transform=\"translate(18," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << (opts.metric == PlotMetric::kTranslation ? "translation RMSE [m]" : "pose RMSE [m]")
      << "</text>\n";

  std::size_t idx = 0;
  for (const auto& [key, pts] : series) {
    const char* color = kPalette[idx % (sizeof kPalette / sizeof kPalette[0])];
    std::string points;
    for (const auto& [x, y] : pts) {
      if (!points.empty()) points += ' ';
      points += num(px(x)) + "," + num(py(y));
    }
    const std::string name = xml_escape(key.first + " (" + label(100.0 * key.second) + "%)");
    svg << "<polyline class=\"series\" data-series=\"" << name << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(idx);
    svg << "<line x1=\"" << num(kLeft + pw + 15) << "\" x2=\"" << num(kLeft + pw + 40) << "\" y1=\""
        << num(ly) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text class=\"legend\" x=\"" << num(kLeft + pw + 45) << "\" y=\"" << num(ly + 4) << "\">"
        << name << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rblkit::cli
