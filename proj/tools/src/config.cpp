#include "config.hpp"

#include "rblkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace rblkit::cli {

namespace {

const std::set<std::string> kKeys = {
    "scenario.name",          "scenario.recenter",      "scenario.euler_deg",
    "scenario.translation",   "experiment.sigma_grid",  "experiment.methods",
    "experiment.trials",      "experiment.completeness", "experiment.seed",
    "experiment.completion",  "experiment.completion_method", "experiment.genie",
    "experiment.mask",        "experiment.nystrom",
};
const std::set<std::string> kMatrixSections = {"c1", "c2"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string at_line(int line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& what) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InputError(what + ": '" + tok + "' is not a number");
  return v;
}

std::uint64_t parse_uint(const std::string& tok, const std::string& what) {
  std::uint64_t v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError(what + ": '" + tok + "' is not a non-negative integer");
  }
  return v;
}

struct Lookup {
  const ConfigDocument& doc;

  const ConfigDocument::Entry* find(const std::string& key) const {
    const auto it = doc.values.find(key);
    return it == doc.values.end() ? nullptr : &it->second;
  }
  std::string where(const std::string& key) const {
    const auto* e = find(key);
    return e ? at_line(e->line, "field '" + key + "'") : "field '" + key + "'";
  }
  const std::string& required(const std::string& key) const {
    const auto* e = find(key);
    if (!e) throw InputError("missing required field '" + key + "'");
    return e->value;
  }
};

Eigen::Matrix3Xd matrix_section(const ConfigDocument& doc, const std::string& name) {
  const auto it = doc.matrices.find(name);
  if (it == doc.matrices.end()) throw InputError("missing required section [" + name + "]");
  const auto& rows = it->second;
  const int line = doc.matrix_lines.at(name);
  if (rows.size() != 3) {
    throw InputError(at_line(line, "section [" + name + "] needs exactly 3 rows"));
  }
  const std::size_t n = rows[0].size();
  if (rows[1].size() != n || rows[2].size() != n) {
    throw InputError(at_line(line, "rows of [" + name + "] differ in length"));
  }
  Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(n));
  for (int r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < n; ++c) m(r, static_cast<Eigen::Index>(c)) = rows[static_cast<std::size_t>(r)][c];
  }
  return m;
}

Scenario build_scenario(const Lookup& lk, bool recenter_flag) {
  const std::string& name = lk.required("scenario.name");
  if (name == "paper-table1") return paper_table1(recenter_flag);
  if (name != "custom") {
    throw InputError(lk.where("scenario.name") + ": unknown scenario '" + name +
                     "' (expected paper-table1 or custom)");
  }
  const auto angles = parse_number_list(lk.required("scenario.euler_deg"), lk.where("scenario.euler_deg"));
  const auto trans = parse_number_list(lk.required("scenario.translation"), lk.where("scenario.translation"));
  if (angles.size() != 3) throw InputError(lk.where("scenario.euler_deg") + ": needs 3 angles");
  if (trans.size() != 3) throw InputError(lk.where("scenario.translation") + ": needs 3 values");
  Conformation c1(matrix_section(lk.doc, "c1"));
  Conformation c2(matrix_section(lk.doc, "c2"));
  if (recenter_flag) {
    c1 = recenter(c1);
    c2 = recenter(c2);
  }
  Pose pose;
  pose.rotation = rotation_from_euler(EulerAngles::from_degrees(angles[0], angles[1], angles[2]));
  pose.translation = Eigen::Vector3d(trans[0], trans[1], trans[2]);
  return {std::move(c1), std::move(c2), pose, "custom"};
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split_tokens(text)) out.push_back(parse_double(tok, what));
  return out;
}

bool parse_switch(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "on" || t == "true" || t == "1") return true;
  if (t == "off" || t == "false" || t == "0") return false;
  throw InputError(what + ": expected on or off, got '" + t + "'");
}

ConfigDocument parse_config_text(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string section;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError(at_line(line_no, "unterminated section header"));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scenario" && section != "experiment" && !kMatrixSections.count(section)) {
        throw InputError(at_line(line_no, "unknown section [" + section + "]"));
      }
      if (kMatrixSections.count(section)) {
        if (doc.matrices.count(section)) throw InputError(at_line(line_no, "duplicate section [" + section + "]"));
        doc.matrices[section] = {};
        doc.matrix_lines[section] = line_no;
      }
      continue;
    }
    if (section.empty()) throw InputError(at_line(line_no, "content before the first section"));
    if (kMatrixSections.count(section)) {
      doc.matrices[section].push_back(
          parse_number_list(line, at_line(line_no, "section [" + section + "]")));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(at_line(line_no, "expected key = value"));
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (!kKeys.count(key)) throw InputError(at_line(line_no, "unknown field '" + key + "'"));
    if (doc.values.count(key)) throw InputError(at_line(line_no, "duplicate field '" + key + "'"));
    doc.values[key] = {trim(line.substr(eq + 1)), line_no};
  }
  return doc;
}

ExperimentConfig build_experiment(const ConfigDocument& doc, const Overrides& ov) {
  const Lookup lk{doc};
  auto opt_value = [&](const std::string& key) -> std::optional<std::string> {
    if (const auto* e = lk.find(key)) return e->value;
    return std::nullopt;
  };

  try {
    bool recenter_flag = false;
    if (auto v = opt_value("scenario.recenter")) recenter_flag = parse_switch(*v, lk.where("scenario.recenter"));
    if (ov.recenter) recenter_flag = *ov.recenter;

    ExperimentConfig cfg{.scenario = build_scenario(lk, recenter_flag)};

    const std::string sigma_text = ov.sigma_grid ? *ov.sigma_grid : lk.required("experiment.sigma_grid");
    cfg.sigma_grid = parse_number_list(sigma_text, lk.where("experiment.sigma_grid"));
    if (cfg.sigma_grid.empty()) throw InputError(lk.where("experiment.sigma_grid") + ": empty sigma grid");
    for (double s : cfg.sigma_grid) {
      if (!(s >= 0.0)) throw InputError(lk.where("experiment.sigma_grid") + ": sigma must be >= 0");
    }

    const std::string method_text = ov.methods ? *ov.methods : lk.required("experiment.methods");
    for (const auto& tok : split_tokens(method_text)) {
      const auto m = parse_method(tok);
      if (!m) throw InputError(lk.where("experiment.methods") + ": unknown method '" + tok + "'");
      cfg.methods.push_back(*m);
    }
    if (cfg.methods.empty()) throw InputError(lk.where("experiment.methods") + ": empty method list");

    if (ov.trials) {
      cfg.trials = *ov.trials;
    } else {
      cfg.trials = parse_uint(lk.required("experiment.trials"), lk.where("experiment.trials"));
    }
    if (cfg.trials == 0) throw InputError(lk.where("experiment.trials") + ": must be >= 1");

    const std::size_t m_max = std::min(cfg.scenario.c1.size(), cfg.scenario.c2.size());
    const auto comp_text = ov.completeness ? ov.completeness : opt_value("experiment.completeness");
    if (comp_text) {
      for (const auto& tok : split_tokens(*comp_text)) {
        const auto m = parse_uint(tok, lk.where("experiment.completeness"));
        if (m > m_max) {
          throw InputError(lk.where("experiment.completeness") + ": M=" + tok + " exceeds " +
                           std::to_string(m_max));
        }
        cfg.completeness_grid.push_back(static_cast<std::size_t>(m));
      }
    } else {
      cfg.completeness_grid = {m_max};
    }
    if (cfg.completeness_grid.empty()) {
      throw InputError(lk.where("experiment.completeness") + ": empty completeness grid");
    }

    if (auto v = opt_value("experiment.seed")) cfg.base_seed = parse_uint(*v, lk.where("experiment.seed"));
    if (ov.seed) cfg.base_seed = *ov.seed;
    if (auto v = opt_value("experiment.completion")) {
      cfg.completion_enabled = parse_switch(*v, lk.where("experiment.completion"));
    }
    if (ov.completion) cfg.completion_enabled = *ov.completion;
    if (auto v = opt_value("experiment.genie")) cfg.include_genie = parse_switch(*v, lk.where("experiment.genie"));
    if (ov.genie) cfg.include_genie = *ov.genie;
    if (auto v = opt_value("experiment.completion_method")) {
      if (*v == "anchored") cfg.completion_method = CompletionMethod::kAnchored;
      else if (*v == "low-rank") cfg.completion_method = CompletionMethod::kLowRank;
      else throw InputError(lk.where("experiment.completion_method") + ": expected anchored or low-rank");
    }
    if (auto v = opt_value("experiment.mask")) {
      if (*v == "block") cfg.random_mask = false;
      else if (*v == "random") cfg.random_mask = true;
      else throw InputError(lk.where("experiment.mask") + ": expected block or random");
    }
    if (auto v = opt_value("experiment.nystrom")) {
      if (*v == "squared") cfg.translation.embedding.nystrom = NystromMode::kSquared;
      else if (*v == "plain") cfg.translation.embedding.nystrom = NystromMode::kPlain;
      else throw InputError(lk.where("experiment.nystrom") + ": expected squared or plain");
    }
    return cfg;
  } catch (const Error& e) {
    throw InputError(std::string("invalid scenario: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

}  // namespace rblkit::cli
