#pragma once

#include "rblkit/harness.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rblkit::cli {

/// User or input-file problem; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem problem; maps to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sectioned key/value document. Matrix sections hold bare numeric rows.
struct ConfigDocument {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> values;  ///< "section.key" -> value
  std::map<std::string, std::vector<std::vector<double>>> matrices;
  std::map<std::string, int> matrix_lines;
};

ConfigDocument parse_config_text(const std::string& text);

/// Command-line overrides, applied on top of the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> methods;
  std::optional<std::string> completeness;
  std::optional<std::string> sigma_grid;
  std::optional<bool> completion;
  std::optional<bool> recenter;
  std::optional<bool> genie;
};

ExperimentConfig build_experiment(const ConfigDocument& doc, const Overrides& ov = {});

/// Reads the whole file; throws IoError when it cannot be opened.
std::string read_file(const std::string& path);

std::vector<double> parse_number_list(const std::string& text, const std::string& what);

bool parse_switch(const std::string& text, const std::string& what);

}  // namespace rblkit::cli
