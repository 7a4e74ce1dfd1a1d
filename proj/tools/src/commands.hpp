#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rblkit::cli {

/// Entry point shared by main() and the in-process CLI tests.
/// Returns 0 on success, 2 for bad input, 3 for filesystem errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace rblkit::cli
