#pragma once

#include <string>
#include <vector>

#include "stlkit/error.hpp"

namespace stlkit {

/// Whole file as bytes; throws IoError.
std::string read_file(const std::string& path);

/// Lines without their terminators; blank lines are kept.
std::vector<std::string> read_lines(const std::string& path);

/// Writes to a sibling temporary file, then renames it over path, so readers
/// see either the old or the new content.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace stlkit
