#pragma once

#include "corrfolio/core.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corrfolio::io {

/// Rows of a comma-separated file whose header matched the expected columns.
struct CsvTable {
  std::filesystem::path source;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based, parallel to rows
};

/// Reads a CSV file and checks its header.  Blank lines are skipped; a row
/// with the wrong number of cells is a DataError.
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& header);

/// Parses a decimal number; empty cells yield nullopt, garbage throws.
std::optional<double> parse_optional_number(std::string_view cell, std::string_view context);
double parse_number(std::string_view cell, std::string_view context);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

/// Output file name -> file contents.
using FileSet = std::map<std::string, std::string>;

/// Writes every file under `dir` via temporary siblings and renames them into
/// place only once all writes succeeded, so a failure never leaves a
/// partially written set behind.
void commit_files(const std::filesystem::path& dir, const FileSet& files);

std::string read_text(const std::filesystem::path& path);

}  // namespace corrfolio::io
