#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace conemcf {

// Shortest round-trip decimal form; identical doubles print identically, so
// repeated runs produce byte-identical CSVs.
std::string fmt_double(double x);

struct CsvTable {
  std::string header;                     // comma-separated column names
  std::vector<std::string> preamble;      // '#'-prefixed lines before the header
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace conemcf
