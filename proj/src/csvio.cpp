#include "conemcf/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "conemcf/errors.hpp"

namespace conemcf {

std::string fmt_double(double x) {
  if (x == 0.0) return "0";  // avoid the "-0" wart
  char buf[40];
  // Shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    double back;
    std::sscanf(buf, "%lf", &back);
    if (back == x) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot open for writing: " + path.string());
  for (const auto& line : table.preamble) out << "# " << line << "\n";
  out << table.header << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << fmt_double(row[i]);
    }
    out << "\n";
  }
  if (!out) throw SolverError("write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw SolverError("write failed: " + path.string());
}

}  // namespace conemcf
