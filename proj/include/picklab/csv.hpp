#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace picklab {

/// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_double(double x);

/// LF-terminated CSV writer with a mandatory header row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header);
  void row(const std::vector<double>& cells);

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_;
};

/// Parsed CSV: header names and numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace picklab
