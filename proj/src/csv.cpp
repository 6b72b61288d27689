#include "picklab/csv.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "picklab/types.hpp"

namespace picklab {

std::string format_double(double x) {
  char buf[64];
  // std::to_chars never consults the locale
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw Error("cannot open '" + path + "' for writing");
  columns_ = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  out_ << header << '\n';
}

void CsvWriter::row(const std::vector<double>& cells) {
  if (cells.size() != columns_) throw Error(path_ + ": row has wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_double(cells[i]);
  }
  out_ << '\n';
  if (!out_) throw Error("write failed on '" + path_ + "'");
}

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error("csv: missing column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw Error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                  " cells");
    std::vector<double> r;
    r.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw Error(path + ":" + std::to_string(lineno) + ": not a number '" + c + "'");
      r.push_back(v);
    }
    t.rows.push_back(std::move(r));
  }
  if (t.header.empty()) throw Error(path + ": empty csv");
  return t;
}

}  // namespace picklab
