#include "common/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "common/error.hpp"

namespace aep {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
  if (!out_) throw IoError("cannot open csv for writing: " + path);
  if (header.empty()) throw InputError("csv header must not be empty");
  for (std::size_t i = 0; i < header.size(); ++i)
    out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

std::string CsvWriter::format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_)
    throw InputError("csv row width " + std::to_string(values.size()) + " != header width " +
                     std::to_string(width_));
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << format(values[i]);
  out_ << "\n";
}

void CsvWriter::flush() { out_.flush(); }

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  throw InputError("csv column not found: " + name);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open csv: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv has no header: " + path);
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::vector<double> row;
    while (std::getline(rs, cell, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str()) throw InputError("csv cell is not numeric: '" + cell + "'");
    }
    if (row.size() != table.header.size())
      throw InputError("csv row width mismatch in " + path);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace aep
