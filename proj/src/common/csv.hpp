#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace aep {

// Append-only numeric CSV with a fixed header. Values print with %.12g so
// identical runs produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);  // IoError

  void row(const std::vector<double>& values);  // InputError on width mismatch
  void flush();

  static std::string format(double v);

 private:
  std::ofstream out_;
  std::size_t width_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a header column; InputError when absent.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);  // IoError / InputError on malformed input

}  // namespace aep
