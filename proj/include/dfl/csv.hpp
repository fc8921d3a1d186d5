#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dfl {

/// Formats a double with 17 significant digits.
std::string format_double(double v);

/// Minimal CSV emitter: an integer key column followed by doubles.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& names);
  void row(long long key, const std::vector<double>& values);
  void row(double key, const std::vector<double>& values);

 private:
  std::ostream& out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Parses a numeric CSV with a single header line.
CsvTable read_csv(const std::string& path);

}  // namespace dfl
