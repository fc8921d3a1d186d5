#include "dfl/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dfl/errors.hpp"

namespace dfl {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void CsvWriter::row(long long key, const std::vector<double>& values) {
  out_ << key;
  for (double v : values) out_ << ',' << format_double(v);
  out_ << '\n';
}

void CsvWriter::row(double key, const std::vector<double>& values) {
  out_ << format_double(key);
  for (double v : values) out_ << ',' << format_double(v);
  out_ << '\n';
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != table.header.size()) {
      throw InvalidInput("row width does not match header in " + path);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace dfl
