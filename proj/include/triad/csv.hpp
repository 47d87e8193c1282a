#pragma once

// Numeric CSV with '#'-prefixed metadata lines ("# key: value") ahead of a
// header row. Values are written with 12 significant digits so identical
// inputs give byte-identical files.

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "triad/errors.hpp"

namespace triad {

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ConfigError("CSV has no column " + name);
  }
  bool has_column(const std::string& name) const {
    for (const auto& h : header)
      if (h == name) return true;
    return false;
  }
  std::vector<double> values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r[c]);
    return v;
  }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline void write_csv(std::ostream& os, const CsvTable& t) {
  for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw InvalidParameter("CSV row width differs from header");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
    os << '\n';
  }
}

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  int line_no = 0;
  auto cells = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ',')) {
      const auto b = c.find_first_not_of(" \t\r");
      const auto e = c.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? std::string{} : c.substr(b, e - b + 1));
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(1);
      const auto colon = body.find(':');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(' ');
        const auto e = s.find_last_not_of(' ');
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      if (colon == std::string::npos)
        t.metadata.emplace_back(trim(body), "");
      else
        t.metadata.emplace_back(trim(body.substr(0, colon)), trim(body.substr(colon + 1)));
      continue;
    }
    const auto c = cells(line);
    if (t.header.empty()) {
      t.header = c;
      continue;
    }
    if (c.size() != t.header.size())
      throw ConfigError("CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " fields");
    std::vector<double> row;
    for (const auto& cell : c) {
      if (cell == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      if (cell == "inf" || cell == "-inf") {
        row.push_back(cell[0] == '-' ? -std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::infinity());
        continue;
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size())
        throw ConfigError("CSV line " + std::to_string(line_no) + ": not a number: " + cell);
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ConfigError("CSV has no header row");
  return t;
}

}  // namespace triad
