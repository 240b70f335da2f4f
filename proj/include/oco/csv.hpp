#ifndef OCO_CSV_HPP
#define OCO_CSV_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oco/common.hpp"

namespace oco {

// Shortest round-trippable decimal rendering of a double. %.17g guarantees
// bitwise recovery on read-back, which the reproducibility contract relies
// on (reruns must produce byte-identical files).
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string fmt_int(long long v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Minimal CSV table: header row plus string cells. No quoting — every value
// this project writes is a number or a bare identifier.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error("csv: no column named '" + name + "'");
  }
};

inline void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("csv: cannot open '" + path + "' for writing");
  auto write_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw Error("csv: row width " + str(row.size()) + " != header width " +
                  str(table.header.size()));
    write_row(row);
  }
  out.flush();
  if (!out) throw Error("csv: write to '" + path + "' failed");
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("csv: cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (lineno == 1)
      table.header = std::move(cells);
    else {
      if (cells.size() != table.header.size())
        throw ParseError("csv '" + path + "': row width mismatch", lineno);
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw Error("csv: '" + path + "' is empty");
  return table;
}

// Flat key=value manifest, one pair per line, keys written in sorted order
// so identical configurations serialize identically.
inline void write_manifest(const std::string& path, const std::map<std::string, std::string>& kv) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("manifest: cannot open '" + path + "' for writing");
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  out.flush();
  if (!out) throw Error("manifest: write to '" + path + "' failed");
}

inline std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("manifest: cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("manifest '" + path + "': missing '='", lineno);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace oco

#endif  // OCO_CSV_HPP
