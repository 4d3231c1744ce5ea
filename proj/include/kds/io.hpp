#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kds/points.hpp"

namespace kds {

// Full round-trip precision; oracle comparisons depend on exact re-parses.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV: one point per row, d numeric columns, optional header line.
inline void write_points_csv(const PointSet& ps, std::ostream& os, bool header = true) {
  if (header) {
    for (int c = 0; c < ps.dim(); ++c) os << (c ? ",x" : "x") << c;
    os << "\n";
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto p = ps[i];
    for (int c = 0; c < ps.dim(); ++c) {
      if (c) os << ",";
      os << format_double(p[c]);
    }
    os << "\n";
  }
}

inline PointSet read_points_csv(std::istream& is) {
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument("trailing");
        row.push_back(v);
      } catch (...) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw std::invalid_argument("points csv: non-numeric row");
    }
    first = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("points csv: no data rows");
  PointSet ps(static_cast<int>(rows[0].size()));
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) throw std::invalid_argument("points csv: ragged rows");
    ps.push_back(r);
  }
  return ps;
}

inline nlohmann::json points_to_json(const PointSet& ps) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (double c : ps[i]) row.push_back(c);
    arr.push_back(std::move(row));
  }
  return arr;
}

inline PointSet points_from_json(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.empty()) throw std::invalid_argument("points json: expected non-empty array");
  const auto& first = arr.front();
  if (!first.is_array() || first.empty()) throw std::invalid_argument("points json: expected array rows");
  PointSet ps(static_cast<int>(first.size()));
  std::vector<double> row;
  for (const auto& r : arr) {
    row.clear();
    for (const auto& v : r) row.push_back(v.get<double>());
    ps.push_back(row);
  }
  return ps;
}

// Extension dispatch: .json reads/writes the JSON array form, everything
// else is CSV.
inline bool has_json_extension(const std::string& path) {
  const auto dot = path.rfind('.');
  return dot != std::string::npos && path.substr(dot) == ".json";
}

inline PointSet load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open points file: " + path);
  if (has_json_extension(path)) {
    nlohmann::json j;
    in >> j;
    return points_from_json(j);
  }
  return read_points_csv(in);
}

inline void save_points(const PointSet& ps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  if (has_json_extension(path)) {
    out << points_to_json(ps).dump(2) << "\n";
  } else {
    write_points_csv(ps, out);
  }
  if (!out) throw std::runtime_error("failed writing points file: " + path);
}

}  // namespace kds
