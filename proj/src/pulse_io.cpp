// Copyright 2026 The bincz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bincz/dynamics.hpp"
#include "bincz/errors.hpp"
#include "bincz/units.hpp"

namespace bincz {

namespace {

// 14 significant digits survive the MHz <-> rad/s conversion unchanged, which
// keeps write -> read -> write byte-identical.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.14g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t b = 0, e = cell.size();
    while (b < e && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(cell[e - 1]))) --e;
    out.push_back(cell.substr(b, e - b));
  }
  return out;
}

double parse_number(const std::string& s, std::size_t row) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw SchemaError("pulses.row[" + std::to_string(row) + "]", "bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_pulses(std::ostream& out, const PulseSet& pulses) {
  pulses.validate();
  out << "t_ns";
  for (const auto& l : pulses.labels) out << ", " << l << "_MHz";
  out << '\n';
  const double dt_ns = units::s_to_ns(pulses.dt);
  for (std::size_t k = 0; k < pulses.n_steps(); ++k) {
    out << fmt(static_cast<double>(k + 1) * dt_ns);
    for (std::size_t j = 0; j < pulses.n_controls(); ++j)
      out << ", " << fmt(units::rad_per_s_to_mhz(pulses.amplitudes(static_cast<Eigen::Index>(j),
                                                                   static_cast<Eigen::Index>(k))));
    out << '\n';
  }
}

PulseSet read_pulses(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("pulses", "empty pulse file");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "t_ns") throw SchemaError("pulses.header", "first column must be t_ns");
  std::vector<std::string> labels;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& h = header[c];
    const std::string suffix = "_MHz";
    if (h.size() <= suffix.size() || h.compare(h.size() - suffix.size(), suffix.size(), suffix) != 0) {
      throw SchemaError("pulses.header[" + std::to_string(c) + "]", "column must end in _MHz");
    }
    labels.push_back(h.substr(0, h.size() - suffix.size()));
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw SchemaError("pulses.row[" + std::to_string(rows.size()) + "]", "wrong number of columns");
    }
    times.push_back(parse_number(cells[0], rows.size()));
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(parse_number(cells[c], rows.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SchemaError("pulses", "no pulse steps");
  const double dt_ns = times[0];
  if (!(dt_ns > 0)) throw SchemaError("pulses.row[0].t_ns", "first time stamp must be positive");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - static_cast<double>(k + 1) * dt_ns) > 1e-9 * static_cast<double>(k + 1) * dt_ns) {
      throw SchemaError("pulses.row[" + std::to_string(k) + "].t_ns", "time grid is not uniform");
    }
  }
  auto p = PulseSet::zeros(labels, rows.size(), units::ns_to_s(dt_ns));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t j = 0; j < labels.size(); ++j)
      p.amplitudes(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = units::mhz_to_rad_per_s(rows[k][j]);
  return p;
}

void write_pulses_file(const std::string& path, const PulseSet& pulses) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_pulses(out, pulses);
}

PulseSet read_pulses_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("pulses", "cannot open '" + path + "'");
  return read_pulses(in);
}

}  // namespace bincz
