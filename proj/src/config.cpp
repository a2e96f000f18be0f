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

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "bincz/errors.hpp"
#include "bincz/hamiltonian.hpp"
#include "bincz/units.hpp"

namespace bincz {

namespace {

constexpr std::string_view kPaperProfile = R"toml(# Measured device parameters. Frequencies in GHz, Kerr and chi in MHz
# (positive magnitudes; the Hamiltonian carries the minus signs), times in us.
# Qubit self_kerr_MHz records the transmon anharmonicity and is not used by
# the two-level model.

[[mode]]
label = "Q1"
kind = "qubit"
dim = 2
freq_GHz = 4.9413
self_kerr_MHz = 160
T1_us = 74
T2_us = 65

[[mode]]
label = "S1"
kind = "cavity"
dim = 12
freq_GHz = 6.1453
self_kerr_MHz = 0.00232
T1_us = 1503
T2_us = 2017

[[mode]]
label = "QC"
kind = "qubit"
dim = 2
freq_GHz = 5.2857
self_kerr_MHz = 153
T1_us = 102
T2_us = 105

[[mode]]
label = "S2"
kind = "cavity"
dim = 12
freq_GHz = 5.5939
self_kerr_MHz = 0.02810
T1_us = 1051
T2_us = 219

[[mode]]
label = "Q2"
kind = "qubit"
dim = 2
freq_GHz = 4.8109
self_kerr_MHz = 160
T1_us = 125
T2_us = 113

[[coupling]]
a = "Q1"
b = "S1"
chi_MHz = 1.025

[[coupling]]
a = "S1"
b = "QC"
chi_MHz = 0.594

[[coupling]]
a = "S1"
b = "S2"
chi_MHz = 0.00955

[[coupling]]
a = "QC"
b = "S2"
chi_MHz = 3.104

[[coupling]]
a = "QC"
b = "Q2"
chi_MHz = 0.0158

[[coupling]]
a = "S2"
b = "Q2"
chi_MHz = 0.524

[drives]
targets = ["Q1", "S1", "QC", "S2", "Q2"]
)toml";

// Minimal TOML reader: [[array]] and [table] headers, string / number /
// string-array values, '#' comments. Enough for the system schema.
using Value = std::variant<double, std::string, std::vector<std::string>>;
using Table = std::map<std::string, Value>;

struct Document {
  std::map<std::string, std::vector<Table>> arrays;
  std::map<std::string, Table> tables;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void syntax_error(std::size_t line_no, const std::string& msg) {
  throw SchemaError("line " + std::to_string(line_no), msg);
}

std::string parse_string(const std::string& text, std::size_t line_no) {
  if (text.size() < 2 || text.front() != '"' || text.back() != '"') {
    syntax_error(line_no, "expected a quoted string, got '" + text + "'");
  }
  return text.substr(1, text.size() - 2);
}

Value parse_value(const std::string& text, std::size_t line_no) {
  if (text.empty()) syntax_error(line_no, "missing value");
  if (text.front() == '"') return parse_string(text, line_no);
  if (text.front() == '[') {
    if (text.back() != ']') syntax_error(line_no, "unterminated array");
    std::vector<std::string> items;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto t = trim(item);
      if (!t.empty()) items.push_back(parse_string(t, line_no));
    }
    return items;
  }
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) syntax_error(line_no, "bad number '" + text + "'");
  return v;
}

Document parse_document(std::string_view text) {
  Document doc;
  Table* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.rfind("[[", 0) == 0) {
      if (line.size() < 4 || line.substr(line.size() - 2) != "]]")
        syntax_error(line_no, "bad array header");
      auto& arr = doc.arrays[trim(line.substr(2, line.size() - 4))];
      arr.emplace_back();
      current = &arr.back();
    } else if (line.front() == '[') {
      if (line.back() != ']') syntax_error(line_no, "bad table header");
      current = &doc.tables[trim(line.substr(1, line.size() - 2))];
    } else {
      const auto eq = line.find('=');
      if (eq == std::string::npos) syntax_error(line_no, "expected key = value");
      if (current == nullptr) syntax_error(line_no, "key outside of any table");
      const auto key = trim(line.substr(0, eq));
      if (current->count(key)) syntax_error(line_no, "duplicate key '" + key + "'");
      (*current)[key] = parse_value(trim(line.substr(eq + 1)), line_no);
    }
  }
  return doc;
}

const Value& require(const Table& t, const std::string& key, const std::string& path) {
  auto it = t.find(key);
  if (it == t.end()) throw SchemaError(path + "." + key, "missing required field");
  return it->second;
}

double get_number(const Table& t, const std::string& key, const std::string& path) {
  const auto& v = require(t, key, path);
  if (!std::holds_alternative<double>(v)) throw SchemaError(path + "." + key, "expected a number");
  return std::get<double>(v);
}

double get_number_or(const Table& t, const std::string& key, const std::string& path, double fallback) {
  return t.count(key) ? get_number(t, key, path) : fallback;
}

std::string get_string(const Table& t, const std::string& key, const std::string& path) {
  const auto& v = require(t, key, path);
  if (!std::holds_alternative<std::string>(v)) throw SchemaError(path + "." + key, "expected a string");
  return std::get<std::string>(v);
}

void check_known_keys(const Table& t, const std::set<std::string>& known, const std::string& path) {
  for (const auto& [key, _] : t)
    if (!known.count(key)) throw SchemaError(path + "." + key, "unknown field");
}

}  // namespace

std::string_view to_string(ModeKind kind) { return kind == ModeKind::cavity ? "cavity" : "qubit"; }

// ---------------------------------------------------------------------------
// SystemSpec

SystemSpec::SystemSpec(std::vector<ModeSpec> modes, std::vector<CouplingSpec> couplings,
                       std::vector<std::string> drive_targets)
    : modes_(std::move(modes)), couplings_(std::move(couplings)), drive_targets_(std::move(drive_targets)) {
  if (modes_.empty()) throw SchemaError("mode", "at least one mode is required");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& m = modes_[i];
    const auto path = "mode[" + std::to_string(i) + "]";
    if (m.label.empty()) throw SchemaError(path + ".label", "empty label");
    if (!labels.insert(m.label).second) throw SchemaError(path + ".label", "duplicate label '" + m.label + "'");
    if (m.dim < 2) throw SchemaError(path + ".dim", "dim must be >= 2");
    if (m.kind == ModeKind::qubit && m.dim != 2) throw SchemaError(path + ".dim", "qubits are two-level");
    if (m.kind == ModeKind::qubit && m.self_kerr != 0.0)
      throw SchemaError(path + ".self_kerr", "qubits carry no self-Kerr term");
    if (!(m.T1 > 0.0)) throw SchemaError(path + ".T1", "must be positive");
    if (!(m.T2 > 0.0)) throw SchemaError(path + ".T2", "must be positive");
    if (std::isfinite(m.T1) && m.T2 > 2.0 * m.T1 * (1.0 + 1e-12))
      throw SchemaError(path + ".T2", "unphysical: T2 exceeds 2*T1");
  }
  for (std::size_t i = 0; i < couplings_.size(); ++i) {
    const auto& c = couplings_[i];
    const auto path = "coupling[" + std::to_string(i) + "]";
    if (!labels.count(c.a)) throw SchemaError(path + ".a", "unknown mode '" + c.a + "'");
    if (!labels.count(c.b)) throw SchemaError(path + ".b", "unknown mode '" + c.b + "'");
    if (c.a == c.b) throw SchemaError(path, "a coupling needs two distinct modes");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = couplings_[j];
      if ((o.a == c.a && o.b == c.b) || (o.a == c.b && o.b == c.a))
        throw SchemaError(path, "duplicate coupling " + c.a + "-" + c.b);
    }
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < drive_targets_.size(); ++i) {
    const auto path = "drives.targets[" + std::to_string(i) + "]";
    if (!labels.count(drive_targets_[i])) throw SchemaError(path, "unknown mode '" + drive_targets_[i] + "'");
    if (!seen.insert(drive_targets_[i]).second) throw SchemaError(path, "duplicate drive target");
  }
}

Dims SystemSpec::dims() const {
  Dims d;
  for (const auto& m : modes_) d.push_back(m.dim);
  return d;
}

std::optional<std::size_t> SystemSpec::find(std::string_view label) const {
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].label == label) return i;
  return std::nullopt;
}

std::size_t SystemSpec::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw SchemaError(std::string(label), "no such mode");
}

double SystemSpec::chi(std::string_view a, std::string_view b) const {
  for (const auto& c : couplings_)
    if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) return c.chi;
  return 0.0;
}

SystemSpec SystemSpec::subsystem(const std::vector<std::string>& labels,
                                 const std::vector<std::string>& drives) const {
  std::vector<ModeSpec> modes;
  for (const auto& l : labels) modes.push_back(mode(l));
  std::vector<CouplingSpec> couplings;
  std::set<std::string> keep(labels.begin(), labels.end());
  for (const auto& c : couplings_)
    if (keep.count(c.a) && keep.count(c.b)) couplings.push_back(c);
  return {std::move(modes), std::move(couplings), drives};
}

SystemSpec SystemSpec::with_drives(const std::vector<std::string>& drives) const {
  return {modes_, couplings_, drives};
}

SystemSpec SystemSpec::with_cavity_dim(std::size_t dim) const {
  auto modes = modes_;
  for (auto& m : modes)
    if (m.kind == ModeKind::cavity) m.dim = dim;
  return {std::move(modes), couplings_, drive_targets_};
}

SystemSpec SystemSpec::with_coherence(std::string_view label, double T1, double T2) const {
  auto modes = modes_;
  auto& m = modes[index_of(label)];
  m.T1 = T1;
  m.T2 = T2;
  return {std::move(modes), couplings_, drive_targets_};
}

// ---------------------------------------------------------------------------
// Loading

SystemSpec load_system(std::string_view document) {
  const auto doc = parse_document(document);
  for (const auto& [name, _] : doc.arrays)
    if (name != "mode" && name != "coupling") throw SchemaError(name, "unknown table array");
  for (const auto& [name, _] : doc.tables)
    if (name != "drives") throw SchemaError(name, "unknown table");

  std::vector<ModeSpec> modes;
  if (auto it = doc.arrays.find("mode"); it != doc.arrays.end()) {
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      const auto& t = it->second[i];
      const auto path = "mode[" + std::to_string(i) + "]";
      check_known_keys(t, {"label", "kind", "dim", "freq_GHz", "self_kerr_MHz", "T1_us", "T2_us"}, path);
      ModeSpec m;
      m.label = get_string(t, "label", path);
      const auto kind = get_string(t, "kind", path);
      if (kind == "cavity") {
        m.kind = ModeKind::cavity;
      } else if (kind == "qubit") {
        m.kind = ModeKind::qubit;
      } else {
        throw SchemaError(path + ".kind", "expected \"cavity\" or \"qubit\"");
      }
      const double dim = get_number_or(t, "dim", path, m.kind == ModeKind::qubit ? 2.0 : 0.0);
      if (dim < 2 || dim != std::floor(dim)) throw SchemaError(path + ".dim", "must be an integer >= 2");
      m.dim = static_cast<std::size_t>(dim);
      m.frequency = units::ghz_to_rad_per_s(get_number(t, "freq_GHz", path));
      const double kerr = units::mhz_to_rad_per_s(get_number_or(t, "self_kerr_MHz", path, 0.0));
      if (kerr < 0) throw SchemaError(path + ".self_kerr_MHz", "store the positive magnitude");
      if (m.kind == ModeKind::cavity) {
        m.self_kerr = kerr;
      } else {
        m.anharmonicity = kerr;
      }
      const double t1 = get_number(t, "T1_us", path);
      const double t2 = get_number(t, "T2_us", path);
      if (!(t1 > 0)) throw SchemaError(path + ".T1_us", "must be positive");
      if (!(t2 > 0)) throw SchemaError(path + ".T2_us", "must be positive");
      m.T1 = units::us_to_s(t1);
      m.T2 = units::us_to_s(t2);
      modes.push_back(std::move(m));
    }
  }
  std::vector<CouplingSpec> couplings;
  if (auto it = doc.arrays.find("coupling"); it != doc.arrays.end()) {
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      const auto& t = it->second[i];
      const auto path = "coupling[" + std::to_string(i) + "]";
      check_known_keys(t, {"a", "b", "chi_MHz"}, path);
      const double chi = get_number(t, "chi_MHz", path);
      if (chi < 0) throw SchemaError(path + ".chi_MHz", "store the positive magnitude");
      couplings.push_back({get_string(t, "a", path), get_string(t, "b", path), units::mhz_to_rad_per_s(chi)});
    }
  }
  std::vector<std::string> drives;
  if (auto it = doc.tables.find("drives"); it != doc.tables.end()) {
    check_known_keys(it->second, {"targets"}, "drives");
    const auto& v = require(it->second, "targets", "drives");
    if (!std::holds_alternative<std::vector<std::string>>(v))
      throw SchemaError("drives.targets", "expected an array of labels");
    drives = std::get<std::vector<std::string>>(v);
  }
  return {std::move(modes), std::move(couplings), std::move(drives)};
}

SystemSpec load_system_from(const std::string& path_or_profile) {
  if (path_or_profile == "paper") return paper_system();
  std::ifstream in(path_or_profile);
  if (!in) throw SchemaError("system", "cannot open '" + path_or_profile + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_system(ss.str());
}

std::string_view paper_profile_document() { return kPaperProfile; }

SystemSpec paper_system() { return load_system(kPaperProfile); }

}  // namespace bincz
