#pragma once

// Table emission and parsing (CSV and JSON) for the command-line tool, plus
// the run manifest written next to every output file.

#include <neqm/core.hpp>
#include <neqm/qm_oracle.hpp>
#include <neqm/solver.hpp>
#include <neqm/wavefunction.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace neqm {

inline constexpr const char* kVersion = "1.0.0";

enum class Format { csv, json };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + s + "' (csv|json)");
}

/// Scientific notation with a bare exponent, e.g. 5.15333e-1: 6 significant
/// digits by default, 17 with `full`.
inline std::string format_number(double x, bool full = false) {
  if (x == 0) return "0";
  if (!std::isfinite(x)) return x != x ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", full ? 16 : 5, x);
  std::string s(buf);
  auto e = s.find('e');
  std::string mant = s.substr(0, e);
  int exp10 = std::stoi(s.substr(e + 1));
  return mant + "e" + std::to_string(exp10);
}

inline double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size())
      throw ContractError("table row length does not match header");
    rows.push_back(std::move(row));
  }
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::invalid_argument("no column '" + name + "'");
  }
  bool operator==(const Table&) const = default;
};

namespace detail {

inline std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

inline std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace detail

/// Header row then data rows, LF line endings, no quoting (cells never
/// contain commas).
inline std::string to_csv(const Table& t) {
  std::string out = detail::join(t.header) + "\n";
  for (const auto& r : t.rows) out += detail::join(r) + "\n";
  return out;
}

inline Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      if (line.empty()) throw std::invalid_argument("csv: missing header");
      t.header = detail::split(line);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    t.add(detail::split(line));
  }
  if (first) throw std::invalid_argument("csv: missing header");
  return t;
}

/// {"columns": [...], "rows": [[...], ...]}; numeric cells become numbers,
/// empty cells null and everything else stays a string.
inline nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json j;
  j["columns"] = t.header;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    auto row = nlohmann::ordered_json::array();
    for (const auto& cell : r) {
      if (cell.empty()) {
        row.push_back(nullptr);
        continue;
      }
      try {
        row.push_back(parse_number(cell));
      } catch (const std::exception&) {
        row.push_back(cell);
      }
    }
    j["rows"].push_back(row);
  }
  return j;
}

inline std::string render(const Table& t, Format f) {
  return f == Format::csv ? to_csv(t) : to_json(t).dump(2) + "\n";
}

// Spectrum: beta, v0, L, samples, state_index, parity, mu, energy,
// marginal_flag

inline Table spectrum_table(const SpectrumTable& s, bool full = false) {
  Table t{{"beta", "v0", "L", "samples", "state_index", "parity", "mu",
           "energy", "marginal_flag"},
          {}};
  for (std::size_t i = 0; i < s.states.size(); ++i) {
    const BoundState& b = s.states[i];
    t.add({format_number(s.params.beta, full), format_number(s.params.v0, full),
           std::to_string(s.config.L), std::to_string(s.config.samples),
           std::to_string(i), to_string(b.parity), format_number(b.mu, full),
           format_number(b.energy, full), detail::flag(b.marginal)});
  }
  return t;
}

struct SpectrumRecord {
  double beta = 0, v0 = 0;
  int L = 0, samples = 0, state_index = 0;
  Parity parity = Parity::even;
  double mu = 0, energy = 0;
  bool marginal = false;

  bool operator==(const SpectrumRecord&) const = default;
};

inline Parity parse_parity(const std::string& s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw std::invalid_argument("bad parity '" + s + "'");
}

inline std::vector<SpectrumRecord> parse_spectrum(const Table& t) {
  std::vector<SpectrumRecord> out;
  for (const auto& r : t.rows) {
    SpectrumRecord s;
    s.beta = parse_number(r.at(t.column("beta")));
    s.v0 = parse_number(r.at(t.column("v0")));
    s.L = std::stoi(r.at(t.column("L")));
    s.samples = std::stoi(r.at(t.column("samples")));
    s.state_index = std::stoi(r.at(t.column("state_index")));
    s.parity = parse_parity(r.at(t.column("parity")));
    s.mu = parse_number(r.at(t.column("mu")));
    s.energy = parse_number(r.at(t.column("energy")));
    s.marginal = r.at(t.column("marginal_flag")) == "1";
    out.push_back(s);
  }
  return out;
}

// Convergence: L, beta, state_index, energy (empty when absent)

inline Table converge_table(const std::vector<ConvergenceRow>& rows,
                            bool full = false) {
  Table t{{"L", "beta", "state_index", "energy"}, {}};
  for (const auto& r : rows) {
    t.add({std::to_string(r.L), format_number(r.beta, full),
           std::to_string(r.state_index),
           r.energy ? format_number(*r.energy, full) : std::string()});
  }
  return t;
}

inline std::vector<ConvergenceRow> parse_converge(const Table& t) {
  std::vector<ConvergenceRow> out;
  for (const auto& r : t.rows) {
    ConvergenceRow c;
    c.L = std::stoi(r.at(t.column("L")));
    c.beta = parse_number(r.at(t.column("beta")));
    c.state_index = std::stoi(r.at(t.column("state_index")));
    const std::string& e = r.at(t.column("energy"));
    if (!e.empty()) c.energy = parse_number(e);
    out.push_back(c);
  }
  return out;
}

// Standard-well spectrum: v0, state_index, parity, k, kappa, energy

inline Table qm_table(double v0, const std::vector<qm::QmState>& states,
                      bool full = false) {
  Table t{{"v0", "state_index", "parity", "k", "kappa", "energy"}, {}};
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    t.add({format_number(v0, full), std::to_string(i), to_string(s.parity),
           format_number(s.k, full), format_number(s.kappa, full),
           format_number(s.energy, full)});
  }
  return t;
}

// Beta sweep, long format: beta, v0, L, state_index, parity, energy,
// upper_bound. Rows with beta = 0 carry the standard-well levels.

inline Table sweep_table(double v0, int L, const std::vector<SweepRow>& rows,
                         bool include_qm = true, bool full = false) {
  Table t{{"beta", "v0", "L", "state_index", "parity", "energy",
           "upper_bound"},
          {}};
  if (include_qm) {
    auto qs = qm::qm_spectrum(v0);
    for (std::size_t i = 0; i < qs.size(); ++i)
      t.add({"0", format_number(v0, full), std::to_string(L),
             std::to_string(i), to_string(qs[i].parity),
             format_number(qs[i].energy, full), format_number(v0, full)});
  }
  for (const auto& r : rows)
    t.add({format_number(r.beta, full), format_number(v0, full),
           std::to_string(L), std::to_string(r.state_index),
           to_string(r.parity), format_number(r.energy, full),
           format_number(r.upper_bound, full)});
  return t;
}

// Wavefunction outputs

inline Table psi_grid_table(const WavefunctionCoefficients& w,
                            const std::vector<double>& xs, bool full = false) {
  Table t{{"x", "psi"}, {}};
  for (double x : xs)
    t.add({format_number(x, full), format_number(eval_psi(x, w), full)});
  return t;
}

inline Table coefficient_table(const WavefunctionCoefficients& w,
                               bool full = false) {
  Table t{{"name", "index", "value"}, {}};
  for (std::size_t i = 0; i < w.A.size(); ++i)
    t.add({"A", std::to_string(i + 1), format_number(to_double(w.A[i]), full)});
  for (std::size_t i = 0; i < w.B.size(); ++i)
    t.add({"B", std::to_string(i + 1), format_number(to_double(w.B[i]), full)});
  return t;
}

inline Table residual_table(const std::vector<Residual>& res,
                            bool full = false) {
  Table t{{"n", "residual"}, {}};
  for (const auto& r : res)
    t.add({std::to_string(r.order), format_number(r.value, full)});
  return t;
}

struct RunManifest {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  unsigned mantissa_bits = 0;
  int samples = 0;
  std::optional<int> L;
  double wall_time_s = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["mantissa_bits"] = mantissa_bits;
    j["samples"] = samples;
    j["L"] = L ? nlohmann::ordered_json(*L) : nlohmann::ordered_json(nullptr);
    j["version"] = kVersion;
    j["wall_time_s"] = wall_time_s;
    j["warnings"] = warnings;
    j["outputs"] = outputs;
    return j;
  }
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string manifest_path(const std::string& out_path) {
  return out_path + ".manifest.json";
}

}  // namespace neqm
