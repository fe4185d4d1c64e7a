#pragma once

// Plain-text grid descriptions and randomized measurement placement.
//
//   # comment
//   name ieee14
//   buses 14
//   lines               # from to [susceptance], buses numbered 1..n
//   1 2 16.90
//   1 5
//   measurements        # optional fixed list; ids are 1-based positions
//   flow 1 2
//   angle 3
//   secure              # optional; measurement ids
//   1 2
//
// Missing susceptances default to 1.0.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gridjam/errors.hpp"
#include "gridjam/grid_model.hpp"

#ifndef GRIDJAM_DATA_DIR
#define GRIDJAM_DATA_DIR ""
#endif

namespace gridjam {

struct CaseLine {
  int from = 0;  // 1-based
  int to = 0;
  double susceptance = 1.0;
};

struct CaseMeasurement {
  MeasurementKind kind = MeasurementKind::LineFlow;
  int bus_i = 0;  // 1-based
  int bus_j = 0;
};

struct CaseFile {
  std::string name;
  int num_buses = 0;
  std::vector<CaseLine> lines;
  std::optional<std::vector<CaseMeasurement>> measurements;
  std::optional<std::vector<MeasurementId>> secure;
};

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline int parse_int(const Token& t, std::size_t line) {
  int v = 0;
  const auto* end = t.text.data() + t.text.size();
  const auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError(line, t.column, "expected an integer, got '" + std::string(t.text) + "'");
  return v;
}

inline double parse_real(const Token& t, std::size_t line) {
  const std::string s(t.text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) throw ParseError(line, t.column, "expected a number, got '" + s + "'");
  return v;
}

}  // namespace detail

inline CaseFile parse_case(std::string_view text) {
  enum class Section { None, Lines, Measurements, Secure };
  CaseFile cf;
  Section section = Section::None;
  bool have_buses = false;
  std::size_t line_no = 0;

  auto check_bus = [&](int bus, std::size_t line, std::size_t column) {
    if (!have_buses) throw ParseError(line, column, "'buses' must come before any bus reference");
    if (bus < 1 || bus > cf.num_buses) {
      throw TopologyError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": bus " +
                          std::to_string(bus) + " outside 1.." + std::to_string(cf.num_buses));
    }
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    const std::string_view head = toks[0].text;

    if (head == "name") {
      if (toks.size() != 2) throw ParseError(line_no, toks[0].column, "'name' takes one word");
      cf.name = std::string(toks[1].text);
      section = Section::None;
      continue;
    }
    if (head == "buses") {
      if (toks.size() != 2) throw ParseError(line_no, toks[0].column, "'buses' takes one count");
      cf.num_buses = detail::parse_int(toks[1], line_no);
      if (cf.num_buses < 1) throw ParseError(line_no, toks[1].column, "bus count must be positive");
      have_buses = true;
      section = Section::None;
      continue;
    }
    if (head == "lines" || head == "measurements" || head == "secure") {
      if (toks.size() != 1) throw ParseError(line_no, toks[1].column, "section header takes no arguments");
      if (head == "lines") {
        section = Section::Lines;
      } else if (head == "measurements") {
        section = Section::Measurements;
        cf.measurements.emplace();
      } else {
        section = Section::Secure;
        cf.secure.emplace();
      }
      continue;
    }

    switch (section) {
      case Section::None:
        throw ParseError(line_no, toks[0].column, "unexpected '" + std::string(head) + "' outside a section");
      case Section::Lines: {
        if (toks.size() < 2 || toks.size() > 3) {
          throw ParseError(line_no, toks[0].column, "line entry is 'from to [susceptance]'");
        }
        CaseLine l;
        l.from = detail::parse_int(toks[0], line_no);
        l.to = detail::parse_int(toks[1], line_no);
        check_bus(l.from, line_no, toks[0].column);
        check_bus(l.to, line_no, toks[1].column);
        if (l.from == l.to) throw TopologyError("line " + std::to_string(line_no) + ": self-loop");
        if (toks.size() == 3) {
          l.susceptance = detail::parse_real(toks[2], line_no);
          if (!(l.susceptance > 0)) throw ParseError(line_no, toks[2].column, "susceptance must be positive");
        }
        cf.lines.push_back(l);
        break;
      }
      case Section::Measurements: {
        CaseMeasurement m;
        if (toks[0].text == "flow" && toks.size() == 3) {
          m.kind = MeasurementKind::LineFlow;
          m.bus_i = detail::parse_int(toks[1], line_no);
          m.bus_j = detail::parse_int(toks[2], line_no);
          check_bus(m.bus_i, line_no, toks[1].column);
          check_bus(m.bus_j, line_no, toks[2].column);
        } else if (toks[0].text == "angle" && toks.size() == 2) {
          m.kind = MeasurementKind::PhaseAngle;
          m.bus_i = detail::parse_int(toks[1], line_no);
          check_bus(m.bus_i, line_no, toks[1].column);
        } else {
          throw ParseError(line_no, toks[0].column, "measurement entry is 'flow i j' or 'angle i'");
        }
        cf.measurements->push_back(m);
        break;
      }
      case Section::Secure:
        for (const auto& t : toks) cf.secure->push_back(detail::parse_int(t, line_no));
        break;
    }
  }

  if (!have_buses) throw ParseError(line_no + 1, 1, "missing 'buses' declaration");
  if (cf.secure) {
    if (!cf.measurements) throw TopologyError("'secure' requires a fixed 'measurements' section");
    const int m = static_cast<int>(cf.measurements->size());
    for (MeasurementId id : *cf.secure) {
      if (id < 1 || id > m) throw TopologyError("secure id " + std::to_string(id) + " outside 1.." + std::to_string(m));
    }
  }
  if (cf.measurements) {
    for (const auto& m : *cf.measurements) {
      if (m.kind != MeasurementKind::LineFlow) continue;
      const bool on_line = std::any_of(cf.lines.begin(), cf.lines.end(), [&](const CaseLine& l) {
        return (l.from == m.bus_i && l.to == m.bus_j) || (l.from == m.bus_j && l.to == m.bus_i);
      });
      if (!on_line) {
        throw TopologyError("flow measurement " + std::to_string(m.bus_i) + "-" + std::to_string(m.bus_j) +
                            " has no line");
      }
    }
  }
  return cf;
}

// Resolves `name_or_path`: an existing file, else <dir>/<name>.case under
// $GRIDJAM_CASE_DIR and then the bundled data directory.
inline std::filesystem::path resolve_case_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return name_or_path;
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("GRIDJAM_CASE_DIR"); env && *env) dirs.emplace_back(env);
  if (std::string_view(GRIDJAM_DATA_DIR).size() > 0) dirs.emplace_back(GRIDJAM_DATA_DIR);
  for (const auto& d : dirs) {
    for (const fs::path candidate : {d / name_or_path, d / (name_or_path + ".case")}) {
      if (fs::is_regular_file(candidate)) return candidate;
    }
  }
  throw Error("case '" + name_or_path + "' not found");
}

inline CaseFile load_case(const std::string& name_or_path) {
  const auto path = resolve_case_path(name_or_path);
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str());
}

namespace detail {

inline Line internal_line(const CaseLine& l) { return {l.from - 1, l.to - 1, l.susceptance}; }

inline double line_susceptance(const CaseFile& cf, int i, int j) {
  for (const auto& l : cf.lines) {
    if ((l.from == i && l.to == j) || (l.from == j && l.to == i)) return l.susceptance;
  }
  throw TopologyError("no line between buses " + std::to_string(i) + " and " + std::to_string(j));
}

// Round half to even under the default floating-point environment.
inline int round_count(double x) { return static_cast<int>(std::nearbyint(x)); }

}  // namespace detail

// System from the case's fixed measurement list (and secure set, if any).
inline MeasurementSystem to_system(const CaseFile& cf) {
  if (!cf.measurements) throw TopologyError("case has no fixed measurement list");
  MeasurementSystem sys;
  sys.num_buses = cf.num_buses;
  for (const auto& l : cf.lines) sys.lines.push_back(detail::internal_line(l));
  MeasurementId id = 1;
  for (const auto& m : *cf.measurements) {
    if (m.kind == MeasurementKind::PhaseAngle) {
      sys.measurements.push_back(Measurement::angle(id++, m.bus_i - 1));
    } else {
      sys.measurements.push_back(
          Measurement::flow(id++, m.bus_i - 1, m.bus_j - 1, detail::line_susceptance(cf, m.bus_i, m.bus_j)));
    }
  }
  if (cf.secure) {
    for (MeasurementId s : *cf.secure) sys.measurements[s - 1].secure = true;
  }
  build_graph(sys);  // throws UnobservableSystem
  return sys;
}

// Flows on every line (ids 1..L in line order), angles on a random
// round(angle_fraction * n) buses (ids L+1.. in bus order), and a random
// round(secure_fraction * m) measurements flagged secure. The reference bus
// never carries an angle measurement.
inline MeasurementSystem place_measurements(const CaseFile& cf, double angle_fraction, double secure_fraction,
                                            std::uint64_t seed) {
  if (!(angle_fraction >= 0 && angle_fraction <= 1) || !(secure_fraction >= 0 && secure_fraction <= 1)) {
    throw Error("placement fractions must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  MeasurementSystem sys;
  sys.num_buses = cf.num_buses;
  MeasurementId id = 1;
  for (const auto& l : cf.lines) {
    sys.lines.push_back(detail::internal_line(l));
    sys.measurements.push_back(Measurement::flow(id++, l.from - 1, l.to - 1, l.susceptance));
  }

  std::vector<int> buses(cf.num_buses);
  std::iota(buses.begin(), buses.end(), 0);
  std::shuffle(buses.begin(), buses.end(), rng);
  const int n_angles = detail::round_count(angle_fraction * cf.num_buses);
  buses.resize(n_angles);
  std::sort(buses.begin(), buses.end());
  for (int b : buses) sys.measurements.push_back(Measurement::angle(id++, b));

  std::vector<int> rows(sys.measurements.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::shuffle(rows.begin(), rows.end(), rng);
  const int n_secure = detail::round_count(secure_fraction * static_cast<double>(rows.size()));
  for (int k = 0; k < n_secure; ++k) sys.measurements[rows[k]].secure = true;

  if (!measurements_connected(sys)) throw UnobservableSystem("placement leaves the system unobservable");
  return sys;
}

}  // namespace gridjam
