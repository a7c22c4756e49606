#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/params.hpp"

namespace hardy {

enum class Task {
  Exponents,
  MuRN,
  Lambda1,
  Mass,
  ThresholdTruly,
  ThresholdMerely,
  GroundState,
  Robin,
  PohozaevCheck,
  EnergyExpansion,
  FullReport,
};

struct TaskName {
  Task task;
  const char* name;  ///< kebab-case, also the output file stem
};

inline constexpr TaskName kTaskNames[] = {
    {Task::Exponents, "exponents"},
    {Task::MuRN, "mu-rn"},
    {Task::Lambda1, "eigen"},
    {Task::Mass, "mass"},
    {Task::ThresholdTruly, "threshold-truly"},
    {Task::ThresholdMerely, "threshold-merely"},
    {Task::GroundState, "ground-state"},
    {Task::Robin, "robin"},
    {Task::PohozaevCheck, "pohozaev"},
    {Task::EnergyExpansion, "expansion"},
    {Task::FullReport, "report"},
};

inline std::string to_string(Task t) {
  for (const auto& tn : kTaskNames)
    if (tn.task == t) return tn.name;
  return "?";
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

/// lower case with '_' folded to '-', so ThresholdTruly, threshold_truly and
/// threshold-truly all match
inline std::string fold(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '_' || c == '-') {
      out += '-';
    } else if (std::isupper(static_cast<unsigned char>(c)) && i > 0 && std::islower(static_cast<unsigned char>(s[i - 1]))) {
      out += '-';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

}  // namespace detail

inline Task parse_task(std::string_view s) {
  const std::string f = detail::fold(detail::trim(s));
  for (const auto& tn : kTaskNames)
    if (f == tn.name) return tn.task;
  // enum spellings that don't fold onto the file stem
  if (f == "mu-r-n" || f == "murn") return Task::MuRN;
  if (f == "lambda1") return Task::Lambda1;
  if (f == "pohozaev-check") return Task::PohozaevCheck;
  if (f == "energy-expansion") return Task::EnergyExpansion;
  if (f == "full-report") return Task::FullReport;
  fail(ErrorKind::ConfigError, "task: unknown task '" + std::string(s) + "'");
}

struct SweepSpec {
  std::string param;  ///< gamma, s, lambda, radius or pole
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  /// Evenly spaced, endpoints included; a single point sits at lo.
  std::vector<double> points() const {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return v;
  }
};

inline constexpr const char* kSweepParams[] = {"gamma", "s", "lambda", "radius", "pole"};

struct Numerics {
  int radial_nodes = 2001;
  int axi_cells = 256;
  double tol = 1e-8;  ///< ground-state residual; bisection width for the 3-d threshold is max(tol, 1e-4)
  std::uint64_t seed = 20240521;
  int workers = 1;
  bool extrapolate = true;  ///< Richardson on the Robin mass
};

struct RunConfig {
  Task task = Task::FullReport;
  ProblemParams params;
  double pole = 0.0;  ///< Robin pole radius
  std::optional<SweepSpec> sweep;
  Numerics numerics;
  std::set<std::string> modules;  ///< FullReport subset; empty means all

  /// Field-level checks; ProblemParams admissibility is checked per sweep point.
  void validate() const {
    auto bad = [](const std::string& field, const std::string& why) { fail(ErrorKind::ConfigError, field + ": " + why); };
    if (numerics.radial_nodes < 3) bad("numerics.radial_nodes", "must be >= 3");
    if (numerics.axi_cells < 8) bad("numerics.axi_cells", "must be >= 8");
    if (!(numerics.tol > 0.0)) bad("numerics.tol", "must be positive");
    if (numerics.workers < 1) bad("numerics.workers", "must be >= 1");
    static const std::set<std::string> known = {"params", "radial_numerics", "extremals", "spectral",
                                                "mass_threshold", "robin3d", "cli"};
    for (const auto& m : modules)
      if (!known.count(m)) bad("report.modules", "unknown module '" + m + "'");
    if (sweep) {
      const auto& sw = *sweep;
      if (std::find_if(std::begin(kSweepParams), std::end(kSweepParams), [&](const char* p) { return sw.param == p; }) ==
          std::end(kSweepParams))
        bad("sweep.param", "'" + sw.param + "' is not a sweepable parameter (gamma, s, lambda, radius, pole)");
      if (sw.count < 1) bad("sweep.count", "must be >= 1");
      if (!(sw.lo <= sw.hi)) bad("sweep.range", "lo must not exceed hi");
      if (task == Task::FullReport) bad("sweep", "the full report does not sweep");
      for (double x : sw.points()) {
        try {
          at(x).params.validate();
        } catch (const Error& e) {
          bad("sweep.range", "point " + std::to_string(x) + " is inadmissible (" + e.what() + ")");
        }
        if (sw.param == "pole" && !(x >= 0.0 && x < 1.0)) bad("sweep.range", "pole radius must lie in [0, 1)");
      }
    } else if (task != Task::FullReport) {
      try {
        params.validate();
      } catch (const Error& e) {
        bad("problem", e.what());
      }
    }
    if (task == Task::Robin && !(pole >= 0.0 && pole < 1.0)) bad("robin.pole", "must lie in [0, 1)");
  }

  /// The config with the sweep parameter set to x.
  RunConfig at(double x) const {
    RunConfig c = *this;
    c.sweep.reset();
    const std::string& k = sweep->param;
    if (k == "gamma") c.params.gamma = x;
    else if (k == "s") c.params.s = x;
    else if (k == "lambda") c.params.lam = x;
    else if (k == "radius") c.params.ball_radius = x;
    else if (k == "pole") c.pole = x;
    return c;
  }
};

namespace detail {

inline double parse_double(const std::string& field, const std::string& v) {
  double x = 0.0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e) fail(ErrorKind::ConfigError, field + ": expected a number, got '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& field, const std::string& v) {
  long long x = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e) fail(ErrorKind::ConfigError, field + ": expected an integer, got '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& field, const std::string& v) {
  const std::string f = fold(v);
  if (f == "true" || f == "1" || f == "yes") return true;
  if (f == "false" || f == "0" || f == "no") return false;
  fail(ErrorKind::ConfigError, field + ": expected true or false, got '" + v + "'");
}

inline std::string unquote(const std::string& v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) return v.substr(1, v.size() - 2);
  return v;
}

}  // namespace detail

/// Flat key = value text with [section] headers. '#' starts a comment.
/// Sections: top level (task), [problem], [robin], [sweep], [numerics], [report].
inline RunConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  RunConfig cfg;
  SweepSpec sw;
  bool have_sweep = false, have_range = false;
  std::string section, line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::ConfigError, where + ": unterminated section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::set<std::string> sections = {"problem", "robin", "sweep", "numerics", "report"};
      if (!sections.count(section)) fail(ErrorKind::ConfigError, where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ConfigError, where + ": expected key = value");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string val = detail::unquote(detail::trim(std::string_view(line).substr(eq + 1)));
    const std::string field = where + ": " + (section.empty() ? key : section + "." + key);
    auto unknown = [&] { fail(ErrorKind::ConfigError, field + ": unknown key"); };

    if (section.empty()) {
      if (key != "task") unknown();
      try {
        cfg.task = parse_task(val);
      } catch (const Error&) {
        fail(ErrorKind::ConfigError, field + ": unknown task '" + val + "'");
      }
    } else if (section == "problem") {
      if (key == "n") cfg.params.n = static_cast<int>(detail::parse_int(field, val));
      else if (key == "gamma") cfg.params.gamma = detail::parse_double(field, val);
      else if (key == "s") cfg.params.s = detail::parse_double(field, val);
      else if (key == "lambda") cfg.params.lam = detail::parse_double(field, val);
      else if (key == "radius") cfg.params.ball_radius = detail::parse_double(field, val);
      else unknown();
    } else if (section == "robin") {
      if (key == "pole") cfg.pole = detail::parse_double(field, val);
      else if (key == "extrapolate") cfg.numerics.extrapolate = detail::parse_bool(field, val);
      else unknown();
    } else if (section == "sweep") {
      have_sweep = true;
      if (key == "param") sw.param = val;
      else if (key == "lo") sw.lo = detail::parse_double(field, val), have_range = true;
      else if (key == "hi") sw.hi = detail::parse_double(field, val);
      else if (key == "count") sw.count = static_cast<int>(detail::parse_int(field, val));
      else unknown();
    } else if (section == "numerics") {
      if (key == "radial_nodes") cfg.numerics.radial_nodes = static_cast<int>(detail::parse_int(field, val));
      else if (key == "axi_cells") cfg.numerics.axi_cells = static_cast<int>(detail::parse_int(field, val));
      else if (key == "tol") cfg.numerics.tol = detail::parse_double(field, val);
      else if (key == "seed") cfg.numerics.seed = static_cast<std::uint64_t>(detail::parse_int(field, val));
      else if (key == "workers") cfg.numerics.workers = static_cast<int>(detail::parse_int(field, val));
      else unknown();
    } else if (section == "report") {
      if (key != "modules") unknown();
      std::stringstream ss(val);
      std::string m;
      while (std::getline(ss, m, ',')) {
        m = detail::trim(m);
        if (!m.empty()) cfg.modules.insert(m);
      }
    }
  }
  if (have_sweep) {
    if (sw.param.empty()) fail(ErrorKind::ConfigError, source + ": sweep.param: missing");
    if (!have_range) fail(ErrorKind::ConfigError, source + ": sweep.lo: missing");
    cfg.sweep = sw;
  }
  return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, path + ": cannot open");
  return parse_config(in, path);
}

/// param:lo:hi:count, the command-line form of a sweep.
inline SweepSpec parse_sweep(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(detail::trim(p));
  if (parts.size() != 4) fail(ErrorKind::ConfigError, "sweep: expected param:lo:hi:count, got '" + s + "'");
  SweepSpec sw;
  sw.param = parts[0];
  sw.lo = detail::parse_double("sweep.lo", parts[1]);
  sw.hi = detail::parse_double("sweep.hi", parts[2]);
  sw.count = static_cast<int>(detail::parse_int("sweep.count", parts[3]));
  return sw;
}

}  // namespace hardy
