#pragma once

// Flat dotted-key experiment documents:
//
//   # comment
//   model.chi = 0.1
//   domain.kind = radial
//
// One key per line. Unknown keys, duplicate keys and malformed lines are errors.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chemlab/conditions.hpp"
#include "chemlab/error.hpp"
#include "chemlab/model.hpp"
#include "chemlab/solver.hpp"

namespace chemlab::config {

struct Entry {
  std::string value;
  int line = 0;
};

/// Parsed but not yet interpreted document, in key order.
struct Document {
  std::map<std::string, Entry> entries;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  void set(const std::string& key, const std::string& value) {
    auto it = entries.find(key);
    if (it == entries.end())
      entries.emplace(key, Entry{value, 0});
    else
      it->second.value = value;
  }
};

struct ExperimentConfig {
  ModelParams model;
  DomainSpec domain;
  std::vector<std::size_t> resolution;
  Descriptor u0 = CosineBump{};
  Descriptor v0 = Constant{0.5};
  SolverConfig solver;
  double monitor_p = 2.0;
  double C_GN = 1.0;
  conditions::SearchGrid search;
  std::string output_dir = ".";
  bool emit_svg = false;
  bool svg_log_scale = false;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_number(const std::string& key, const Entry& e) {
  double x = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x))
    throw ConfigError(e.line, key + ": expected a number, got '" + e.value + "'");
  return x;
}

inline std::vector<double> to_numbers(const std::string& key, const Entry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(key, Entry{trim(item), e.line}));
  if (out.empty()) throw ConfigError(e.line, key + ": expected a comma-separated list of numbers");
  return out;
}

inline bool to_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError(e.line, key + ": expected true or false, got '" + e.value + "'");
}

/// Reads keys out of a document, remembering which were consumed.
class Reader {
 public:
  explicit Reader(const Document& doc) : doc_(doc) {}

  const Entry* find(const std::string& key) {
    auto it = doc_.entries.find(key);
    if (it == doc_.entries.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }
  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (const Entry* e = find(key)) return to_number(key, *e);
    if (fallback) return *fallback;
    throw ValidationError("missing required key " + key);
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (const Entry* e = find(key)) return to_numbers(key, *e);
    return fallback;
  }
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (const Entry* e = find(key)) return e->value;
    if (fallback) return *fallback;
    throw ValidationError("missing required key " + key);
  }
  bool flag(const std::string& key, bool fallback) {
    if (const Entry* e = find(key)) return to_bool(key, *e);
    return fallback;
  }
  int integer(const std::string& key, int fallback) {
    const Entry* e = find(key);
    if (!e) return fallback;
    const double x = to_number(key, *e);
    if (x != std::floor(x)) throw ConfigError(e->line, key + ": expected an integer");
    return static_cast<int>(x);
  }
  void reject_unused() const {
    for (const auto& [key, e] : doc_.entries)
      if (!used_.count(key)) throw ConfigError(e.line, "unknown key '" + key + "'");
  }

 private:
  const Document& doc_;
  std::set<std::string> used_;
};

inline Descriptor read_descriptor(Reader& r, const std::string& prefix, std::size_t axes, Descriptor fallback) {
  const Entry* kind_entry = r.find(prefix + ".kind");
  if (!kind_entry) return fallback;
  const std::string kind = kind_entry->value;
  if (kind == "constant") return Constant{r.number(prefix + ".value")};
  if (kind == "cosine")
    return CosineBump{r.number(prefix + ".amplitude", 0.5), r.number(prefix + ".baseline", 1.0)};
  if (kind == "gaussian") {
    GaussianBump g;
    g.amplitude = r.number(prefix + ".amplitude", 1.0);
    g.center = r.numbers(prefix + ".center", std::vector<double>(axes, 0.5));
    g.width = r.number(prefix + ".width", 0.1);
    g.baseline = r.number(prefix + ".baseline", 0.1);
    if (g.center.size() != axes)
      throw ValidationError(prefix + ".center needs " + std::to_string(axes) + " entries");
    return g;
  }
  throw ConfigError(kind_entry->line, prefix + ".kind must be constant, cosine or gaussian, got '" + kind + "'");
}

}  // namespace detail

/// Splits text into key/value entries.
inline Document parse_document(std::string_view text) {
  Document doc;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    const std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "empty key");
    if (value.empty()) throw ConfigError(line, key + ": empty value");
    if (key.find_first_of(" \t") != std::string::npos) throw ConfigError(line, "key contains whitespace");
    if (doc.has(key)) throw ConfigError(line, "duplicate key '" + key + "'");
    doc.entries.emplace(key, Entry{value, line});
  }
  return doc;
}

/// Interprets and validates a document.
inline ExperimentConfig interpret(const Document& doc) {
  detail::Reader r(doc);
  ExperimentConfig cfg;

  const Entry* kind_entry = r.find("domain.kind");
  if (!kind_entry) throw ValidationError("missing required key domain.kind");
  const std::string kind = kind_entry->value;
  if (kind == "interval") {
    cfg.domain = DomainSpec::interval(r.number("domain.length", 1.0));
  } else if (kind == "box2") {
    cfg.domain = DomainSpec::box2(r.number("domain.lx", 1.0), r.number("domain.ly", 1.0));
  } else if (kind == "box3") {
    cfg.domain = DomainSpec::box3(r.number("domain.lx", 1.0), r.number("domain.ly", 1.0), r.number("domain.lz", 1.0));
  } else if (kind == "radial") {
    cfg.domain = DomainSpec::radial_ball(r.number("domain.radius", 1.0), r.integer("domain.n", 3));
  } else {
    throw ConfigError(kind_entry->line, "domain.kind must be interval, box2, box3 or radial, got '" + kind + "'");
  }
  cfg.domain.validate();
  const std::size_t axes = cfg.domain.axes();
  auto cells = r.numbers("domain.cells", std::vector<double>(axes, 128.0));
  if (cells.size() == 1 && axes > 1) cells.assign(axes, cells[0]);
  for (double c : cells) {
    if (c != std::floor(c) || c < 4) throw ValidationError("domain.cells entries must be integers >= 4");
    cfg.resolution.push_back(static_cast<std::size_t>(c));
  }
  if (cfg.resolution.size() != axes)
    throw ValidationError("domain.cells needs " + std::to_string(axes) + " entries");

  cfg.model.chi = r.number("model.chi");
  cfg.model.lambda = r.number("model.lambda");
  cfg.model.mu = r.number("model.mu");
  cfg.model.c = r.number("model.c", 0.0);
  cfg.model.n = r.integer("model.n", cfg.domain.dimension());
  if (const Entry* g = r.find("model.gamma"); g && g->value == "critical")
    cfg.model.gamma = conditions::critical_gamma(cfg.model.n);
  else if (g)
    cfg.model.gamma = detail::to_number("model.gamma", *g);
  else
    throw ValidationError("missing required key model.gamma");
  cfg.model.validate();

  cfg.u0 = detail::read_descriptor(r, "initial.u", axes, CosineBump{0.5, 1.0});
  cfg.v0 = detail::read_descriptor(r, "initial.v", axes, Constant{0.5});
  validate_descriptor(cfg.u0, "initial.u");
  validate_descriptor(cfg.v0, "initial.v");

  auto& s = cfg.solver;
  s.t_end = r.number("solver.t_end", s.t_end);
  s.dt_init = r.number("solver.dt_init", s.dt_init);
  s.cfl_safety = r.number("solver.cfl_safety", s.cfl_safety);
  s.dt_min = r.number("solver.dt_min", s.dt_min);
  s.blowup_threshold = r.number("solver.blowup_threshold", s.blowup_threshold);
  s.record_every = r.number("solver.record_every", s.record_every);
  const std::string scheme = r.text("solver.scheme", "upwind");
  if (scheme == "upwind")
    s.advection_scheme = AdvectionScheme::Upwind;
  else if (scheme == "central")
    s.advection_scheme = AdvectionScheme::Central;
  else
    throw ValidationError("solver.scheme must be upwind or central");
  s.validate();

  cfg.monitor_p = r.number("monitor.p", 2.0);
  if (!(cfg.monitor_p > 1.0)) throw ValidationError("monitor.p must be > 1");
  cfg.C_GN = r.number("conditions.c_gn", 1.0);
  if (!(cfg.C_GN > 0.0)) throw ValidationError("conditions.c_gn must be positive");
  cfg.search.p_points = r.integer("conditions.search_p_points", cfg.search.p_points);
  cfg.search.eta_points = r.integer("conditions.search_eta_points", cfg.search.eta_points);
  if (cfg.search.p_points < 1 || cfg.search.eta_points < 1)
    throw ValidationError("search grid sizes must be positive");

  cfg.output_dir = r.text("output.dir", ".");
  cfg.emit_svg = r.flag("output.svg", false);
  cfg.svg_log_scale = r.flag("output.log_scale", false);

  r.reject_unused();
  return cfg;
}

inline ExperimentConfig parse_config(std::string_view text) { return interpret(parse_document(text)); }

/// Keys that hold a single number and may be swept.
inline bool is_numeric_scalar_key(const std::string& key) {
  static const std::set<std::string> keys = {
      "model.chi", "model.lambda", "model.mu", "model.c", "model.gamma",
      "domain.length", "domain.lx", "domain.ly", "domain.lz", "domain.radius",
      "initial.u.value", "initial.u.amplitude", "initial.u.baseline", "initial.u.width",
      "initial.v.value", "initial.v.amplitude", "initial.v.baseline", "initial.v.width",
      "conditions.c_gn",
  };
  return keys.count(key) != 0;
}

}  // namespace chemlab::config
