// Run configuration: a JSON document with unit-tagged frequencies.
//
//   {"schema_version": 1, "scenario": "cavity-scan",
//    "medium": {"delta": "3.97 MHz", "gamma_line": {"value": 1e6, "unit": "hz"},
//               "wavelength_m": 780e-9, "m": "wlc"}, ...}
//
// Every frequency-like field must say whether it is cyclic (Hz, kHz, MHz, GHz,
// THz, or "hz") or angular ("rad/s" or "rad_s"). Bare numbers are rejected.
// Values are stored in rad/s.
#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wlc/amplitude.hpp"
#include "wlc/cavity.hpp"
#include "wlc/condition.hpp"
#include "wlc/errors.hpp"
#include "wlc/monte_carlo.hpp"
#include "wlc/noise.hpp"
#include "wlc/sensitivity.hpp"
#include "wlc/units.hpp"

namespace wlc::cli {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

/// Invalid configuration, with a JSON path to the offending field.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& path, const std::string& msg) : ValidationError(path + ": " + msg), path_(path) {}
  const char* kind() const noexcept override { return "config"; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class Scenario { medium_scan, wlc_solve, sensitivity, mc_noise, cavity_scan, budget };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::medium_scan: return "medium-scan";
    case Scenario::wlc_solve: return "wlc-solve";
    case Scenario::sensitivity: return "sensitivity";
    case Scenario::mc_noise: return "mc-noise";
    case Scenario::cavity_scan: return "cavity-scan";
    case Scenario::budget: return "budget";
  }
  return "?";
}

inline std::optional<Scenario> scenario_from_string(std::string_view s) {
  for (Scenario v : {Scenario::medium_scan, Scenario::wlc_solve, Scenario::sensitivity, Scenario::mc_noise,
                     Scenario::cavity_scan, Scenario::budget})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

/// Medium block before any solving. Coupling is either explicit (m, or m1
/// and m2) or "wlc" for the symmetric coupling that meets the condition.
struct MediumSpec {
  std::optional<double> m1, m2;
  bool coupling_from_wlc = false;
  std::optional<double> delta;
  std::optional<double> gamma_line;
  std::optional<double> gamma_line2;
  double nu0 = 0.0;
};

enum class SolveFor { coupling, splitting };

struct WlcSpec {
  SolveFor solve = SolveFor::coupling;
  RootBranch root = RootBranch::smaller;
  std::optional<std::pair<double, double>> restore;  // phase-noise widths (d1, d2)
};

struct ScanSpec {
  std::optional<double> center;  // absent: the natural centre of the scenario
  double span = 0.0;
  std::size_t points = 0;
};

struct McSpec {
  std::size_t n_traj = 2000;
  double t_end = 20.0;
  double dt = 0.0;
  std::optional<std::uint64_t> seed;
};

struct DeviationSpec {
  double rel_intensity1 = 0.0, rel_intensity2 = 0.0, rel_density = 0.0;
  double dnu1 = 0.0, dnu2 = 0.0;
};

struct AnalysisSpec {
  double ripple_band_factor = 4.0;
  double bandwidth_span_factor = 40.0;
  std::size_t bandwidth_points = 8001;
};

struct OutputSpec {
  std::string dir = ".";
  std::string stem;  // defaults to the scenario name
};

struct RunConfig {
  Scenario scenario = Scenario::medium_scan;
  json echo;  // the document as parsed
  std::optional<MediumSpec> medium;
  WlcSpec wlc;
  std::optional<CavityParams> cavity;
  NoiseParams noise;
  NoiseKind noise_kind = NoiseKind::none;
  ThreeLevelParams three_level;
  std::optional<ScanSpec> scan;
  McSpec mc;
  DeviationSpec deviations;
  double budget_target = 1e-4;
  AnalysisSpec analysis;
  OutputSpec output;
};

namespace detail {

struct UnitScale {
  std::string_view name;
  double to_rad_s;
};

inline constexpr UnitScale frequency_units[] = {
    {"hz", two_pi},        {"Hz", two_pi},        {"kHz", two_pi * 1e3}, {"MHz", two_pi * 1e6},
    {"GHz", two_pi * 1e9}, {"THz", two_pi * 1e12}, {"rad_s", 1.0},       {"rad/s", 1.0},
};

inline std::optional<double> unit_scale(std::string_view unit) {
  for (const auto& u : frequency_units)
    if (u.name == unit) return u.to_rad_s;
  return std::nullopt;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

inline double parse_frequency(const json& v, const std::string& path) {
  const char* hint = " (write e.g. \"3.97 MHz\", \"2.5e7 rad/s\" or {\"value\": 3.97e6, \"unit\": \"hz\"})";
  if (v.is_number()) throw ConfigError(path, std::string("frequency is missing its unit tag") + hint);
  double value = 0.0;
  std::string unit;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const std::string_view sv = trim(s);
    const auto [end, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (ec != std::errc{}) throw ConfigError(path, "cannot read a number from \"" + s + "\"");
    unit = std::string(trim(std::string_view(end, sv.data() + sv.size() - end)));
    if (unit.empty()) throw ConfigError(path, std::string("frequency is missing its unit tag") + hint);
  } else if (v.is_object()) {
    for (const auto& [k, _] : v.items())
      if (k != "value" && k != "unit") throw ConfigError(path + "." + k, "unknown key");
    if (!v.contains("value") || !v["value"].is_number()) throw ConfigError(path + ".value", "expected a number");
    if (!v.contains("unit") || !v["unit"].is_string())
      throw ConfigError(path + ".unit", std::string("frequency is missing its unit tag") + hint);
    value = v["value"].get<double>();
    unit = v["unit"].get<std::string>();
  } else {
    throw ConfigError(path, std::string("expected a tagged frequency") + hint);
  }
  const auto scale = unit_scale(unit);
  if (!scale) throw ConfigError(path, "unknown unit \"" + unit + "\" (use Hz, kHz, MHz, GHz, THz, hz, rad/s or rad_s)");
  if (!std::isfinite(value)) throw ConfigError(path, "value must be finite");
  return value * *scale;
}

/// An object node that records which keys were read, so leftovers can be
/// reported as unknown.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  std::optional<double> frequency(const std::string& key) {
    if (!take(key)) return std::nullopt;
    return parse_frequency(j_[key], at(key));
  }
  double require_frequency(const std::string& key) {
    if (!has(key)) throw ConfigError(at(key), "required");
    return *frequency(key);
  }
  std::optional<double> number(const std::string& key) {
    if (!take(key)) return std::nullopt;
    if (!j_[key].is_number()) throw ConfigError(at(key), "expected a number");
    const double v = j_[key].get<double>();
    if (!std::isfinite(v)) throw ConfigError(at(key), "value must be finite");
    return v;
  }
  std::optional<std::uint64_t> unsigned_integer(const std::string& key) {
    if (!take(key)) return std::nullopt;
    const json& v = j_[key];
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(at(key), "expected a non-negative integer");
  }
  std::optional<std::string> string(const std::string& key) {
    if (!take(key)) return std::nullopt;
    if (!j_[key].is_string()) throw ConfigError(at(key), "expected a string");
    return j_[key].get<std::string>();
  }
  std::optional<Node> object(const std::string& key) {
    if (!take(key)) return std::nullopt;
    return Node(j_[key], at(key));
  }
  const json& raw(const std::string& key) {
    take(key);
    return j_[key];
  }

  /// Throws on the first key that was never read.
  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!used_.count(k)) throw ConfigError(at(k), "unknown key");
  }

 private:
  bool take(const std::string& key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline MediumSpec parse_medium(Node n) {
  MediumSpec m;
  if (n.has("m") && (n.has("m1") || n.has("m2"))) throw ConfigError(n.at("m"), "give either m or m1/m2, not both");
  if (n.has("m")) {
    const json& v = n.raw("m");
    if (v.is_string() && v.get<std::string>() == "wlc") m.coupling_from_wlc = true;
    else m.m1 = m.m2 = parse_frequency(v, n.at("m"));
  } else {
    m.m1 = n.frequency("m1");
    m.m2 = n.frequency("m2");
    if (m.m1.has_value() != m.m2.has_value()) throw ConfigError(n.at(m.m1 ? "m2" : "m1"), "m1 and m2 come together");
  }
  m.delta = n.frequency("delta");
  m.gamma_line = n.frequency("gamma_line");
  m.gamma_line2 = n.frequency("gamma_line2");
  const auto nu0 = n.frequency("nu0");
  const auto lambda = n.number("wavelength_m");
  if (nu0.has_value() == lambda.has_value()) throw ConfigError(n.at("nu0"), "give exactly one of nu0 or wavelength_m");
  if (lambda && !(*lambda > 0.0)) throw ConfigError(n.at("wavelength_m"), "must be > 0");
  m.nu0 = nu0 ? *nu0 : angular_frequency_from_wavelength(*lambda);
  n.finish();
  return m;
}

inline WlcSpec parse_wlc(Node n) {
  WlcSpec w;
  if (auto s = n.string("solve")) {
    if (*s == "coupling") w.solve = SolveFor::coupling;
    else if (*s == "splitting") w.solve = SolveFor::splitting;
    else throw ConfigError(n.at("solve"), "expected \"coupling\" or \"splitting\"");
  }
  if (auto r = n.string("root")) {
    if (*r == "smaller") w.root = RootBranch::smaller;
    else if (*r == "larger") w.root = RootBranch::larger;
    else throw ConfigError(n.at("root"), "expected \"smaller\" or \"larger\"");
  }
  if (auto r = n.object("restore")) {
    const double d1 = r->require_frequency("d1");
    const double d2 = r->require_frequency("d2");
    r->finish();
    w.restore = {d1, d2};
  }
  n.finish();
  return w;
}

inline CavityParams parse_cavity(Node n) {
  CavityParams c;
  c.length = n.number("length_m").value_or(0.1);
  c.fill_length = n.number("fill_length_m").value_or(c.length);
  const auto f = n.number("finesse");
  const auto r = n.number("r_amp");
  const auto t = n.number("t_amp");
  if (f && (r || t)) throw ConfigError(n.at("finesse"), "give either finesse or r_amp/t_amp");
  if (f) {
    c.r_amp = reflectivity_for_finesse(*f);
    c.t_amp = std::sqrt(1.0 - c.r_amp * c.r_amp);
  } else if (r) {
    c.r_amp = *r;
    c.t_amp = t.value_or(std::sqrt(std::max(0.0, 1.0 - *r * *r)));
  } else {
    c.r_amp = reflectivity_for_finesse(300.0);
    c.t_amp = std::sqrt(1.0 - c.r_amp * c.r_amp);
  }
  n.finish();
  try {
    validate(c);
  } catch (const ValidationError& e) {
    throw ConfigError(n.path(), e.what());
  }
  return c;
}

inline void parse_noise(Node n, RunConfig& cfg) {
  if (auto k = n.string("kind")) {
    if (*k == "none") cfg.noise_kind = NoiseKind::none;
    else if (*k == "phase") cfg.noise_kind = NoiseKind::phase;
    else if (*k == "amplitude") cfg.noise_kind = NoiseKind::amplitude;
    else if (*k == "both") cfg.noise_kind = NoiseKind::both;
    else throw ConfigError(n.at("kind"), "expected none, phase, amplitude or both");
  }
  NoiseParams& p = cfg.noise;
  p.d1 = n.frequency("d1").value_or(0.0);
  p.d2 = n.frequency("d2").value_or(0.0);
  p.a1 = n.frequency("a1").value_or(0.0);
  p.a2 = n.frequency("a2").value_or(0.0);
  p.i_omega1 = n.frequency("i_omega1").value_or(0.0);
  p.i_omega2 = n.frequency("i_omega2").value_or(0.0);
  // Amplitude-noise strength as the weight I A / Omega^2 instead of I.
  if (auto w = n.number("weight1")) {
    if (n.has("i_omega1")) throw ConfigError(n.at("weight1"), "give either weight1 or i_omega1");
    if (!(p.a1 > 0.0)) throw ConfigError(n.at("a1"), "required and > 0 with weight1");
    p.i_omega1 = *w * cfg.three_level.omega1 * cfg.three_level.omega1 / p.a1;
  }
  if (auto w = n.number("weight2")) {
    if (n.has("i_omega2")) throw ConfigError(n.at("weight2"), "give either weight2 or i_omega2");
    if (!cfg.three_level.omega2) throw ConfigError(n.at("weight2"), "needs three_level.omega2");
    if (!(p.a2 > 0.0)) throw ConfigError(n.at("a2"), "required and > 0 with weight2");
    p.i_omega2 = *w * *cfg.three_level.omega2 * *cfg.three_level.omega2 / p.a2;
  }
  n.finish();
  try {
    validate(p);
  } catch (const ValidationError& e) {
    throw ConfigError(n.path(), e.what());
  }
}

inline ThreeLevelParams parse_three_level(Node n) {
  ThreeLevelParams p;
  if (auto v = n.frequency("delta0")) p.delta0 = *v;
  if (auto v = n.frequency("delta1")) p.delta1 = *v;
  if (auto v = n.frequency("omega1")) p.omega1 = *v;
  if (auto v = n.frequency("omega_p")) p.omega_p = *v;
  if (auto v = n.frequency("gamma_b")) p.gamma_b = *v;
  p.delta2 = n.frequency("delta2");
  p.omega2 = n.frequency("omega2");
  p.delta_p = p.delta1;
  n.finish();
  return p;
}

inline ScanSpec parse_scan(Node n) {
  ScanSpec s;
  s.center = n.frequency("center");
  s.span = n.require_frequency("span");
  const auto pts = n.unsigned_integer("points");
  if (!pts) throw ConfigError(n.at("points"), "required");
  if (*pts < 2) throw ConfigError(n.at("points"), "must be >= 2");
  if (!(s.span > 0.0)) throw ConfigError(n.at("span"), "must be > 0");
  s.points = static_cast<std::size_t>(*pts);
  n.finish();
  return s;
}

inline McSpec parse_mc(Node n) {
  McSpec m;
  if (auto v = n.unsigned_integer("n_traj")) m.n_traj = static_cast<std::size_t>(*v);
  if (auto v = n.number("t_end")) m.t_end = *v;
  if (auto v = n.number("dt")) m.dt = *v;
  m.seed = n.unsigned_integer("seed");
  n.finish();
  if (m.n_traj < 100) throw ConfigError(n.at("n_traj"), "must be >= 100");
  if (!(m.t_end > 0.0)) throw ConfigError(n.at("t_end"), "must be > 0");
  if (m.dt < 0.0) throw ConfigError(n.at("dt"), "must be >= 0 (0 picks the step automatically)");
  return m;
}

inline DeviationSpec parse_deviations(Node n) {
  DeviationSpec d;
  d.rel_intensity1 = n.number("rel_intensity1").value_or(0.0);
  d.rel_intensity2 = n.number("rel_intensity2").value_or(0.0);
  d.rel_density = n.number("rel_density").value_or(0.0);
  d.dnu1 = n.frequency("dnu1").value_or(0.0);
  d.dnu2 = n.frequency("dnu2").value_or(0.0);
  n.finish();
  return d;
}

inline AnalysisSpec parse_analysis(Node n) {
  AnalysisSpec a;
  if (auto v = n.number("ripple_band_factor")) a.ripple_band_factor = *v;
  if (auto v = n.number("bandwidth_span_factor")) a.bandwidth_span_factor = *v;
  if (auto v = n.unsigned_integer("bandwidth_points")) a.bandwidth_points = static_cast<std::size_t>(*v);
  n.finish();
  if (!(a.ripple_band_factor > 0.0)) throw ConfigError(n.at("ripple_band_factor"), "must be > 0");
  if (!(a.bandwidth_span_factor > 0.0)) throw ConfigError(n.at("bandwidth_span_factor"), "must be > 0");
  if (a.bandwidth_points < 8) throw ConfigError(n.at("bandwidth_points"), "must be >= 8");
  return a;
}

inline void require_block(bool present, const std::string& path, Scenario s) {
  if (!present) throw ConfigError(path, std::string("required for scenario ") + to_string(s));
}

}  // namespace detail

inline RunConfig parse_config_json(const json& doc) {
  using detail::Node;
  RunConfig cfg;
  cfg.echo = doc;
  Node root(doc, "$");

  const auto version = root.unsigned_integer("schema_version");
  if (!version) throw ConfigError("$.schema_version", "required");
  if (*version != schema_version) throw ConfigError("$.schema_version", "unsupported version " + std::to_string(*version));
  const auto scenario = root.string("scenario");
  if (!scenario) throw ConfigError("$.scenario", "required");
  const auto s = scenario_from_string(*scenario);
  if (!s) throw ConfigError("$.scenario", "unknown scenario \"" + *scenario + "\"");
  cfg.scenario = *s;

  if (auto n = root.object("medium")) cfg.medium = detail::parse_medium(*n);
  if (auto n = root.object("wlc")) cfg.wlc = detail::parse_wlc(*n);
  if (auto n = root.object("cavity")) cfg.cavity = detail::parse_cavity(*n);
  if (auto n = root.object("three_level")) cfg.three_level = detail::parse_three_level(*n);
  // Noise weights refer to the drive Rabi frequencies, so three_level comes first.
  if (auto n = root.object("noise")) detail::parse_noise(*n, cfg);
  if (auto n = root.object("scan")) cfg.scan = detail::parse_scan(*n);
  const bool has_mc = root.has("mc");
  if (auto n = root.object("mc")) cfg.mc = detail::parse_mc(*n);
  if (auto n = root.object("deviations")) cfg.deviations = detail::parse_deviations(*n);
  if (auto n = root.object("tolerances")) cfg.deviations = detail::parse_deviations(*n);
  if (auto t = root.number("target")) {
    if (!(*t > 0.0)) throw ConfigError("$.target", "must be > 0");
    cfg.budget_target = *t;
  }
  if (auto n = root.object("analysis")) cfg.analysis = detail::parse_analysis(*n);
  if (auto n = root.object("output")) {
    if (auto d = n->string("dir")) cfg.output.dir = *d;
    if (auto st = n->string("stem")) cfg.output.stem = *st;
    n->finish();
  }
  root.finish();
  if (cfg.output.stem.empty()) cfg.output.stem = to_string(cfg.scenario);

  switch (cfg.scenario) {
    case Scenario::medium_scan:
      detail::require_block(cfg.medium.has_value(), "$.medium", cfg.scenario);
      detail::require_block(cfg.scan.has_value(), "$.scan", cfg.scenario);
      break;
    case Scenario::wlc_solve:
    case Scenario::sensitivity:
    case Scenario::budget:
      detail::require_block(cfg.medium.has_value(), "$.medium", cfg.scenario);
      break;
    case Scenario::mc_noise:
      detail::require_block(has_mc, "$.mc", cfg.scenario);
      detail::require_block(cfg.scan.has_value(), "$.scan", cfg.scenario);
      break;
    case Scenario::cavity_scan:
      detail::require_block(cfg.scan.has_value(), "$.scan", cfg.scenario);
      detail::require_block(cfg.medium.has_value() || cfg.scan->center.has_value(), "$.scan.center", cfg.scenario);
      break;
  }
  return cfg;
}

inline RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("not valid JSON: ") + e.what());
  }
  return parse_config_json(doc);
}

}  // namespace wlc::cli
