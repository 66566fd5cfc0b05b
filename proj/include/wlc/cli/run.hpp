// Scenario dispatch for the command-line tool.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlc/cavity.hpp"
#include "wlc/cli/config.hpp"
#include "wlc/cli/io.hpp"
#include "wlc/condition.hpp"
#include "wlc/fitting.hpp"
#include "wlc/medium.hpp"
#include "wlc/monte_carlo.hpp"
#include "wlc/sensitivity.hpp"
#include "wlc/version.hpp"

namespace wlc::cli {

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<RootBranch> root;
  unsigned threads = 1;
};

struct RunResult {
  json report;
  std::vector<std::string> files;
};

namespace detail {

inline json params_json(const MediumParams& p) {
  json j{{"m1_rad_s", p.m1},
         {"m2_rad_s", p.m2},
         {"delta_rad_s", p.delta},
         {"gamma_line_rad_s", p.gamma_line},
         {"nu0_rad_s", p.nu0}};
  if (p.gamma_line2) j["gamma_line2_rad_s"] = *p.gamma_line2;
  return j;
}

inline json report_json(const DeviationReport& r) {
  json j{{"rel_dispersion", r.rel_dispersion}, {"rel_absorption", r.rel_absorption}, {"delta_n", r.delta_n}};
  j["abs_absorption_per_m"] = r.abs_absorption ? json(*r.abs_absorption) : json(nullptr);
  return j;
}

inline double require_value(const std::optional<double>& v, const char* path) {
  if (!v) throw ConfigError(path, "required for this scenario");
  return *v;
}

/// Medium with the coupling resolved, before any noise restoration.
inline MediumParams base_medium(const MediumSpec& m) {
  MediumParams p;
  p.delta = require_value(m.delta, "$.medium.delta");
  p.gamma_line = require_value(m.gamma_line, "$.medium.gamma_line");
  p.gamma_line2 = m.gamma_line2;
  p.nu0 = m.nu0;
  if (m.coupling_from_wlc) {
    if (p.symmetric_widths()) {
      p.m1 = p.m2 = solve_coupling_for_wlc(p.delta, p.gamma_line, p.nu0);
    } else {
      p.m1 = p.m2 = 1.0;
      p.m1 = p.m2 = -1.0 / (p.nu0 * dispersion_at_center(p));
    }
  } else {
    p.m1 = require_value(m.m1, "$.medium.m");
    p.m2 = require_value(m.m2, "$.medium.m");
  }
  return p;
}

inline MediumParams resolve_medium(const RunConfig& cfg) {
  MediumParams p = base_medium(*cfg.medium);
  validate_lineshape(p);
  if (cfg.wlc.restore) p = restore_wlc_under_phase_noise(p, cfg.wlc.restore->first, cfg.wlc.restore->second);
  return p;
}

inline json metadata(const RunConfig& cfg) {
  return {{"tool", "wlc"},
          {"version", version},
          {"schema_version", schema_version},
          {"scenario", to_string(cfg.scenario)},
          {"config", cfg.echo}};
}

struct Outputs {
  std::filesystem::path dir;
  std::string stem;
  std::vector<std::string> files;

  void write(const std::string& ext, const std::string& text) {
    const std::filesystem::path p = dir / (stem + ext);
    write_text(p, text);
    files.push_back(p.string());
  }
};

inline json run_medium_scan(const RunConfig& cfg, Outputs& out) {
  const MediumParams p = resolve_medium(cfg);
  const ScanSpec& s = *cfg.scan;
  const double center_offset = s.center ? *s.center - p.nu0 : 0.0;
  const ComplexCurve curve = doublet_lines(p).scan(Axis::centered(center_offset, s.span, s.points));
  out.write(".csv", csv_complex(curve));
  return {{"params", params_json(p)},
          {"refractive_index_at_center", refractive_index(p, p.nu0)},
          {"absorption_at_center_per_m", absorption_coefficient(p, p.nu0)},
          {"dispersion_at_center_s", dispersion_at_center(p)},
          {"wlc_residual", wlc_residual(p)},
          {"points", curve.size()}};
}

inline json run_wlc_solve(const RunConfig& cfg, const RunOptions& opt) {
  const MediumSpec& m = *cfg.medium;
  MediumParams p;
  p.nu0 = m.nu0;
  p.gamma_line = require_value(m.gamma_line, "$.medium.gamma_line");
  json r;
  if (cfg.wlc.solve == SolveFor::coupling) {
    p.delta = require_value(m.delta, "$.medium.delta");
    p.m1 = p.m2 = solve_coupling_for_wlc(p.delta, p.gamma_line, p.nu0);
    r["solved_for"] = "coupling";
  } else {
    const double mm = require_value(m.m1, "$.medium.m");
    if (!m.m2 || *m.m2 != mm) throw ConfigError("$.medium.m", "splitting solve needs a symmetric coupling m");
    const RootBranch branch = opt.root.value_or(cfg.wlc.root);
    p.m1 = p.m2 = mm;
    p.delta = solve_splitting_for_wlc(mm, p.gamma_line, p.nu0, branch);
    r["solved_for"] = "splitting";
    r["root"] = branch == RootBranch::smaller ? "smaller" : "larger";
  }
  r["params"] = params_json(p);
  r["wlc_residual"] = wlc_residual(p);
  if (cfg.wlc.restore) {
    const MediumParams q = restore_wlc_under_phase_noise(p, cfg.wlc.restore->first, cfg.wlc.restore->second);
    r["restored"] = {{"d1_rad_s", cfg.wlc.restore->first},
                     {"d2_rad_s", cfg.wlc.restore->second},
                     {"params", params_json(q)},
                     {"wlc_residual", wlc_residual(q)}};
  }
  return r;
}

inline json run_sensitivity(const RunConfig& cfg) {
  const MediumParams p = resolve_medium(cfg);
  const DriveFrequencyCoefficients c = drive_frequency_coefficients(p);
  const DeviationSpec& d = cfg.deviations;
  json r;
  r["params"] = params_json(p);
  r["wlc_residual"] = wlc_residual(p);
  // Per-rad/s values are native. Per-Hz values multiply by 2 pi: a drive
  // shift of 1 Hz is 2 pi rad/s.
  r["coefficients"] = {
      {"delta_n_per_sum", {{"per_rad_s", c.dn_per_sum}, {"per_hz", two_pi * c.dn_per_sum}}},
      {"delta_alpha_per_diff", {{"per_rad_s", c.dalpha_per_diff}, {"per_hz", two_pi * c.dalpha_per_diff}}},
      {"rel_dispersion_per_diff", {{"per_rad_s", c.rel_disp_per_diff}, {"per_hz", two_pi * c.rel_disp_per_diff}}},
  };
  r["intensity"] = report_json(deviation_from_intensity(p, d.rel_intensity1, d.rel_intensity2));
  r["density"] = report_json(deviation_from_density(p, d.rel_density));
  r["drive_frequency"] = report_json(deviation_from_drive_frequency(p, d.dnu1, d.dnu2));
  const double eps = 1e-6;
  const double shift = p.gamma_line;
  r["linearization_max_rel_error"] = {
      {"intensity", validate_linearization(p, {PerturbationKind::intensity, 1.0, 0.5}, eps).max_rel_error},
      {"density", validate_linearization(p, {PerturbationKind::density, 1.0, 0.0}, eps).max_rel_error},
      {"drive_frequency",
       validate_linearization(p, {PerturbationKind::drive_frequency, shift, -0.5 * shift}, eps).max_rel_error},
  };
  return r;
}

inline json run_budget(const RunConfig& cfg) {
  const MediumParams p = resolve_medium(cfg);
  const DeviationSpec& d = cfg.deviations;
  const BudgetReport b = dispersion_budget(p, {d.rel_intensity1, d.rel_intensity2, d.rel_density, d.dnu1, d.dnu2},
                                           cfg.budget_target);
  return {{"params", params_json(p)},
          {"from_intensity", b.from_intensity},
          {"from_density", b.from_density},
          {"from_drive_frequency", b.from_drive_frequency},
          {"worst_case_rel_dispersion", b.worst_case_rel_dispersion},
          {"target", b.target},
          {"within_target", b.within_target}};
}

inline json run_mc_noise(const RunConfig& cfg, const RunOptions& opt, Outputs& out) {
  const std::optional<std::uint64_t> seed = opt.seed ? opt.seed : cfg.mc.seed;
  if (!seed) throw ConfigError("$.mc.seed", "required for Monte Carlo runs (or pass --seed)");
  const ThreeLevelParams& p = cfg.three_level;
  const ScanSpec& s = *cfg.scan;
  const Axis axis = Axis::centered(s.center.value_or(p.delta1), s.span, s.points);

  McSettings st;
  st.n_traj = cfg.mc.n_traj;
  st.t_end = cfg.mc.t_end;
  st.dt = cfg.mc.dt;
  st.seed = *seed;
  st.threads = opt.threads;
  const McResult res = estimate_susceptibility_mc(p, cfg.noise, cfg.noise_kind, axis, st);
  out.write(".csv", csv_complex_with_error(res.mean, res.std_error));

  json r;
  r["seed"] = *seed;
  r["n_traj"] = st.n_traj;
  r["used"] = res.used;
  r["discarded"] = res.discarded;
  r["t_end"] = st.t_end;
  r["dt"] = res.dt;
  r["n_steps"] = res.n_steps;
  r["susceptibility_scale"] = res.scale;
  r["noise_kind"] = to_string(cfg.noise_kind);
  r["warnings"] = res.warnings;
  if (cfg.noise_kind == NoiseKind::both)
    r["notes"] = json::array({"combined phase and amplitude noise is an extension beyond the separate analyses"});

  const LineSet ref = mc_reference_lines(p, cfg.noise, cfg.noise_kind, res.scale);
  json lines = json::array();
  for (const auto& l : ref.lines)
    lines.push_back({{"strength", l.strength}, {"center_rad_s", l.center}, {"half_width_rad_s", l.width}});
  r["reference_lines"] = lines;

  if (!p.delta2) {
    std::vector<double> x(res.mean.size()), y(res.mean.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = res.mean.nu(k);
      y[k] = res.mean.values[k].imag();
    }
    const LorentzianFit f = fit_lorentzian(x, y);
    r["fit"] = {{"amplitude", f.amplitude},
                {"center_rad_s", f.center},
                {"half_width_rad_s", f.half_width},
                {"rms_residual", f.rms_residual},
                {"grid_fallback", f.used_grid_fallback}};
    const bool amplitude = cfg.noise_kind == NoiseKind::amplitude || cfg.noise_kind == NoiseKind::both;
    if (amplitude && cfg.noise.i_omega1 > 0.0) {
      const double extra = cfg.noise_kind == NoiseKind::both ? cfg.noise.d1 : 0.0;
      const TwoComponentFit t =
          fit_two_component(x, y, p.delta1, p.gamma_b + extra, p.gamma_b + cfg.noise.a1 + extra);
      r["two_component_fit"] = {{"strength0", t.strength0},
                                {"strength1", t.strength1},
                                {"weight", t.weight},
                                {"expected_weight", cfg.noise.i_omega1 * cfg.noise.a1 / (p.omega1 * p.omega1)},
                                {"rms_residual", t.rms_residual}};
    }
  }
  return r;
}

template <OpticalMedium Medium>
json cavity_report(const Medium& medium, const RunConfig& cfg, double center, Outputs& out) {
  const CavityParams cav = cfg.cavity.value_or(desk_cavity());
  const ScanSpec& s = *cfg.scan;
  const TransmissionScan scan = transmission_spectrum(medium, cav, center, s.span, s.points);
  out.write(".csv", csv_transmission(scan.curve));

  json r;
  r["cavity"] = {{"length_m", scan.snap.cavity.length},
                 {"fill_length_m", scan.snap.cavity.fill_length},
                 {"r_amp", cav.r_amp},
                 {"t_amp", cav.t_amp},
                 {"finesse", finesse(cav)},
                 {"free_spectral_range_rad_s", free_spectral_range(scan.snap.cavity)},
                 {"empty_fwhm_rad_s", empty_fwhm(scan.snap.cavity)}};
  r["resonance_snap"] = {{"mode", scan.snap.mode},
                         {"requested_length_m", cav.length},
                         {"length_shift_m", scan.snap.length_shift}};
  try {
    const FeatureWidth w = central_fwhm(scan.curve, center);
    r["central_feature"] = {{"fwhm_rad_s", w.fwhm}, {"peak_T", w.peak}, {"lo_rad_s", w.lo}, {"hi_rad_s", w.hi}};
  } catch (const MeasurementError& e) {
    r["central_feature"] = {{"error", e.what()}};
  }
  try {
    r["ripple"] = ripple_metric(scan.curve, center, scan.snap.cavity, cfg.analysis.ripple_band_factor);
  } catch (const ValidationError& e) {
    r["ripple"] = nullptr;
    r["ripple_error"] = e.what();
  }
  r["ripple_band_factor"] = cfg.analysis.ripple_band_factor;
  return r;
}

inline json run_cavity_scan(const RunConfig& cfg, Outputs& out) {
  if (!cfg.medium) return cavity_report(EmptyMedium{*cfg.scan->center}, cfg, *cfg.scan->center, out);
  const MediumParams p = resolve_medium(cfg);
  const double center = cfg.scan->center.value_or(p.nu0);
  json r = cavity_report(DoubletMedium{p}, cfg, center, out);
  r["params"] = params_json(p);
  r["wlc_residual"] = wlc_residual(p);
  try {
    const BandwidthReport b = bandwidth_gain(DoubletMedium{p}, cfg.cavity.value_or(desk_cavity()),
                                             {cfg.analysis.bandwidth_span_factor, cfg.analysis.bandwidth_points});
    r["bandwidth_gain"] = {{"ratio", b.ratio}, {"filled_fwhm_rad_s", b.filled_fwhm}, {"empty_fwhm_rad_s", b.empty_fwhm}};
  } catch (const Error& e) {
    r["bandwidth_gain"] = {{"error", e.what()}, {"kind", e.kind()}};
  }
  return r;
}

}  // namespace detail

/// Runs one scenario and writes its files. Throws wlc::Error subclasses.
inline RunResult run(const RunConfig& cfg, const RunOptions& opt = {}) {
  detail::Outputs out{opt.out_dir.value_or(cfg.output.dir), cfg.output.stem, {}};
  json body;
  switch (cfg.scenario) {
    case Scenario::medium_scan: body = detail::run_medium_scan(cfg, out); break;
    case Scenario::wlc_solve: body = detail::run_wlc_solve(cfg, opt); break;
    case Scenario::sensitivity: body = detail::run_sensitivity(cfg); break;
    case Scenario::mc_noise: body = detail::run_mc_noise(cfg, opt, out); break;
    case Scenario::cavity_scan: body = detail::run_cavity_scan(cfg, out); break;
    case Scenario::budget: body = detail::run_budget(cfg); break;
  }
  RunResult r;
  r.report = {{"metadata", detail::metadata(cfg)}, {"result", body}};
  out.write(".json", r.report.dump(2) + "\n");
  r.files = out.files;
  return r;
}

/// Machine-readable error document for a failed run.
inline json error_json(const std::exception& e) {
  json err{{"message", e.what()}};
  if (const auto* w = dynamic_cast<const Error*>(&e)) err["kind"] = w->kind();
  else err["kind"] = "internal";
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) err["path"] = c->path();
  if (const auto* t = dynamic_cast<const AboveThresholdError*>(&e)) err["nu_rad_s"] = t->nu();
  if (const auto* p = dynamic_cast<const PerturbativeBreakdown*>(&e)) err["step"] = p->step();
  return {{"tool", "wlc"}, {"version", version}, {"error", err}};
}

}  // namespace wlc::cli
