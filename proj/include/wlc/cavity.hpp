// Fabry-Perot transmission of an empty cavity and of one filled with a
// dispersive gain medium, plus the bandwidth and unevenness measures used to
// compare them.
//
// Single pass through the cavity multiplies the field by e^{i psi - alpha L_m}
// with psi(nu) = nu [L + (n(nu) - 1) L_m] / c, so
//
//   T = t^4 e^{-2 alpha L_m} / |1 - r^2 e^{-2 alpha L_m} e^{2 i psi}|^2.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>

#include "wlc/condition.hpp"
#include "wlc/errors.hpp"
#include "wlc/medium.hpp"
#include "wlc/spectral_curve.hpp"
#include "wlc/units.hpp"

namespace wlc {

struct CavityParams {
  double length = 0.1;       // L, m
  double fill_length = 0.1;  // L_m <= L, m
  double r_amp = 0.0;        // mirror amplitude reflectivity
  double t_amp = 0.0;        // mirror amplitude transmissivity

  bool operator==(const CavityParams&) const = default;
};

inline void validate(const CavityParams& c) {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ValidationError(std::string("cavity: ") + msg);
  };
  require(std::isfinite(c.length) && c.length > 0.0, "length must be > 0");
  require(std::isfinite(c.fill_length) && c.fill_length > 0.0 && c.fill_length <= c.length,
          "fill_length must be in (0, length]");
  require(c.r_amp > 0.0 && c.r_amp < 1.0, "r_amp must be in (0, 1)");
  require(c.t_amp >= 0.0 && c.r_amp * c.r_amp + c.t_amp * c.t_amp <= 1.0 + 1e-12, "need r_amp^2 + t_amp^2 <= 1");
}

/// Mode spacing pi c / L in rad/s.
inline double free_spectral_range(const CavityParams& c) { return std::numbers::pi * speed_of_light / c.length; }

/// Coefficient finesse pi r / (1 - r^2).
inline double finesse(const CavityParams& c) {
  return std::numbers::pi * c.r_amp / (1.0 - c.r_amp * c.r_amp);
}

/// Empty-cavity FWHM from the finesse relation, FSR (1 - r^2) / (pi r).
inline double empty_fwhm(const CavityParams& c) { return free_spectral_range(c) / finesse(c); }

/// Empty-cavity FWHM from the exact Airy line shape, (c / L) 2 arcsin((1 - r^2) / 2r).
inline double empty_fwhm_exact(const CavityParams& c) {
  const double r2 = c.r_amp * c.r_amp;
  return speed_of_light / c.length * 2.0 * std::asin((1.0 - r2) / (2.0 * c.r_amp));
}

/// Amplitude reflectivity giving coefficient finesse f.
inline double reflectivity_for_finesse(double f) {
  if (!(f > 0.0)) throw ValidationError("cavity: finesse must be > 0");
  const double pi = std::numbers::pi;
  return (-pi + std::sqrt(pi * pi + 4.0 * f * f)) / (2.0 * f);
}

/// Lossless mirrors, medium filling the whole cavity.
inline CavityParams desk_cavity(double finesse_target = 300.0, double length = 0.1) {
  const double r = reflectivity_for_finesse(finesse_target);
  return {length, length, r, std::sqrt(1.0 - r * r)};
}

struct OpticalResponse {
  double index_minus_one = 0.0;
  double alpha = 0.0;  // field coefficient, 1/m; negative is gain
};

template <class M>
concept OpticalMedium = requires(const M& m, double nu) {
  { m.response(nu) } -> std::convertible_to<OpticalResponse>;
  { m.center() } -> std::convertible_to<double>;
};

struct EmptyMedium {
  double nu0 = 0.0;
  OpticalResponse response(double) const { return {}; }
  double center() const { return nu0; }
};

struct DoubletMedium {
  MediumParams params;
  OpticalResponse response(double nu) const {
    const cplx chi = susceptibility_at_offset(params, nu - params.nu0);
    return {0.5 * chi.real(), params.nu0 / (2.0 * speed_of_light) * chi.imag()};
  }
  double center() const { return params.nu0; }
};

struct LineSetMedium {
  LineSet lines;
  OpticalResponse response(double nu) const {
    const double x = nu - lines.carrier;
    return {lines.index_offset(x), lines.absorption(x)};
  }
  double center() const { return lines.carrier; }
};

/// n(nu) = 1 - (nu - nu0) / nu0 exactly, without gain or loss.
struct LinearDispersionMedium {
  double nu0 = 0.0;
  OpticalResponse response(double nu) const { return {-(nu - nu0) / nu0, 0.0}; }
  double center() const { return nu0; }
};

/// Intensity transmission at nu (rad/s). Throws AboveThresholdError when the
/// round-trip gain r^2 e^{-2 alpha L_m} reaches 1.
template <OpticalMedium Medium>
double transmission(const Medium& medium, const CavityParams& cav, double nu) {
  const OpticalResponse o = medium.response(nu);
  const double pass = std::exp(-2.0 * o.alpha * cav.fill_length);  // single-pass intensity factor
  const double loop = cav.r_amp * cav.r_amp * pass;
  if (!(loop < 1.0))
    throw AboveThresholdError("cavity: round-trip gain reaches threshold at nu = " + std::to_string(nu), nu);
  const double psi = nu * (cav.length + o.index_minus_one * cav.fill_length) / speed_of_light;
  const double t2 = cav.t_amp * cav.t_amp;
  return t2 * t2 * pass / std::norm(1.0 - loop * std::polar(1.0, 2.0 * psi));
}

struct ResonanceSnap {
  CavityParams cavity;    // lengths rescaled so nu_center is an exact empty-cavity resonance
  std::int64_t mode = 0;  // m with nu_center L' = m pi c
  double length_shift = 0.0;  // L' - L, m
};

inline ResonanceSnap snap_to_resonance(const CavityParams& cav, double nu_center) {
  validate(cav);
  if (!(nu_center > 0.0)) throw ValidationError("cavity: centre frequency must be > 0");
  const double pc = std::numbers::pi * speed_of_light;
  const double m = std::max(1.0, std::round(nu_center * cav.length / pc));
  ResonanceSnap s;
  s.mode = static_cast<std::int64_t>(m);
  s.cavity = cav;
  s.cavity.length = m * pc / nu_center;
  s.cavity.fill_length = cav.fill_length * (s.cavity.length / cav.length);
  if (cav.fill_length == cav.length) s.cavity.fill_length = s.cavity.length;
  s.length_shift = s.cavity.length - cav.length;
  return s;
}

struct TransmissionScan {
  RealCurve curve;
  ResonanceSnap snap;
};

/// Uniform scan of transmission over nu_center +- span / 2 after snapping the
/// cavity length so that nu_center is an empty-cavity resonance.
template <OpticalMedium Medium>
TransmissionScan transmission_spectrum(const Medium& medium, const CavityParams& cav, double nu_center, double span,
                                       std::size_t n_points) {
  if (!(span > 0.0) || !(span < 1e-3 * nu_center))
    throw ValidationError("cavity: span must be positive and much smaller than the centre frequency");
  TransmissionScan out{{}, snap_to_resonance(cav, nu_center)};
  const Axis axis = Axis::centered(nu_center, span, n_points);
  out.curve = {axis.start, axis.step, {}};
  out.curve.values.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) out.curve.values.push_back(transmission(medium, out.snap.cavity, axis.at(k)));
  return out;
}

struct FeatureWidth {
  double fwhm = 0.0;
  double peak = 0.0;  // height the half level refers to
  double lo = 0.0;    // outer half-level crossings
  double hi = 0.0;
};

/// Width of the transmission feature containing `center`. The feature is the
/// connected run of samples around the centre with T >= T(center) / 2; its
/// maximum sets the half level, and the width runs between the outermost
/// half-level crossings, linearly interpolated.
inline FeatureWidth central_fwhm(const RealCurve& curve, double center) {
  curve.check();
  const auto n = static_cast<std::ptrdiff_t>(curve.size());
  auto k0 = static_cast<std::ptrdiff_t>(std::llround((center - curve.nu_start) / curve.nu_step));
  if (k0 < 0 || k0 >= n) throw ValidationError("fwhm: centre outside the scan");
  const auto& t = curve.values;
  const double floor = 0.5 * t[k0];
  std::ptrdiff_t a = k0, b = k0;
  while (a > 0 && t[a - 1] >= floor) --a;
  while (b < n - 1 && t[b + 1] >= floor) ++b;
  if (a == 0 || b == n - 1) throw MeasurementError("fwhm: feature has no half crossing inside the scan; widen the span");

  FeatureWidth w;
  w.peak = *std::max_element(t.begin() + a, t.begin() + b + 1);
  const double half = 0.5 * w.peak;
  std::ptrdiff_t i = a, j = b;
  while (t[i] < half) ++i;
  while (t[j] < half) --j;
  // Interpolate between the last sample below and the first at or above the level.
  auto cross = [&](std::ptrdiff_t in, std::ptrdiff_t out_k) {
    const double f = (t[in] - half) / (t[in] - t[out_k]);
    return curve.nu(static_cast<std::size_t>(in)) + f * (curve.nu(static_cast<std::size_t>(out_k)) -
                                                         curve.nu(static_cast<std::size_t>(in)));
  };
  w.lo = cross(i, i - 1);
  w.hi = cross(j, j + 1);
  w.fwhm = w.hi - w.lo;
  return w;
}

struct BandwidthOptions {
  double span_factor = 40.0;  // filled-cavity scan span in empty-cavity FWHMs
  std::size_t points = 8001;
};

struct BandwidthReport {
  double ratio = 0.0;
  double filled_fwhm = 0.0;
  double empty_fwhm = 0.0;
  ResonanceSnap snap;
};

namespace detail {

template <class M>
void require_white_light(const M&) {}

inline void require_white_light(const DoubletMedium& m) {
  if (m.params.m1 + m.params.m2 > 0.0 && !(std::abs(wlc_residual(m.params)) <= 1e-2))
    throw ValidationError("bandwidth_gain: medium is not at the white-light condition (|residual| > 1e-2)");
}

}  // namespace detail

/// Filled-cavity central FWHM over the empty-cavity FWHM at the same mirrors,
/// both measured on scans about the medium centre.
template <OpticalMedium Medium>
BandwidthReport bandwidth_gain(const Medium& medium, const CavityParams& cav, const BandwidthOptions& opt = {}) {
  detail::require_white_light(medium);
  const double nu0 = medium.center();
  const double fw = empty_fwhm(cav);
  BandwidthReport r;
  const TransmissionScan empty = transmission_spectrum(EmptyMedium{nu0}, cav, nu0, 10.0 * fw, 2001);
  r.empty_fwhm = central_fwhm(empty.curve, nu0).fwhm;
  const TransmissionScan filled = transmission_spectrum(medium, cav, nu0, opt.span_factor * fw, opt.points);
  r.filled_fwhm = central_fwhm(filled.curve, nu0).fwhm;
  r.snap = filled.snap;
  r.ratio = r.filled_fwhm / r.empty_fwhm;
  return r;
}

/// (max T - min T) / (max T + min T) over samples with nu in [lo, hi].
inline double ripple_metric(const RealCurve& curve, double lo, double hi) {
  curve.check();
  if (!(hi > lo) || lo < curve.nu_start || hi > curve.nu_stop())
    throw ValidationError("ripple: band must lie inside the curve");
  double mx = -INFINITY, mn = INFINITY;
  std::size_t count = 0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double nu = curve.nu(k);
    if (nu < lo || nu > hi) continue;
    mx = std::max(mx, curve.values[k]);
    mn = std::min(mn, curve.values[k]);
    ++count;
  }
  if (count < 8) throw ValidationError("ripple: band holds fewer than 8 samples");
  if (mx + mn == 0.0) return 0.0;
  return (mx - mn) / (mx + mn);
}

/// Band of width factor x empty-cavity FWHM centred on `center`.
inline double ripple_metric(const RealCurve& curve, double center, const CavityParams& cav, double factor = 4.0) {
  const double half = 0.5 * factor * empty_fwhm(cav);
  return ripple_metric(curve, center - half, center + half);
}

}  // namespace wlc
