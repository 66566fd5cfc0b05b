// Gain-doublet medium: susceptibility, refractive index, absorption and
// dispersion of a probe scanned across two Raman gain lines.
//
// chi(nu) = M1 / ((nu - nu0 - Delta) + i Gamma) + M2 / ((nu - nu0 + Delta) + i Gamma)
//
// With +i Gamma in the denominators Im chi < 0 at every frequency, which is
// gain (alpha < 0).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wlc/errors.hpp"
#include "wlc/spectral_curve.hpp"
#include "wlc/units.hpp"

namespace wlc {

using cplx = std::complex<double>;

/// One Lorentzian term strength / ((x - center) + i width). `center` and the
/// evaluation point x are offsets from a reference carrier, never absolute
/// optical frequencies, so MHz structure is not lost against a PHz carrier.
struct LorentzLine {
  double strength;
  double center;
  double width;

  cplx value(double x) const { return strength / cplx(x - center, width); }
  /// d/dx of value(x).
  cplx slope(double x) const {
    const cplx d(x - center, width);
    return -strength / (d * d);
  }
};

/// Sum of Lorentzian lines about a carrier frequency `carrier` (rad/s).
struct LineSet {
  double carrier = 0.0;
  std::vector<LorentzLine> lines;

  cplx at_offset(double x) const {
    cplx sum{};
    for (const auto& l : lines) sum += l.value(x);
    return sum;
  }
  cplx slope_at_offset(double x) const {
    cplx sum{};
    for (const auto& l : lines) sum += l.slope(x);
    return sum;
  }
  cplx operator()(double nu) const { return at_offset(nu - carrier); }

  /// n - 1 at an offset (n = 1 + Re chi / 2).
  double index_offset(double x) const { return 0.5 * at_offset(x).real(); }
  /// Absorption coefficient with the fixed carrier prefactor nu0 / 2c.
  double absorption(double x) const { return carrier / (2.0 * speed_of_light) * at_offset(x).imag(); }
  /// dn/dnu at an offset.
  double dispersion(double x) const { return 0.5 * slope_at_offset(x).real(); }

  ComplexCurve scan(const Axis& offsets) const {
    ComplexCurve c{carrier + offsets.start, offsets.step, {}};
    c.values.reserve(offsets.points);
    for (std::size_t k = 0; k < offsets.points; ++k) c.values.push_back(at_offset(offsets.at(k)));
    return c;
  }
};

struct MediumParams {
  double m1 = 0.0;          // coupling of the line at nu0 + Delta, rad/s
  double m2 = 0.0;          // coupling of the line at nu0 - Delta, rad/s
  double delta = 0.0;       // half splitting, rad/s
  double gamma_line = 0.0;  // Raman linewidth, rad/s
  double nu0 = 0.0;         // probe line centre, rad/s
  // Width of the nu0 - Delta line when it differs from gamma_line (unequal
  // phase noise on the two drives). Absent means both lines share gamma_line.
  std::optional<double> gamma_line2;

  double width1() const { return gamma_line; }
  double width2() const { return gamma_line2.value_or(gamma_line); }
  bool symmetric_widths() const { return !gamma_line2 || *gamma_line2 == gamma_line; }

  bool operator==(const MediumParams&) const = default;
};

/// Ratio nu0 / Delta below which the fixed-carrier approximations break down.
inline constexpr double min_carrier_ratio = 1e3;

/// Sign and positivity invariants. Throws ValidationError.
inline void validate_lineshape(const MediumParams& p) {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ValidationError(std::string("medium: ") + msg);
  };
  require(std::isfinite(p.m1) && std::isfinite(p.m2) && std::isfinite(p.delta) &&
              std::isfinite(p.gamma_line) && std::isfinite(p.nu0),
          "all fields must be finite");
  require(p.delta > 0.0, "delta must be > 0");
  require(p.gamma_line > 0.0, "gamma_line must be > 0");
  require(!p.gamma_line2 || (std::isfinite(*p.gamma_line2) && *p.gamma_line2 > 0.0),
          "gamma_line2 must be > 0");
  require(p.nu0 > 0.0, "nu0 must be > 0");
  require(p.m1 >= 0.0 && p.m2 >= 0.0, "m1 and m2 must be >= 0 (gain medium)");
}

/// Full invariant set, including the optical-carrier separation nu0 > 1e3 Delta.
inline void validate(const MediumParams& p) {
  validate_lineshape(p);
  if (!(p.nu0 > min_carrier_ratio * p.delta))
    throw ValidationError("medium: nu0 must exceed 1e3 * delta (optical carrier vs MHz structure)");
  if (!(p.nu0 > min_carrier_ratio * std::max(p.width1(), p.width2())))
    throw ValidationError("medium: nu0 must exceed 1e3 * gamma_line");
}

inline LineSet doublet_lines(const MediumParams& p) {
  return {p.nu0, {{p.m1, p.delta, p.width1()}, {p.m2, -p.delta, p.width2()}}};
}

inline cplx susceptibility_at_offset(const MediumParams& p, double x) {
  return LorentzLine{p.m1, p.delta, p.width1()}.value(x) +
         LorentzLine{p.m2, -p.delta, p.width2()}.value(x);
}

inline cplx susceptibility(const MediumParams& p, double nu) {
  return susceptibility_at_offset(p, nu - p.nu0);
}

inline double refractive_index(const MediumParams& p, double nu) {
  return 1.0 + 0.5 * susceptibility(p, nu).real();
}

/// Field absorption coefficient (1/m); negative is gain. The prefactor is
/// pinned at the line centre, nu0 / 2c, across the whole scan band.
inline double absorption_coefficient(const MediumParams& p, double nu) {
  return p.nu0 / (2.0 * speed_of_light) * susceptibility(p, nu).imag();
}

/// dn/dnu at an arbitrary frequency, from the analytic derivative of chi.
inline double dispersion(const MediumParams& p, double nu) {
  return doublet_lines(p).dispersion(nu - p.nu0);
}

/// dn/dnu at nu0: -(M1 + M2)(Delta^2 - Gamma^2) / (2 (Delta^2 + Gamma^2)^2)
/// for a shared width; each line keeps its own width otherwise.
inline double dispersion_at_center(const MediumParams& p) {
  auto term = [&](double m, double g) {
    const double d2 = p.delta * p.delta;
    const double g2 = g * g;
    return m * (d2 - g2) / ((d2 + g2) * (d2 + g2));
  };
  return -0.5 * (term(p.m1, p.width1()) + term(p.m2, p.width2()));
}

/// Central difference (f(nu + h) - f(nu - h)) / 2h.
template <class F>
double numeric_derivative(F&& f, double nu, double h) {
  if (!(h > 0.0)) throw ValidationError("numeric_derivative: h must be > 0");
  return (f(nu + h) - f(nu - h)) / (2.0 * h);
}

inline ComplexCurve susceptibility_scan(const MediumParams& p, double nu_start, double nu_stop,
                                        std::size_t n_points) {
  const Axis axis = Axis::spanning(nu_start, nu_stop, n_points);
  // Sample on offsets so the structure near nu0 keeps full precision.
  const Axis offsets{nu_start - p.nu0, axis.step, n_points};
  ComplexCurve c = doublet_lines(p).scan(offsets);
  c.nu_start = nu_start;
  return c;
}

}  // namespace wlc
