// First-order propagation of pump-intensity, number-density and
// drive-frequency deviations into dispersion, absorption and index changes,
// with an exact-recomputation check of the linearisation.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "wlc/errors.hpp"
#include "wlc/medium.hpp"

namespace wlc {

struct DeviationReport {
  double rel_dispersion = 0.0;  // delta(dn/dnu) / (dn/dnu)
  double rel_absorption = 0.0;  // delta alpha / alpha
  double delta_n = 0.0;
  std::optional<double> abs_absorption;  // delta alpha (1/m), drive-frequency path only

  bool operator==(const DeviationReport&) const = default;
};

namespace detail {

inline double symmetric_coupling(const MediumParams& p) {
  validate_lineshape(p);
  const double scale = std::max({std::abs(p.m1), std::abs(p.m2), 1e-300});
  if (std::abs(p.m1 - p.m2) > 1e-12 * scale)
    throw ValidationError("sensitivity: formulas assume m1 == m2");
  if (!p.symmetric_widths()) throw ValidationError("sensitivity: formulas assume one shared linewidth");
  return 0.5 * (p.m1 + p.m2);
}

}  // namespace detail

/// Relative pump-intensity deviations dI1/I1, dI2/I2 (M_j is proportional to I_j).
inline DeviationReport deviation_from_intensity(const MediumParams& p, double rel_di1, double rel_di2) {
  const double m = detail::symmetric_coupling(p);
  const double dm1 = m * rel_di1;
  const double dm2 = m * rel_di2;
  DeviationReport r;
  r.rel_dispersion = r.rel_absorption = 0.5 * (rel_di1 + rel_di2);
  r.delta_n = 0.5 * (-dm1 + dm2) * p.delta / (p.delta * p.delta + p.gamma_line * p.gamma_line);
  return r;
}

/// Relative atom-number-density deviation dN/N; scales M1 and M2 together,
/// so the index at line centre does not move.
inline DeviationReport deviation_from_density(const MediumParams& p, double rel_dn_density) {
  validate_lineshape(p);
  DeviationReport r;
  r.rel_dispersion = r.rel_absorption = rel_dn_density;
  r.delta_n = 0.0;
  return r;
}

/// Per-unit coefficients of the drive-frequency path. Units follow the units
/// of the parameters: with everything in rad/s, dn_per_sum is in s per rad/s.
struct DriveFrequencyCoefficients {
  double dn_per_sum;         // multiplies (dnu1 + dnu2)
  double dalpha_per_diff;    // 1/m per unit of (dnu1 - dnu2)
  double rel_disp_per_diff;  // multiplies (dnu1 - dnu2)
};

inline DriveFrequencyCoefficients drive_frequency_coefficients(const MediumParams& p) {
  const double m = detail::symmetric_coupling(p);
  const double d = p.delta;
  const double g = p.gamma_line;
  const double d2 = d * d;
  const double g2 = g * g;
  if (d == g) throw ValidationError("sensitivity: delta == gamma_line makes Delta^4 - Gamma^4 vanish");
  const double s2 = (d2 + g2) * (d2 + g2);
  return {
      m * (d2 - g2) / (2.0 * s2),
      p.nu0 * m * d * g / (speed_of_light * s2),
      -d * (d2 - 3.0 * g2) / (d2 * d2 - g2 * g2),
  };
}

/// Drive-frequency shifts dnu1, dnu2 (same units as delta) of the two pumps;
/// each moves its Raman line by the same amount.
inline DeviationReport deviation_from_drive_frequency(const MediumParams& p, double dnu1, double dnu2) {
  const DriveFrequencyCoefficients c = drive_frequency_coefficients(p);
  DeviationReport r;
  r.delta_n = c.dn_per_sum * (dnu1 + dnu2);
  r.abs_absorption = c.dalpha_per_diff * (dnu1 - dnu2);
  r.rel_dispersion = c.rel_disp_per_diff * (dnu1 - dnu2);
  // alpha(nu0) < 0 in a gain medium; the sign is kept.
  r.rel_absorption = *r.abs_absorption / absorption_coefficient(p, p.nu0);
  return r;
}

enum class PerturbationKind { intensity, density, drive_frequency };

/// Direction of a perturbation, scaled by epsilon in validate_linearization.
/// intensity: (dI1/I1, dI2/I2); density: (dN/N, unused);
/// drive_frequency: (dnu1, dnu2).
struct Perturbation {
  PerturbationKind kind;
  double first = 1.0;
  double second = 0.0;
};

struct LinearizationCheck {
  DeviationReport predicted;
  DeviationReport exact;
  double max_rel_error = 0.0;
};

namespace detail {

inline double relative_gap(double predicted, double exact) {
  const double scale = std::max(std::abs(predicted), std::abs(exact));
  if (scale == 0.0) return 0.0;
  return std::abs(predicted - exact) / scale;
}

}  // namespace detail

/// Compares the first-order formulas with a full recomputation of n, alpha
/// and dn/dnu at nu0 after rebuilding the perturbed line set.
inline LinearizationCheck validate_linearization(const MediumParams& p, const Perturbation& dir,
                                                 double epsilon) {
  const double a = epsilon * dir.first;
  const double b = epsilon * dir.second;

  LinearizationCheck out;
  const LineSet base = doublet_lines(p);
  LineSet moved = base;
  switch (dir.kind) {
    case PerturbationKind::intensity:
      out.predicted = deviation_from_intensity(p, a, b);
      moved.lines[0].strength *= 1.0 + a;
      moved.lines[1].strength *= 1.0 + b;
      break;
    case PerturbationKind::density:
      out.predicted = deviation_from_density(p, a);
      moved.lines[0].strength *= 1.0 + a;
      moved.lines[1].strength *= 1.0 + a;
      break;
    case PerturbationKind::drive_frequency:
      out.predicted = deviation_from_drive_frequency(p, a, b);
      moved.lines[0].center += a;
      moved.lines[1].center += b;
      break;
  }

  const cplx chi0 = base.at_offset(0.0);
  const cplx chi1 = moved.at_offset(0.0);
  const double disp0 = base.dispersion(0.0);
  const double disp1 = moved.dispersion(0.0);
  const double alpha0 = base.absorption(0.0);
  const double alpha1 = moved.absorption(0.0);

  out.exact.rel_dispersion = (disp1 - disp0) / disp0;
  out.exact.rel_absorption = (alpha1 - alpha0) / alpha0;
  out.exact.delta_n = 0.5 * (chi1.real() - chi0.real());
  if (dir.kind == PerturbationKind::drive_frequency) out.exact.abs_absorption = alpha1 - alpha0;

  out.max_rel_error = std::max({detail::relative_gap(out.predicted.rel_dispersion, out.exact.rel_dispersion),
                                detail::relative_gap(out.predicted.rel_absorption, out.exact.rel_absorption),
                                detail::relative_gap(out.predicted.delta_n, out.exact.delta_n)});
  if (out.predicted.abs_absorption && out.exact.abs_absorption)
    out.max_rel_error = std::max(out.max_rel_error,
                                 detail::relative_gap(*out.predicted.abs_absorption, *out.exact.abs_absorption));
  return out;
}

/// Tolerances on each deviation source for the worst-case budget.
struct DeviationTolerances {
  double rel_intensity1 = 0.0;
  double rel_intensity2 = 0.0;
  double rel_density = 0.0;
  double dnu1 = 0.0;  // same units as the medium's delta
  double dnu2 = 0.0;
};

struct BudgetReport {
  double from_intensity = 0.0;
  double from_density = 0.0;
  double from_drive_frequency = 0.0;
  double worst_case_rel_dispersion = 0.0;
  double target = 1e-4;
  bool within_target = false;
};

/// Worst-case |delta(dn/dnu) / (dn/dnu)| as the sum of absolute contributions.
inline BudgetReport dispersion_budget(const MediumParams& p, const DeviationTolerances& tol,
                                      double target = 1e-4) {
  const DriveFrequencyCoefficients c = drive_frequency_coefficients(p);
  BudgetReport r;
  r.from_intensity = 0.5 * (std::abs(tol.rel_intensity1) + std::abs(tol.rel_intensity2));
  r.from_density = std::abs(tol.rel_density);
  r.from_drive_frequency = std::abs(c.rel_disp_per_diff) * (std::abs(tol.dnu1) + std::abs(tol.dnu2));
  r.worst_case_rel_dispersion = r.from_intensity + r.from_density + r.from_drive_frequency;
  r.target = target;
  r.within_target = r.worst_case_rel_dispersion <= target;
  return r;
}

}  // namespace wlc
