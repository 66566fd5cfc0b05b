// White-light condition dn/dnu = -1/nu0 at the line centre: residual,
// single-parameter solvers, and restoration after phase-noise broadening.
#pragma once

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "wlc/errors.hpp"
#include "wlc/medium.hpp"

namespace wlc {

/// nu0 * dn/dnu|nu0 + 1; zero exactly when the condition holds.
inline double wlc_residual(const MediumParams& p) { return p.nu0 * dispersion_at_center(p) + 1.0; }

/// Symmetric coupling M1 = M2 = M that satisfies the white-light condition:
/// M = (Delta^2 + Gamma^2)^2 / (nu0 (Delta^2 - Gamma^2)).
inline double solve_coupling_for_wlc(double delta, double gamma_line, double nu0) {
  if (!(gamma_line > 0.0) || !(nu0 > 0.0))
    throw ValidationError("wlc: gamma_line and nu0 must be > 0");
  if (!(delta > gamma_line))
    throw ValidationError("wlc: delta must exceed gamma_line for negative dispersion");
  const double d2 = delta * delta;
  const double g2 = gamma_line * gamma_line;
  return (d2 + g2) * (d2 + g2) / (nu0 * (d2 - g2));
}

enum class RootBranch { smaller, larger };

inline constexpr double splitting_bracket_floor = 1e-6;  // relative, above Gamma
inline constexpr double splitting_bracket_ceiling = 1e6; // times Gamma
inline constexpr double splitting_rel_tolerance = 1e-12;

/// Half-splitting Delta > Gamma at which a symmetric doublet of coupling m
/// satisfies the condition. The residual in Delta dips to its minimum at
/// Delta = sqrt(3) Gamma, so there are up to two roots; `branch` picks one.
/// Bisection on [Gamma (1 + 1e-6), sqrt(3) Gamma] or [sqrt(3) Gamma, 1e6 Gamma].
inline double solve_splitting_for_wlc(double m, double gamma_line, double nu0,
                                      RootBranch branch = RootBranch::smaller) {
  if (!(m > 0.0)) throw ValidationError("wlc: m must be > 0");
  if (!(gamma_line > 0.0) || !(nu0 > 0.0))
    throw ValidationError("wlc: gamma_line and nu0 must be > 0");

  auto residual = [&](double delta) {
    return wlc_residual(MediumParams{m, m, delta, gamma_line, nu0, std::nullopt});
  };
  const double split = std::sqrt(3.0) * gamma_line;
  const double lo = branch == RootBranch::smaller ? gamma_line * (1.0 + splitting_bracket_floor) : split;
  const double hi = branch == RootBranch::smaller ? split : gamma_line * splitting_bracket_ceiling;
  const double r_lo = residual(lo);
  const double r_hi = residual(hi);
  if (r_lo == 0.0) return lo;
  if (r_hi == 0.0) return hi;
  if ((r_lo > 0.0) == (r_hi > 0.0))
    throw NoRootError("wlc: residual does not change sign on the splitting bracket (m * nu0 = " +
                      std::to_string(m * nu0) + " < 8 gamma^2 = " +
                      std::to_string(8.0 * gamma_line * gamma_line) + "?)");

  auto tol = [](double a, double b) {
    return std::abs(b - a) <= splitting_rel_tolerance * std::min(std::abs(a), std::abs(b));
  };
  std::uintmax_t max_iter = 400;
  const auto [a, b] = boost::math::tools::bisect(residual, lo, hi, tol, max_iter);
  const double ra = std::abs(residual(a));
  const double rb = std::abs(residual(b));
  return ra <= rb ? a : b;
}

/// Broaden the two lines by the phase-noise bandwidths (Gamma_j -> Gamma_j + d_j)
/// and re-solve a common M1 = M2 so the condition holds again. Delta and nu0
/// are kept.
inline MediumParams restore_wlc_under_phase_noise(const MediumParams& p, double d1, double d2) {
  validate_lineshape(p);
  if (!(d1 >= 0.0) || !(d2 >= 0.0)) throw ValidationError("wlc: phase-noise bandwidths must be >= 0");

  MediumParams out = p;
  const double g1 = p.width1() + d1;
  const double g2 = p.width2() + d2;
  if (!(p.delta > g1) || !(p.delta > g2))
    throw ValidationError("wlc: broadening closed the negative-dispersion window (delta <= gamma + D)");

  out.gamma_line = g1;
  out.gamma_line2 = g1 == g2 ? std::nullopt : std::optional<double>(g2);
  if (!out.gamma_line2) {
    out.m1 = out.m2 = solve_coupling_for_wlc(p.delta, g1, p.nu0);
    return out;
  }
  // Unequal widths: dispersion is linear in the common M, so evaluate the
  // exact two-width centre dispersion at M = 1 and scale.
  out.m1 = out.m2 = 1.0;
  const double unit = dispersion_at_center(out);
  out.m1 = out.m2 = -1.0 / (p.nu0 * unit);
  return out;
}

}  // namespace wlc
