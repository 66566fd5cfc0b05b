// Slowly varying amplitude equations of the Raman three-level system,
//
//   dC_a/dt = i Omega_1(t) e^{-i Delta_1 t} C_c + i Omega_p e^{-i Delta_p t} C_b
//   dC_b/dt = i Omega_p^* e^{i Delta_p t} C_a - gamma C_b
//
// with C_c pinned to 1 (no depletion of the initial state |c>), integrated by
// fixed-step RK4 with the drive held constant over each step.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wlc/errors.hpp"

namespace wlc {

using cplx = std::complex<double>;

struct ThreeLevelParams {
  double delta0 = 200.0;   // single-photon detuning, sets the M_j prefactor Omega_j^2 / Delta0^2
  double delta1 = 200.0;   // drive detuning nu_1 - omega_ac
  double delta_p = 200.0;  // probe detuning nu - omega_ab
  double omega1 = 2.0;     // mean drive Rabi frequency
  double omega_p = 0.1;    // probe Rabi frequency (real)
  double gamma_b = 1.0;    // decay of |b>
  // Second pump for doublet runs; simulated as an independent transition.
  std::optional<double> delta2;
  std::optional<double> omega2;

  bool operator==(const ThreeLevelParams&) const = default;
};

inline constexpr double far_detuned_min_ratio = 50.0;
inline constexpr double far_detuned_warn_ratio = 100.0;
inline constexpr double perturbative_bound = 0.1;
inline constexpr double max_phase_per_step = 0.05;

/// Throws on hard violations; returns soft warnings (far-detuned ratio below 100).
inline std::vector<std::string> validate(const ThreeLevelParams& p) {
  std::vector<std::string> warnings;
  auto fail = [](const std::string& m) { throw ValidationError("three_level: " + m); };
  if (!(p.gamma_b > 0.0)) fail("gamma_b must be > 0");
  if (!(p.omega1 > 0.0)) fail("omega1 must be > 0");
  if (!(p.omega_p > 0.0)) fail("omega_p must be > 0");
  if (!(p.omega_p < p.omega1)) fail("omega_p must be << omega1 (perturbative probe)");
  if (p.delta2.has_value() != p.omega2.has_value()) fail("delta2 and omega2 come together");
  if (p.omega2 && !(*p.omega2 > 0.0)) fail("omega2 must be > 0");
  if (!(std::abs(p.delta0) > 0.0)) fail("delta0 must be non-zero");

  auto check_ratio = [&](double detuning, const char* name) {
    const double ratio = std::abs(detuning) / p.gamma_b;
    if (ratio < far_detuned_min_ratio)
      fail(std::string(name) + " must be >= 50 gamma_b (far-detuned regime)");
    if (ratio < far_detuned_warn_ratio)
      warnings.push_back(std::string(name) + " / gamma_b = " + std::to_string(ratio) + " is below 100");
  };
  check_ratio(p.delta1, "delta1");
  check_ratio(p.delta_p, "delta_p");
  if (p.delta2) check_ratio(*p.delta2, "delta2");
  if (p.omega_p > 0.1 * p.omega1) warnings.push_back("omega_p exceeds 0.1 omega1");
  return warnings;
}

struct AmplitudeState {
  cplx c_a{};
  cplx c_b{};
  cplx c_c{1.0, 0.0};
  double t = 0.0;
};

namespace detail {

inline cplx mul(cplx x, cplx y) {
  return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}
inline cplx mul_conj(cplx x, cplx y) {  // x * conj(y)
  return {x.real() * y.real() + x.imag() * y.imag(), x.imag() * y.real() - x.real() * y.imag()};
}

}  // namespace detail

namespace detail {

struct DriveStages {
  double u0r, u0i, umr, umi, u1r, u1i;  // i Omega e^{-i Delta_1 t} at t, t + h/2, t + h
};

// One RK4 step for n probes; pop[j] receives |C_a|^2 + |C_b|^2 afterwards.
inline void rk4_probe_kernel(std::size_t n, const DriveStages& s, double op, double g, double h,
                             double* __restrict xar, double* __restrict xai, double* __restrict xbr,
                             double* __restrict xbi, double* __restrict per, double* __restrict pei,
                             double* __restrict pop, const double* __restrict rr, const double* __restrict ri) {
  const double h2 = 0.5 * h;
  const double h6 = h / 6.0;
  const double u0r = s.u0r, u0i = s.u0i, umr = s.umr, umi = s.umi, u1r = s.u1r, u1i = s.u1i;
  for (std::size_t j = 0; j < n; ++j) {
    // Probe phasor e^{-i Delta_p t} at t, t + h/2, t + h.
    const double p0r = per[j], p0i = pei[j];
    const double pmr = p0r * rr[j] - p0i * ri[j], pmi = p0r * ri[j] + p0i * rr[j];
    const double p1r = pmr * rr[j] - pmi * ri[j], p1i = pmr * ri[j] + pmi * rr[j];

    // da = u + i op e^{-i Delta_p t} b ; db = i op e^{+i Delta_p t} a - g b
    auto fa_r = [&](double ur, double pr, double pi, double xr, double xi) {
      return ur - op * (pr * xi + pi * xr);
    };
    auto fa_i = [&](double ui, double pr, double pi, double xr, double xi) {
      return ui + op * (pr * xr - pi * xi);
    };
    auto fb_r = [&](double pr, double pi, double ar, double ai, double xr) {
      return -op * (pr * ai - pi * ar) - g * xr;
    };
    auto fb_i = [&](double pr, double pi, double ar, double ai, double xi) {
      return op * (pr * ar + pi * ai) - g * xi;
    };

    const double ar = xar[j], ai = xai[j], br = xbr[j], bi = xbi[j];
    const double k1ar = fa_r(u0r, p0r, p0i, br, bi), k1ai = fa_i(u0i, p0r, p0i, br, bi);
    const double k1br = fb_r(p0r, p0i, ar, ai, br), k1bi = fb_i(p0r, p0i, ar, ai, bi);
    const double a2r = ar + h2 * k1ar, a2i = ai + h2 * k1ai, b2r = br + h2 * k1br, b2i = bi + h2 * k1bi;
    const double k2ar = fa_r(umr, pmr, pmi, b2r, b2i), k2ai = fa_i(umi, pmr, pmi, b2r, b2i);
    const double k2br = fb_r(pmr, pmi, a2r, a2i, b2r), k2bi = fb_i(pmr, pmi, a2r, a2i, b2i);
    const double a3r = ar + h2 * k2ar, a3i = ai + h2 * k2ai, b3r = br + h2 * k2br, b3i = bi + h2 * k2bi;
    const double k3ar = fa_r(umr, pmr, pmi, b3r, b3i), k3ai = fa_i(umi, pmr, pmi, b3r, b3i);
    const double k3br = fb_r(pmr, pmi, a3r, a3i, b3r), k3bi = fb_i(pmr, pmi, a3r, a3i, b3i);
    const double a4r = ar + h * k3ar, a4i = ai + h * k3ai, b4r = br + h * k3br, b4i = bi + h * k3bi;
    const double k4ar = fa_r(u1r, p1r, p1i, b4r, b4i), k4ai = fa_i(u1i, p1r, p1i, b4r, b4i);
    const double k4br = fb_r(p1r, p1i, a4r, a4i, b4r), k4bi = fb_i(p1r, p1i, a4r, a4i, b4i);

    const double anr = ar + h6 * (k1ar + 2.0 * (k2ar + k3ar) + k4ar);
    const double ani = ai + h6 * (k1ai + 2.0 * (k2ai + k3ai) + k4ai);
    const double bnr = br + h6 * (k1br + 2.0 * (k2br + k3br) + k4br);
    const double bni = bi + h6 * (k1bi + 2.0 * (k2bi + k3bi) + k4bi);
    xar[j] = anr;
    xai[j] = ani;
    xbr[j] = bnr;
    xbi[j] = bni;
    per[j] = p1r;
    pei[j] = p1i;
    pop[j] = anr * anr + ani * ani + bnr * bnr + bni * bni;
  }
}

}  // namespace detail

/// A bank of atoms probed at different detunings, all driven by the same
/// pump field. Each step advances every probe by one RK4 step. State is kept
/// as separate real/imaginary arrays so the probe loop vectorises.
class ProbeBank {
 public:
  ProbeBank(double drive_detuning, std::span<const double> probe_detunings, double omega_p, double gamma_b,
            double dt)
      : delta1_(drive_detuning),
        probes_(probe_detunings.begin(), probe_detunings.end()),
        omega_p_(omega_p),
        gamma_(gamma_b),
        dt_(dt) {
    const std::size_t n = probes_.size();
    for (auto* v : {&ar_, &ai_, &br_, &bi_, &epi_, &rr_, &ri_, &wr_, &wi_, &pop_}) v->assign(n, 0.0);
    epr_.assign(n, 1.0);
    rot1_ = std::polar(1.0, -0.5 * delta1_ * dt_);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx r = std::polar(1.0, -0.5 * probes_[j] * dt_);
      rr_[j] = r.real();
      ri_[j] = r.imag();
    }
  }

  /// One step with drive Rabi frequency `drive` held over [t, t + dt).
  /// Returns false when |C_a|^2 + |C_b|^2 exceeded the perturbative bound.
  bool step(cplx drive) {
    using detail::mul;
    const cplx i_drive(-drive.imag(), drive.real());
    const cplx e1_mid = mul(e1_, rot1_);
    const cplx e1_end = mul(e1_mid, rot1_);
    const cplx u0 = mul(i_drive, e1_);
    const cplx um = mul(i_drive, e1_mid);
    const cplx u1 = mul(i_drive, e1_end);
    const std::size_t n = probes_.size();
    detail::rk4_probe_kernel(n, {u0.real(), u0.imag(), um.real(), um.imag(), u1.real(), u1.imag()}, omega_p_,
                             gamma_, dt_, ar_.data(), ai_.data(), br_.data(), bi_.data(), epr_.data(), epi_.data(),
                             pop_.data(), rr_.data(), ri_.data());
    const double* pop = pop_.data();
    bool ok = true;
    for (std::size_t j = 0; j < n; ++j) ok &= pop[j] <= perturbative_bound;
    e1_ = e1_end;
    ++steps_;
    // Re-anchor the phasors so the recurrence error never accumulates.
    if (steps_ % refresh_interval == 0) {
      const double t = time();
      e1_ = std::polar(1.0, -delta1_ * t);
      for (std::size_t j = 0; j < n; ++j) {
        const cplx e = std::polar(1.0, -probes_[j] * t);
        epr_[j] = e.real();
        epi_[j] = e.imag();
      }
    }
    return ok;
  }

  /// Add C_a C_b^* e^{i Delta_p t} at the current time to the window sums.
  void accumulate() {
    for (std::size_t j = 0; j < probes_.size(); ++j) {
      // (a conj(b)) conj(ep)
      const double xr = ar_[j] * br_[j] + ai_[j] * bi_[j];
      const double xi = ai_[j] * br_[j] - ar_[j] * bi_[j];
      wr_[j] += xr * epr_[j] + xi * epi_[j];
      wi_[j] += xi * epr_[j] - xr * epi_[j];
    }
    ++window_count_;
  }

  std::size_t size() const { return probes_.size(); }
  double time() const { return static_cast<double>(steps_) * dt_; }
  std::size_t steps() const { return steps_; }
  cplx c_a(std::size_t j) const { return {ar_[j], ai_[j]}; }
  cplx c_b(std::size_t j) const { return {br_[j], bi_[j]}; }
  /// Window average of C_a C_b^* e^{i Delta_p t}.
  cplx window_mean(std::size_t j) const {
    return window_count_ ? cplx(wr_[j], wi_[j]) / static_cast<double>(window_count_) : cplx{};
  }

 private:
  static constexpr std::size_t refresh_interval = 1024;

  double delta1_;
  std::vector<double> probes_;
  double omega_p_;
  double gamma_;
  double dt_;
  std::vector<double> ar_, ai_, br_, bi_, epr_, epi_, rr_, ri_, wr_, wi_, pop_;
  cplx e1_{1.0, 0.0};
  cplx rot1_;
  std::size_t steps_ = 0;
  std::size_t window_count_ = 0;
};

inline void check_step_resolution(double dt, double max_detuning) {
  if (!(dt > 0.0)) throw ValidationError("integrator: dt must be > 0");
  if (dt * std::abs(max_detuning) > max_phase_per_step * (1.0 + 1e-12))
    throw ValidationError("integrator: dt * max|detuning| must be <= 0.05 to resolve the carrier phases");
}

/// Integrate from (C_a, C_b, C_c) = (0, 0, 1) under drive samples Omega_1(t_k)
/// (held over each step). Returns n_steps + 1 states including t = 0. Throws
/// PerturbativeBreakdown with the step index if the bound is exceeded.
inline std::vector<AmplitudeState> integrate_amplitude_equations(const ThreeLevelParams& p,
                                                                 std::span<const cplx> drive_path, double dt,
                                                                 std::size_t n_steps) {
  if (!(p.gamma_b > 0.0)) throw ValidationError("integrator: gamma_b must be > 0");
  check_step_resolution(dt, std::max(std::abs(p.delta1), std::abs(p.delta_p)));
  if (drive_path.size() < n_steps) throw ValidationError("integrator: drive path shorter than n_steps");

  const double probe[] = {p.delta_p};
  ProbeBank bank(p.delta1, probe, p.omega_p, p.gamma_b, dt);
  std::vector<AmplitudeState> out;
  out.reserve(n_steps + 1);
  out.push_back({});
  for (std::size_t k = 0; k < n_steps; ++k) {
    if (!bank.step(drive_path[k]))
      throw PerturbativeBreakdown("integrator: |C_a|^2 + |C_b|^2 exceeded 0.1 at step " + std::to_string(k + 1),
                                  k + 1);
    out.push_back({bank.c_a(0), bank.c_b(0), cplx(1.0, 0.0), bank.time()});
  }
  return out;
}

}  // namespace wlc
