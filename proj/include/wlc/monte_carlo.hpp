// Monte Carlo estimate of the noise-averaged probe susceptibility, and the
// closed-form broadened susceptibilities it is checked against.
//
// Each trajectory draws a noisy pump Omega_1(t) = (Omega_1 + dOmega(t)) e^{i phi(t)},
// integrates the amplitude equations for every probe detuning on the scan,
// and averages C_a C_b^* e^{i Delta_p t} over [t_end / 2, t_end]. The
// ensemble mean, scaled by s / Omega_p with M_j = s Omega_j^2 / Delta0^2,
// is the susceptibility.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "wlc/amplitude.hpp"
#include "wlc/errors.hpp"
#include "wlc/medium.hpp"
#include "wlc/noise.hpp"
#include "wlc/spectral_curve.hpp"

namespace wlc {

enum class NoiseKind { none, phase, amplitude, both };

inline const char* to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::phase: return "phase";
    case NoiseKind::amplitude: return "amplitude";
    case NoiseKind::both: return "both";
  }
  return "?";
}

/// Phase-noise susceptibility: each line keeps its strength and takes the
/// width gamma_b + D_j.
inline LineSet analytic_susceptibility_phase_noise(const MediumParams& p, double gamma_b, double d1, double d2) {
  return {p.nu0, {{p.m1, p.delta, gamma_b + d1}, {p.m2, -p.delta, gamma_b + d2}}};
}

/// Amplitude-noise susceptibility: the noiseless lines (width gamma_b) plus a
/// companion of weight I_j A_j / Omega_j^2 and width gamma_b + A_j.
inline LineSet analytic_susceptibility_amplitude_noise(const MediumParams& p, double gamma_b,
                                                       const NoiseParams& noise, double omega1, double omega2) {
  const double w1 = noise.i_omega1 > 0.0 ? noise.i_omega1 * noise.a1 / (omega1 * omega1) : 0.0;
  const double w2 = noise.i_omega2 > 0.0 ? noise.i_omega2 * noise.a2 / (omega2 * omega2) : 0.0;
  return {p.nu0,
          {{p.m1, p.delta, gamma_b},
           {w1 * p.m1, p.delta, gamma_b + noise.a1},
           {p.m2, -p.delta, gamma_b},
           {w2 * p.m2, -p.delta, gamma_b + noise.a2}}};
}

struct McSettings {
  std::size_t n_traj = 2000;
  double t_end = 20.0;
  double dt = 0.0;  // 0: largest step with dt * max|detuning| <= 0.05
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // s in M_j = s Omega_j^2 / Delta0^2. Unset: Delta0^2 / Omega_1^2, so M_1 = 1.
  std::optional<double> susceptibility_scale;
};

struct McResult {
  ComplexCurve mean;       // axis is Delta_p (rad/s)
  ComplexCurve std_error;  // standard error of re and im, stored as (se_re, se_im)
  std::size_t used = 0;
  std::size_t discarded = 0;
  double dt = 0.0;
  std::size_t n_steps = 0;
  double scale = 0.0;
  std::vector<std::string> warnings;
};

/// The analytic curve the Monte Carlo estimate should reproduce, on the same
/// Delta_p axis (carrier 0, line centres at the drive detunings).
inline LineSet mc_reference_lines(const ThreeLevelParams& p, const NoiseParams& noise, NoiseKind kind,
                                  double scale) {
  LineSet ls{0.0, {}};
  struct Drive { double detuning, omega, d, i_omega, a; };
  std::vector<Drive> drives{{p.delta1, p.omega1, noise.d1, noise.i_omega1, noise.a1}};
  if (p.delta2) drives.push_back({*p.delta2, *p.omega2, noise.d2, noise.i_omega2, noise.a2});
  const bool phase = kind == NoiseKind::phase || kind == NoiseKind::both;
  const bool amplitude = kind == NoiseKind::amplitude || kind == NoiseKind::both;
  for (const Drive& d : drives) {
    const double m = scale * d.omega * d.omega / (p.delta0 * p.delta0);
    const double extra_width = phase ? d.d : 0.0;
    ls.lines.push_back({m, d.detuning, p.gamma_b + extra_width});
    if (amplitude && d.i_omega > 0.0)
      ls.lines.push_back({m * d.i_omega * d.a / (d.omega * d.omega), d.detuning, p.gamma_b + d.a + extra_width});
  }
  return ls;
}

namespace detail {

/// Pairwise (cascade) sum of f(0) .. f(n-1); the grouping depends on n only.
template <class F>
double pairwise_sum(std::size_t lo, std::size_t hi, const F& f) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f);
}

struct TransitionDrive {
  double detuning;
  double omega;
  double d;
  double i_omega;
  double a;
};

}  // namespace detail

inline double default_mc_step(const ThreeLevelParams& p, const Axis& scan) {
  double max_det = std::max({std::abs(p.delta1), std::abs(scan.at(0)), std::abs(scan.at(scan.points - 1))});
  if (p.delta2) max_det = std::max(max_det, std::abs(*p.delta2));
  return max_phase_per_step / max_det;
}

inline McResult estimate_susceptibility_mc(const ThreeLevelParams& p, const NoiseParams& noise, NoiseKind kind,
                                           const Axis& delta_p_scan, const McSettings& s) {
  McResult out;
  ThreeLevelParams probe_check = p;
  for (double dp : {delta_p_scan.at(0), delta_p_scan.at(delta_p_scan.points - 1)}) {
    probe_check.delta_p = dp;
    for (auto& w : validate(probe_check))
      if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
  }
  validate(noise);
  if (s.n_traj < 100) throw ValidationError("mc: n_traj must be >= 100");
  if (!(s.t_end >= 10.0 / p.gamma_b)) throw ValidationError("mc: t_end must be >= 10 / gamma_b");
  if (delta_p_scan.points < 2) throw ValidationError("mc: scan needs >= 2 points");

  out.dt = s.dt > 0.0 ? s.dt : default_mc_step(p, delta_p_scan);
  double max_det = std::max({std::abs(p.delta1), std::abs(delta_p_scan.at(0)),
                             std::abs(delta_p_scan.at(delta_p_scan.points - 1))});
  if (p.delta2) max_det = std::max(max_det, std::abs(*p.delta2));
  check_step_resolution(out.dt, max_det);
  out.n_steps = static_cast<std::size_t>(std::llround(s.t_end / out.dt));
  const std::size_t window_start = (out.n_steps + 1) / 2;
  out.scale = s.susceptibility_scale.value_or(p.delta0 * p.delta0 / (p.omega1 * p.omega1));

  const bool phase = kind == NoiseKind::phase || kind == NoiseKind::both;
  const bool amplitude = kind == NoiseKind::amplitude || kind == NoiseKind::both;
  std::vector<detail::TransitionDrive> drives{{p.delta1, p.omega1, noise.d1, noise.i_omega1, noise.a1}};
  if (p.delta2) drives.push_back({*p.delta2, *p.omega2, noise.d2, noise.i_omega2, noise.a2});

  std::vector<double> probes(delta_p_scan.points);
  for (std::size_t j = 0; j < probes.size(); ++j) probes[j] = delta_p_scan.at(j);
  const std::size_t n_probe = probes.size();

  // Per-trajectory results, written once by whichever worker runs it.
  std::vector<cplx> results(s.n_traj * n_probe);
  std::vector<char> aborted(s.n_traj, 0);
  const double norm = out.scale / p.omega_p;

  auto run_trajectory = [&](std::size_t k) {
    std::span<cplx> row(results.data() + k * n_probe, n_probe);
    std::vector<cplx> drive(out.n_steps);
    for (std::size_t t = 0; t < drives.size(); ++t) {
      const auto& d = drives[t];
      Engine rng = substream(s.seed, k, t);
      std::vector<double> phi, amp;
      if (phase && d.d > 0.0) phi = sample_phase_path(d.d, out.dt, out.n_steps, rng);
      if (amplitude && d.i_omega > 0.0) amp = sample_ou_path(d.i_omega, d.a, out.dt, out.n_steps, rng);
      for (std::size_t i = 0; i < out.n_steps; ++i) {
        const double mod = d.omega + (amp.empty() ? 0.0 : amp[i]);
        drive[i] = phi.empty() ? cplx(mod, 0.0) : std::polar(mod, phi[i]);
      }
      ProbeBank bank(d.detuning, probes, p.omega_p, p.gamma_b, out.dt);
      for (std::size_t i = 0; i < out.n_steps; ++i) {
        if (!bank.step(drive[i])) {
          aborted[k] = 1;
          return;
        }
        if (i + 1 >= window_start) bank.accumulate();
      }
      for (std::size_t j = 0; j < n_probe; ++j) row[j] += norm * bank.window_mean(j);
    }
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(s.threads, static_cast<unsigned>(s.n_traj)));
  if (n_threads == 1) {
    for (std::size_t k = 0; k < s.n_traj; ++k) run_trajectory(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < s.n_traj; k = next++) run_trajectory(k);
      });
  }

  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < s.n_traj; ++k)
    if (!aborted[k]) kept.push_back(k);
  out.used = kept.size();
  out.discarded = s.n_traj - kept.size();
  if (out.used < 2) throw PerturbativeBreakdown("mc: fewer than two trajectories stayed perturbative", 0);

  out.mean = {delta_p_scan.start, delta_p_scan.step, std::vector<cplx>(n_probe)};
  out.std_error = out.mean;
  const double n = static_cast<double>(out.used);
  for (std::size_t j = 0; j < n_probe; ++j) {
    auto at = [&](std::size_t i) { return results[kept[i] * n_probe + j]; };
    const double mre = detail::pairwise_sum(0, out.used, [&](std::size_t i) { return at(i).real(); }) / n;
    const double mim = detail::pairwise_sum(0, out.used, [&](std::size_t i) { return at(i).imag(); }) / n;
    const double vre = detail::pairwise_sum(0, out.used, [&](std::size_t i) {
                         const double d = at(i).real() - mre;
                         return d * d;
                       }) / (n - 1.0);
    const double vim = detail::pairwise_sum(0, out.used, [&](std::size_t i) {
                         const double d = at(i).imag() - mim;
                         return d * d;
                       }) / (n - 1.0);
    out.mean.values[j] = {mre, mim};
    out.std_error.values[j] = {std::sqrt(vre / n), std::sqrt(vim / n)};
  }
  if (out.discarded > 0)
    out.warnings.push_back(std::to_string(out.discarded) + " trajectories left the perturbative regime");
  return out;
}

}  // namespace wlc
