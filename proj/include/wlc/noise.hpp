// Laser noise generators: Wiener-Levy phase diffusion and Ornstein-Uhlenbeck
// amplitude fluctuations, with reproducible per-trajectory substreams.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wlc/errors.hpp"

namespace wlc {

using Engine = std::mt19937_64;

/// Independent generator for stream `index` (e.g. a trajectory number) under
/// a master seed. Depends only on (seed, index, lane), never on scheduling.
inline Engine substream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(lane), 0x57a7e5edU};
  return Engine(seq);
}

struct NoiseParams {
  double d1 = 0.0, d2 = 0.0;              // phase diffusion bandwidths D_j, rad/s
  double i_omega1 = 0.0, i_omega2 = 0.0;  // amplitude-noise scales I_Omega_j, (rad/s)^2 s
  double a1 = 0.0, a2 = 0.0;              // amplitude-noise bandwidths A_j, rad/s

  bool operator==(const NoiseParams&) const = default;
};

inline void validate(const NoiseParams& n) {
  const double all[] = {n.d1, n.d2, n.i_omega1, n.i_omega2, n.a1, n.a2};
  for (double v : all)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("noise: all fields must be finite and >= 0");
  if (n.i_omega1 > 0.0 && !(n.a1 > 0.0)) throw ValidationError("noise: a1 must be > 0 when i_omega1 > 0");
  if (n.i_omega2 > 0.0 && !(n.a2 > 0.0)) throw ValidationError("noise: a2 must be > 0 when i_omega2 > 0");
}

/// Wiener-Levy phase phi(t_k), k = 0..n_steps, phi(0) = 0, with independent
/// Gaussian increments of variance 2 D dt, so <phi(t) phi(t')> = D (t + t' - |t - t'|).
inline std::vector<double> sample_phase_path(double d, double dt, std::size_t n_steps, Engine& rng) {
  if (!(d >= 0.0)) throw ValidationError("phase noise: d must be >= 0");
  if (!(dt > 0.0)) throw ValidationError("phase noise: dt must be > 0");
  std::vector<double> phi(n_steps + 1, 0.0);
  if (d == 0.0) return phi;
  const double sigma = std::sqrt(2.0 * d * dt);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < n_steps; ++k) phi[k + 1] = phi[k] + sigma * normal(rng);
  return phi;
}

inline std::vector<double> sample_phase_path(double d, double dt, std::size_t n_steps, std::uint64_t seed) {
  Engine rng = substream(seed, 0);
  return sample_phase_path(d, dt, n_steps, rng);
}

/// Stationary Ornstein-Uhlenbeck path with <x(t) x(t')> = I A exp(-A |t - t'|),
/// using the exact update x_{k+1} = x_k e^{-A dt} + sqrt(I A (1 - e^{-2 A dt})) xi_k.
inline std::vector<double> sample_ou_path(double i_omega, double a, double dt, std::size_t n_steps,
                                          Engine& rng) {
  if (!(i_omega >= 0.0)) throw ValidationError("amplitude noise: i_omega must be >= 0");
  if (!(a > 0.0)) throw ValidationError("amplitude noise: a must be > 0");
  if (!(dt > 0.0)) throw ValidationError("amplitude noise: dt must be > 0");
  std::vector<double> x(n_steps + 1, 0.0);
  if (i_omega == 0.0) return x;
  const double variance = i_omega * a;
  const double decay = std::exp(-a * dt);
  const double kick = std::sqrt(variance * -std::expm1(-2.0 * a * dt));
  std::normal_distribution<double> normal(0.0, 1.0);
  x[0] = std::sqrt(variance) * normal(rng);
  for (std::size_t k = 0; k < n_steps; ++k) x[k + 1] = x[k] * decay + kick * normal(rng);
  return x;
}

inline std::vector<double> sample_ou_path(double i_omega, double a, double dt, std::size_t n_steps,
                                          std::uint64_t seed) {
  Engine rng = substream(seed, 0);
  return sample_ou_path(i_omega, a, dt, n_steps, rng);
}

}  // namespace wlc
