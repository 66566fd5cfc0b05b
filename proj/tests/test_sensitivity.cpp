#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "wlc/condition.hpp"
#include "wlc/sensitivity.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using wlc::MediumParams;
using wlc::Perturbation;
using wlc::PerturbationKind;

namespace {

MediumParams rubidium_doublet() {
  const double delta = wlc::hz_to_rad_s(3.97e6);
  const double gamma = wlc::hz_to_rad_s(1e6);
  const double nu0 = wlc::angular_frequency_from_wavelength(780e-9);
  const double m = wlc::solve_coupling_for_wlc(delta, gamma, nu0);
  return {m, m, delta, gamma, nu0, std::nullopt};
}

}  // namespace

TEST_CASE("intensity deviations", "[sensitivity]") {
  const MediumParams p{1.0, 1.0, 2.0, 1.0, 1e9, std::nullopt};
  CHECK_THAT(wlc::deviation_from_intensity(p, 0.0, 0.01).delta_n, WithinRel(2e-3, 1e-14));

  const auto opposite = wlc::deviation_from_intensity(p, 0.02, -0.02);
  CHECK(opposite.rel_dispersion == 0.0);

  const auto common = wlc::deviation_from_intensity(p, 0.03, 0.03);
  CHECK(common.rel_dispersion == 0.03);
  CHECK(common.delta_n == 0.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int i = 0; i < 100; ++i) {
    const auto r = wlc::deviation_from_intensity(p, u(rng), u(rng));
    CHECK(r.rel_dispersion == r.rel_absorption);
  }
}

TEST_CASE("density deviation leaves the index unchanged", "[sensitivity]") {
  const auto r = wlc::deviation_from_density(rubidium_doublet(), 1e-3);
  CHECK(r.rel_dispersion == 1e-3);
  CHECK(r.rel_absorption == 1e-3);
  CHECK(r.delta_n == 0.0);
  CHECK(wlc::deviation_from_density(rubidium_doublet(), 0.0) == wlc::DeviationReport{});

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const MediumParams q{u(rng) + 0.1, 0.0, 1.0 + u(rng), 0.1 + u(rng), 1e8, std::nullopt};
    const auto d = wlc::deviation_from_density(q, u(rng) - 0.5);
    CHECK(d.delta_n == 0.0);
    CHECK(d.rel_dispersion == d.rel_absorption);
  }
}

TEST_CASE("drive-frequency coefficients reproduce the rubidium numbers", "[sensitivity]") {
  const auto p = rubidium_doublet();
  const auto c = wlc::drive_frequency_coefficients(p);
  // per rad/s of (dnu1 + dnu2)
  CHECK_THAT(c.dn_per_sum, WithinRel(2.07e-16, 5e-3));
  CHECK_THAT(c.dn_per_sum, WithinRel(1.0 / (2.0 * p.nu0), 1e-12));
  // Same medium with splitting, width and shifts all in cyclic Hz.
  const double m_hz = wlc::solve_coupling_for_wlc(3.97e6, 1e6, p.nu0);
  const auto hz = wlc::drive_frequency_coefficients({m_hz, m_hz, 3.97e6, 1e6, p.nu0, std::nullopt});
  CHECK_THAT(hz.dalpha_per_diff, WithinRel(8.97e-10, 5e-3));
  CHECK_THAT(hz.rel_disp_per_diff, WithinRel(-2.05e-7, 5e-3));
  CHECK_THAT(hz.rel_disp_per_diff, WithinRel(wlc::two_pi * c.rel_disp_per_diff, 1e-12));
}

TEST_CASE("drive-frequency path is linear and common-mode free", "[sensitivity]") {
  const auto p = rubidium_doublet();
  const double e = 1e-6 * p.delta;
  const auto a = wlc::deviation_from_drive_frequency(p, e, -0.3 * e);
  const auto b = wlc::deviation_from_drive_frequency(p, 2.0 * e, -0.6 * e);
  CHECK_THAT(b.delta_n, WithinRel(2.0 * a.delta_n, 1e-15));
  CHECK_THAT(*b.abs_absorption, WithinRel(2.0 * *a.abs_absorption, 1e-15));
  CHECK_THAT(b.rel_dispersion, WithinRel(2.0 * a.rel_dispersion, 1e-15));
  CHECK_THAT(b.rel_absorption, WithinRel(2.0 * a.rel_absorption, 1e-15));

  const auto cm = wlc::deviation_from_drive_frequency(p, e, e);
  CHECK(*cm.abs_absorption == 0.0);
  CHECK(cm.rel_dispersion == 0.0);
  CHECK(cm.delta_n != 0.0);

  auto singular = p;
  singular.gamma_line = singular.delta;
  CHECK_THROWS_AS(wlc::drive_frequency_coefficients(singular), wlc::ValidationError);
  auto lopsided = p;
  lopsided.m2 *= 1.1;
  CHECK_THROWS_AS(wlc::drive_frequency_coefficients(lopsided), wlc::ValidationError);
}

TEST_CASE("index coefficient at the white-light condition is 1 / 2 nu0", "[sensitivity]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double g = 1e6 * (1.0 + 10.0 * u(rng));
    const double d = g * (1.5 + 30.0 * u(rng));
    const double nu0 = 1e15 * (1.0 + u(rng));
    const double m = wlc::solve_coupling_for_wlc(d, g, nu0);
    const auto c = wlc::drive_frequency_coefficients({m, m, d, g, nu0, std::nullopt});
    CHECK_THAT(c.dn_per_sum, WithinRel(1.0 / (2.0 * nu0), 1e-12));
  }
}

TEST_CASE("linearisation check: intensity and density are exact", "[sensitivity]") {
  const auto p = rubidium_doublet();
  for (double eps : {1e-6, 1e-3, 0.1}) {
    CHECK(wlc::validate_linearization(p, {PerturbationKind::intensity, 1.0, 0.4}, eps).max_rel_error <= 1e-9);
    CHECK(wlc::validate_linearization(p, {PerturbationKind::density, 1.0, 0.0}, eps).max_rel_error <= 1e-9);
  }
  const auto zero = wlc::validate_linearization(p, {PerturbationKind::drive_frequency, 1.0, -1.0}, 0.0);
  CHECK(zero.predicted.delta_n == 0.0);
  CHECK(zero.exact.delta_n == 0.0);
  CHECK(zero.exact.rel_dispersion == 0.0);
  CHECK(zero.max_rel_error == 0.0);
}

TEST_CASE("linearisation check: drive frequency error is second order", "[sensitivity]") {
  const auto p = rubidium_doublet();
  const Perturbation dir{PerturbationKind::drive_frequency, 1.0, -0.5};
  CHECK(wlc::validate_linearization(p, dir, 1e-4 * p.delta).max_rel_error <= 1e-3);
  const double e4 = wlc::validate_linearization(p, dir, 1e-4 * p.delta).max_rel_error;
  const double e5 = wlc::validate_linearization(p, dir, 1e-5 * p.delta).max_rel_error;
  CHECK(e4 / e5 >= 8.0);
  // The truncation gap itself is second order; relative to a first-order
  // quantity it falls linearly.
  for (double f = 1e-3; f >= 1e-6 * 1.999; f *= 0.5) {
    const auto big = wlc::validate_linearization(p, dir, f * p.delta);
    const auto small = wlc::validate_linearization(p, dir, 0.5 * f * p.delta);
    CHECK(big.max_rel_error / small.max_rel_error >= 1.8);
    const double gap_big = std::abs(big.predicted.delta_n - big.exact.delta_n);
    const double gap_small = std::abs(small.predicted.delta_n - small.exact.delta_n);
    if (gap_small > 1e-12 * std::abs(small.exact.delta_n)) CHECK(gap_big / gap_small >= 3.5);
    const double disp_big = std::abs(big.predicted.rel_dispersion - big.exact.rel_dispersion);
    const double disp_small = std::abs(small.predicted.rel_dispersion - small.exact.rel_dispersion);
    CHECK(disp_big / disp_small >= 3.5);
  }
}

TEST_CASE("dispersion budget sums magnitudes", "[sensitivity]") {
  const auto p = rubidium_doublet();
  const auto c = wlc::drive_frequency_coefficients(p);
  const wlc::DeviationTolerances tol{1e-5, -2e-5, 3e-5, 10.0, -20.0};
  const auto b = wlc::dispersion_budget(p, tol, 1e-4);
  CHECK_THAT(b.from_intensity, WithinRel(1.5e-5, 1e-14));
  CHECK_THAT(b.from_density, WithinRel(3e-5, 1e-14));
  CHECK_THAT(b.from_drive_frequency, WithinRel(std::abs(c.rel_disp_per_diff) * 30.0, 1e-14));
  CHECK_THAT(b.worst_case_rel_dispersion, WithinRel(b.from_intensity + b.from_density + b.from_drive_frequency, 1e-15));
  CHECK(b.within_target == (b.worst_case_rel_dispersion <= 1e-4));
  CHECK_FALSE(wlc::dispersion_budget(p, {0.0, 0.0, 2e-4, 0.0, 0.0}).within_target);
}
