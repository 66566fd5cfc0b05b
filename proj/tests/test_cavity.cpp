#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "wlc/cavity.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using wlc::CavityParams;
using wlc::DoubletMedium;
using wlc::EmptyMedium;

namespace {

const double nu_rb = wlc::angular_frequency_from_wavelength(780e-9);

wlc::MediumParams wlc_doublet(double delta_hz, double gamma_hz) {
  const double d = wlc::hz_to_rad_s(delta_hz);
  const double g = wlc::hz_to_rad_s(gamma_hz);
  const double m = wlc::solve_coupling_for_wlc(d, g, nu_rb);
  return {m, m, d, g, nu_rb, std::nullopt};
}

}  // namespace

TEST_CASE("desk cavity geometry", "[cavity]") {
  const auto cav = wlc::desk_cavity();
  CHECK_NOTHROW(wlc::validate(cav));
  CHECK_THAT(wlc::finesse(cav), WithinRel(300.0, 1e-12));
  CHECK_THAT(cav.r_amp * cav.r_amp + cav.t_amp * cav.t_amp, WithinRel(1.0, 1e-15));
  CHECK_THAT(wlc::free_spectral_range(cav), WithinRel(std::numbers::pi * wlc::speed_of_light / 0.1, 1e-15));
  CHECK_THAT(wlc::empty_fwhm_exact(cav), WithinRel(wlc::empty_fwhm(cav), 1e-4));
}

TEST_CASE("empty cavity: resonance and anti-resonance", "[cavity]") {
  const auto snap = wlc::snap_to_resonance(wlc::desk_cavity(), nu_rb);
  const auto& cav = snap.cavity;
  const EmptyMedium empty{nu_rb};
  CHECK_THAT(wlc::transmission(empty, cav, nu_rb), WithinRel(1.0, 1e-9));
  const double anti = nu_rb + 0.5 * wlc::free_spectral_range(cav);
  const double r2 = cav.r_amp * cav.r_amp, t2 = cav.t_amp * cav.t_amp;
  CHECK_THAT(wlc::transmission(empty, cav, anti), WithinRel(t2 * t2 / ((1 + r2) * (1 + r2)), 1e-6));
}

TEST_CASE("snapping puts a mode exactly at the centre", "[cavity]") {
  const auto base = wlc::desk_cavity();
  const auto s = wlc::snap_to_resonance(base, nu_rb);
  CHECK(std::abs(s.length_shift) <= 0.5 * std::numbers::pi * wlc::speed_of_light / nu_rb * (1 + 1e-9));
  CHECK(s.cavity.fill_length == s.cavity.length);
  CHECK_THAT(nu_rb * s.cavity.length / (std::numbers::pi * wlc::speed_of_light),
             WithinRel(static_cast<double>(s.mode), 1e-15));
  auto half = base;
  half.fill_length = 0.05;
  const auto h = wlc::snap_to_resonance(half, nu_rb);
  CHECK_THAT(h.cavity.fill_length / h.cavity.length, WithinRel(0.5, 1e-14));
}

TEST_CASE("empty cavity FWHM follows the finesse relation", "[cavity]") {
  const auto cav = wlc::desk_cavity();
  const double fw = wlc::empty_fwhm(cav);
  const auto scan = wlc::transmission_spectrum(EmptyMedium{nu_rb}, cav, nu_rb, 10.0 * fw, 2001);
  const auto w = wlc::central_fwhm(scan.curve, nu_rb);
  CHECK_THAT(w.fwhm, WithinRel(fw, 0.01));
  CHECK_THAT(w.fwhm, WithinRel(wlc::empty_fwhm_exact(cav), 1e-4));
  CHECK_THAT(w.peak, WithinRel(1.0, 1e-6));
  for (double t : scan.curve.values) {
    CHECK(t > 0.0);
    CHECK(t <= 1.0 + 1e-12);
  }
}

TEST_CASE("empty cavity is periodic in the free spectral range", "[cavity]") {
  // At an optical carrier one ulp of nu is ~0.5 rad/s, a phase error of
  // ~2e-10 rad, which the Airy slope turns into ~1e-8 in T. The tight check
  // runs at a carrier where the axis itself is exact enough.
  for (auto [nu, tol] : {std::pair{2.0e12, 1e-9}, std::pair{nu_rb, 1e-7}}) {
    const auto cav = wlc::snap_to_resonance(wlc::desk_cavity(), nu).cavity;
    const double fsr = wlc::free_spectral_range(cav);
    const double fw = wlc::empty_fwhm(cav);
    const EmptyMedium empty{nu};
    CHECK_THAT(wlc::transmission(empty, cav, nu), WithinRel(1.0, 1e-9));
    for (double x : {0.0, 0.1 * fw, 0.5 * fw, 3.0 * fw, 0.37 * fsr}) {
      const double t0 = wlc::transmission(empty, cav, nu + x);
      for (int k = 1; k <= 3; ++k) CHECK_THAT(wlc::transmission(empty, cav, nu + x + k * fsr), WithinRel(t0, tol));
    }
  }
}

TEST_CASE("a filled cavity is not periodic", "[cavity]") {
  const auto cav = wlc::snap_to_resonance(wlc::desk_cavity(), nu_rb).cavity;
  const DoubletMedium filled{wlc_doublet(3.97e5, 1e5)};
  const double fsr = wlc::free_spectral_range(cav);
  const double a = wlc::transmission(filled, cav, nu_rb);
  const double b = wlc::transmission(filled, cav, nu_rb + 10.0 * fsr);
  CHECK(std::abs(a - b) > 1e-3 * a);
  CHECK(a > 1.0);  // net gain on the central mode
}

TEST_CASE("threshold raises with the offending frequency", "[cavity]") {
  const auto cav = wlc::snap_to_resonance(wlc::desk_cavity(), nu_rb).cavity;
  const DoubletMedium strong{wlc_doublet(3.97e6, 1e6)};
  const double line = nu_rb + strong.params.delta;
  try {
    wlc::transmission(strong, cav, line);
    FAIL("expected AboveThresholdError");
  } catch (const wlc::AboveThresholdError& e) {
    CHECK(e.nu() == line);
  }
  const double alpha = strong.response(line).alpha;
  CHECK(cav.r_amp * cav.r_amp * std::exp(-2.0 * alpha * cav.fill_length) >= 1.0);
}

TEST_CASE("bandwidth ratio of an inert medium is one", "[cavity]") {
  const auto cav = wlc::desk_cavity();
  CHECK_THAT(wlc::bandwidth_gain(EmptyMedium{nu_rb}, cav).ratio, WithinRel(1.0, 1e-3));
  auto zero = wlc_doublet(3.97e5, 1e5);
  zero.m1 = zero.m2 = 0.0;
  CHECK_THAT(wlc::bandwidth_gain(DoubletMedium{zero}, cav).ratio, WithinRel(1.0, 1e-3));
}

TEST_CASE("linear dispersion stand-in widens the line by the analytic factor", "[cavity]") {
  const auto cav = wlc::desk_cavity();
  const double r2 = cav.r_amp * cav.r_amp;
  const double coeff = 4.0 * r2 / ((1.0 - r2) * (1.0 - r2));
  const double delta = 2.0 * std::asin(1.0 / std::sqrt(coeff));
  // Round-trip phase 2 nu L / c - 2 (nu - nu0)^2 L / (nu0 c) about the snapped mode.
  const double x_half = std::sqrt(delta * nu_rb * wlc::speed_of_light / (2.0 * cav.length));
  const double oracle = 2.0 * x_half / wlc::empty_fwhm_exact(cav);

  wlc::BandwidthOptions opt;
  opt.span_factor = 4.0 * oracle;
  opt.points = 40001;
  const auto r = wlc::bandwidth_gain(wlc::LinearDispersionMedium{nu_rb}, cav, opt);
  CHECK(r.ratio >= 100.0);
  CHECK_THAT(r.ratio, WithinRel(oracle, 2e-3));
}

TEST_CASE("white-light doublet widens the central feature", "[cavity]") {
  const auto cav = wlc::desk_cavity();
  const auto r = wlc::bandwidth_gain(DoubletMedium{wlc_doublet(3.97e5, 1e5)}, cav);
  INFO("ratio " << r.ratio);
  CHECK(r.ratio > 0.0);
  CHECK_THAT(r.empty_fwhm, WithinRel(wlc::empty_fwhm_exact(cav), 1e-3));

  auto off = wlc_doublet(3.97e5, 1e5);
  off.m1 = off.m2 = 0.5 * off.m1;
  CHECK_THROWS_AS(wlc::bandwidth_gain(DoubletMedium{off}, cav), wlc::ValidationError);
}

TEST_CASE("ripple metric", "[cavity]") {
  wlc::RealCurve flat{0.0, 1.0, std::vector<double>(20, 0.7)};
  CHECK(wlc::ripple_metric(flat, 0.0, 19.0) == 0.0);
  wlc::RealCurve alt{0.0, 1.0, {}};
  for (int k = 0; k < 20; ++k) alt.values.push_back(k % 2 ? 3.0 : 1.0);
  CHECK(wlc::ripple_metric(alt, 0.0, 19.0) == 0.5);
  CHECK_THROWS_AS(wlc::ripple_metric(alt, 2.0, 5.0), wlc::ValidationError);
  CHECK_THROWS_AS(wlc::ripple_metric(alt, -1.0, 5.0), wlc::ValidationError);
}

TEST_CASE("central width needs both half crossings", "[cavity]") {
  wlc::RealCurve rising{0.0, 1.0, {0.1, 0.5, 1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(wlc::central_fwhm(rising, 3.0), wlc::MeasurementError);
  wlc::RealCurve tri{0.0, 1.0, {0.0, 0.5, 1.0, 0.5, 0.0}};
  const auto w = wlc::central_fwhm(tri, 2.0);
  CHECK(w.fwhm == 2.0);
  CHECK(w.lo == 1.0);
}

TEST_CASE("cavity validation", "[cavity]") {
  auto c = wlc::desk_cavity();
  c.fill_length = 0.2;
  CHECK_THROWS_AS(wlc::validate(c), wlc::ValidationError);
  c = wlc::desk_cavity();
  c.t_amp = 0.5;
  CHECK_THROWS_AS(wlc::validate(c), wlc::ValidationError);
  c = wlc::desk_cavity();
  c.r_amp = 1.0;
  CHECK_THROWS_AS(wlc::validate(c), wlc::ValidationError);
  CHECK_THROWS_AS(wlc::transmission_spectrum(EmptyMedium{nu_rb}, wlc::desk_cavity(), nu_rb, 1e13, 11),
                  wlc::ValidationError);
}
