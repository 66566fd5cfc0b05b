#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "wlc/noise.hpp"

using Catch::Matchers::WithinAbs;

namespace {

struct Moments {
  double mean = 0.0, var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

}  // namespace

TEST_CASE("phase path starts at zero and has variance 2 D t", "[noise]") {
  const double d = 1.5, dt = 0.01;
  const std::size_t steps = 200, paths = 10000;
  std::vector<double> at_mid, at_end;
  for (std::size_t k = 0; k < paths; ++k) {
    auto rng = wlc::substream(99, k);
    const auto phi = wlc::sample_phase_path(d, dt, steps, rng);
    REQUIRE(phi.size() == steps + 1);
    CHECK(phi[0] == 0.0);
    at_mid.push_back(phi[steps / 2]);
    at_end.push_back(phi[steps]);
  }
  for (auto [samples, t] : {std::pair{&at_mid, 0.5 * steps * dt}, std::pair{&at_end, steps * dt}}) {
    const auto m = moments(*samples);
    const double expected = 2.0 * d * t;
    const double sigma_var = expected * std::sqrt(2.0 / (paths - 1));
    CHECK_THAT(m.var, WithinAbs(expected, 3.0 * sigma_var));
    CHECK_THAT(m.mean, WithinAbs(0.0, 3.0 * std::sqrt(expected / paths)));
  }
}

TEST_CASE("phase path covariance D (t + t' - |t - t'|)", "[noise]") {
  const double d = 0.8, dt = 0.02;
  const std::size_t paths = 10000;
  double cov = 0.0;
  for (std::size_t k = 0; k < paths; ++k) {
    auto rng = wlc::substream(5, k);
    const auto phi = wlc::sample_phase_path(d, dt, 100, rng);
    cov += phi[30] * phi[100];
  }
  cov /= paths;
  const double t1 = 30 * dt;
  const double expected = 2.0 * d * t1;
  // var(phi1 phi2) = E[phi1^2 phi2^2] - cov^2 = 2 s1^2 + s1^2 (s2 - s1) for nested increments
  const double s1 = expected, s2 = 2.0 * d * 100 * dt;
  const double sd = std::sqrt((2.0 * s1 * s1 + s1 * (s2 - s1)) / paths);
  CHECK_THAT(cov, WithinAbs(expected, 3.0 * sd));
}

TEST_CASE("zero diffusion gives a flat phase", "[noise]") {
  auto rng = wlc::substream(1, 0);
  for (double v : wlc::sample_phase_path(0.0, 0.1, 50, rng)) CHECK(v == 0.0);
}

TEST_CASE("OU path: stationary variance and exponential lag decay", "[noise]") {
  const double i_omega = 0.4, a = 2.0, dt = 0.01;
  const std::size_t paths = 10000, steps = 100;
  std::vector<double> x0, xn;
  double lag10 = 0.0, lag50 = 0.0;
  for (std::size_t k = 0; k < paths; ++k) {
    auto rng = wlc::substream(2024, k);
    const auto x = wlc::sample_ou_path(i_omega, a, dt, steps, rng);
    x0.push_back(x[0]);
    xn.push_back(x[steps]);
    lag10 += x[20] * x[30];
    lag50 += x[20] * x[70];
  }
  const double var = i_omega * a;
  const double sigma_var = var * std::sqrt(2.0 / (paths - 1));
  CHECK_THAT(moments(x0).var, WithinAbs(var, 3.0 * sigma_var));
  CHECK_THAT(moments(xn).var, WithinAbs(var, 3.0 * sigma_var));
  CHECK_THAT(moments(xn).mean, WithinAbs(0.0, 3.0 * std::sqrt(var / paths)));
  for (auto [sum, lag] : {std::pair{lag10, 10}, std::pair{lag50, 50}}) {
    const double rho = std::exp(-a * lag * dt);
    const double sd = var * std::sqrt((1.0 + rho * rho) / paths);
    CHECK_THAT(sum / paths, WithinAbs(var * rho, 3.0 * sd));
  }
}

TEST_CASE("seeded paths are reproducible and streams are distinct", "[noise]") {
  CHECK(wlc::sample_phase_path(1.0, 0.01, 100, 7) == wlc::sample_phase_path(1.0, 0.01, 100, 7));
  CHECK(wlc::sample_ou_path(1.0, 2.0, 0.01, 100, 7) == wlc::sample_ou_path(1.0, 2.0, 0.01, 100, 7));
  CHECK(wlc::sample_phase_path(1.0, 0.01, 100, 7) != wlc::sample_phase_path(1.0, 0.01, 100, 8));
  auto a = wlc::substream(7, 3, 0);
  auto b = wlc::substream(7, 3, 1);
  auto c = wlc::substream(7, 4, 0);
  const auto first = a();
  CHECK(first != b());
  CHECK(first != c());
  auto a2 = wlc::substream(7, 3, 0);
  CHECK(first == a2());
}

TEST_CASE("noise parameter validation", "[noise]") {
  CHECK_NOTHROW(wlc::validate(wlc::NoiseParams{}));
  CHECK_THROWS_AS(wlc::validate(wlc::NoiseParams{-1.0, 0, 0, 0, 0, 0}), wlc::ValidationError);
  CHECK_THROWS_AS(wlc::validate(wlc::NoiseParams{0, 0, 1.0, 0, 0, 0}), wlc::ValidationError);
  CHECK_NOTHROW(wlc::validate(wlc::NoiseParams{0, 0, 1.0, 0, 2.0, 0}));
  auto rng = wlc::substream(0, 0);
  CHECK_THROWS_AS(wlc::sample_phase_path(1.0, 0.0, 10, rng), wlc::ValidationError);
  CHECK_THROWS_AS(wlc::sample_ou_path(1.0, 0.0, 0.1, 10, rng), wlc::ValidationError);
}
