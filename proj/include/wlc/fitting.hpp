// Lorentzian fits to sampled spectra.
//
// Model: y(x) = a w / ((x - c)^2 + w^2), so a < 0 describes a gain dip in Im chi.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "wlc/errors.hpp"

namespace wlc {

struct LorentzianFit {
  double amplitude = 0.0;  // a
  double center = 0.0;     // c
  double half_width = 0.0; // w
  double rms_residual = 0.0;
  bool used_grid_fallback = false;

  double operator()(double x) const {
    const double u = x - center;
    return amplitude * half_width / (u * u + half_width * half_width);
  }
};

namespace detail {

inline void check_samples(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  if (x.size() != y.size()) throw ValidationError("fit: x and y differ in length");
  if (x.size() < min_points) throw ValidationError("fit: too few samples");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ValidationError("fit: non-finite sample");
}

inline double rms(std::span<const double> x, std::span<const double> y, const LorentzianFit& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f(x[i]);
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(x.size()));
}

/// Peak of |y| as the centre; half-width from the nearest half-depth crossings.
inline LorentzianFit initial_guess(std::span<const double> x, std::span<const double> y) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (std::abs(y[i]) > std::abs(y[k])) k = i;
  const double peak = y[k];
  const double half = 0.5 * std::abs(peak);
  auto crossing = [&](std::ptrdiff_t dir) {
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(k); i + dir >= 0 &&
                                                            i + dir < static_cast<std::ptrdiff_t>(y.size());
         i += dir) {
      const double y0 = std::abs(y[i]), y1 = std::abs(y[i + dir]);
      if (y1 <= half) {
        const double f = (y0 - half) / (y0 - y1);
        return std::abs(x[i] + f * (x[i + dir] - x[i]) - x[k]);
      }
    }
    return -1.0;
  };
  const double lo = crossing(-1), hi = crossing(+1);
  double w;
  if (lo > 0.0 && hi > 0.0) w = 0.5 * (lo + hi);
  else if (lo > 0.0 || hi > 0.0) w = std::max(lo, hi);
  else w = 0.25 * std::abs(x.back() - x.front());
  return {peak * w, x[k], w, 0.0, false};
}

struct LorentzFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::span<const double> x, y;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(x.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = x[i] - p[1];
      r[static_cast<Eigen::Index>(i)] = p[0] * p[2] / (u * u + p[2] * p[2]) - y[i];
    }
    return 0;
  }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double u = x[i] - p[1];
      const double w = p[2];
      const double den = u * u + w * w;
      j(row, 0) = w / den;
      j(row, 1) = 2.0 * p[0] * w * u / (den * den);
      j(row, 2) = p[0] * (u * u - w * w) / (den * den);
    }
    return 0;
  }
};

/// Coarse search over centre and width with the amplitude solved linearly.
inline LorentzianFit grid_fit(std::span<const double> x, std::span<const double> y, const LorentzianFit& guess) {
  const double span = std::abs(x.back() - x.front());
  const double dx = span / static_cast<double>(x.size() - 1);
  LorentzianFit best = guess;
  best.rms_residual = rms(x, y, guess);
  for (int ic = -20; ic <= 20; ++ic) {
    const double c = guess.center + 0.5 * dx * ic;
    for (int iw = 0; iw <= 60; ++iw) {
      const double w = std::max(0.1 * dx, guess.half_width) * std::pow(10.0, (iw - 30) / 30.0);
      double sgy = 0.0, sgg = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] - c;
        const double g = w / (u * u + w * w);
        sgy += g * y[i];
        sgg += g * g;
      }
      LorentzianFit f{sgy / sgg, c, w, 0.0, true};
      f.rms_residual = rms(x, y, f);
      if (f.rms_residual < best.rms_residual) best = f;
    }
  }
  best.used_grid_fallback = true;
  return best;
}

}  // namespace detail

/// Unweighted nonlinear least squares (Levenberg-Marquardt). Falls back to a
/// coarse grid search, flagged in the result, when the solver does not converge
/// to a finite positive width.
inline LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y) {
  detail::check_samples(x, y, 4);
  const LorentzianFit guess = detail::initial_guess(x, y);
  if (guess.amplitude == 0.0) throw MeasurementError("fit: signal is identically zero");

  detail::LorentzFunctor fn{x, y};
  Eigen::VectorXd p(3);
  p << guess.amplitude, guess.center, guess.half_width;
  Eigen::LevenbergMarquardt<detail::LorentzFunctor> lm(fn);
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(p);

  LorentzianFit fit{p[0], p[1], std::abs(p[2]), 0.0, false};
  using Space = Eigen::LevenbergMarquardtSpace::Status;
  const bool converged = status != Space::ImproperInputParameters && status != Space::TooManyFunctionEvaluation &&
                         status != Space::UserAsked && status != Space::Running && status != Space::NotStarted;
  const bool sane = converged && std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2]) &&
                    p[2] != 0.0 && p[1] >= x.front() - (x.back() - x.front()) &&
                    p[1] <= x.back() + (x.back() - x.front());
  if (!sane) return detail::grid_fit(x, y, guess);
  fit.rms_residual = detail::rms(x, y, fit);
  return fit;
}

/// Two Lorentzians sharing a centre with fixed half-widths w0 and w1:
/// y = s0 L(w0) + s1 L(w1) with L(w) = w / ((x - c)^2 + w^2).
struct TwoComponentFit {
  double strength0 = 0.0;
  double strength1 = 0.0;
  double weight = 0.0;  // strength1 / strength0
  double rms_residual = 0.0;
};

/// Linear least squares for the two strengths; the widths and centre are
/// taken as known.
inline TwoComponentFit fit_two_component(std::span<const double> x, std::span<const double> y, double center,
                                         double w0, double w1) {
  detail::check_samples(x, y, 3);
  if (!(w0 > 0.0) || !(w1 > 0.0) || w0 == w1) throw ValidationError("fit: widths must be > 0 and distinct");
  Eigen::MatrixXd a(x.size(), 2);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double u = x[i] - center;
    a(row, 0) = w0 / (u * u + w0 * w0);
    a(row, 1) = w1 / (u * u + w1 * w1);
    b[row] = y[i];
  }
  const Eigen::Vector2d s = a.colPivHouseholderQr().solve(b);
  TwoComponentFit out{s[0], s[1], s[1] / s[0], 0.0};
  out.rms_residual = std::sqrt((a * s - b).squaredNorm() / static_cast<double>(x.size()));
  return out;
}

}  // namespace wlc
