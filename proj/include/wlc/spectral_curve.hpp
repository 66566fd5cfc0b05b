#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "wlc/errors.hpp"

namespace wlc {

/// Uniformly sampled spectrum. The axis is stored as (origin, step) only, so
/// sample k sits at exactly nu_start + k * nu_step.
template <class T>
struct SpectralCurve {
  double nu_start = 0.0;
  double nu_step = 1.0;
  std::vector<T> values;

  std::size_t size() const { return values.size(); }
  double nu(std::size_t k) const { return nu_start + static_cast<double>(k) * nu_step; }
  double nu_stop() const { return nu(values.size() - 1); }

  void check() const {
    if (!(nu_step > 0.0)) throw ValidationError("spectral curve: nu_step must be positive");
    if (values.size() < 2) throw ValidationError("spectral curve: needs at least 2 samples");
  }

  bool operator==(const SpectralCurve&) const = default;
};

using ComplexCurve = SpectralCurve<std::complex<double>>;
using RealCurve = SpectralCurve<double>;

/// Axis for n_points samples covering [start, stop] inclusive.
struct Axis {
  double start;
  double step;
  std::size_t points;

  static Axis spanning(double start, double stop, std::size_t points) {
    if (points < 2) throw ValidationError("scan: n_points must be >= 2");
    if (!(stop > start)) throw ValidationError("scan: nu_stop must exceed nu_start");
    return {start, (stop - start) / static_cast<double>(points - 1), points};
  }
  static Axis centered(double center, double span, std::size_t points) {
    return spanning(center - 0.5 * span, center + 0.5 * span, points);
  }

  double at(std::size_t k) const { return start + static_cast<double>(k) * step; }
};

}  // namespace wlc
