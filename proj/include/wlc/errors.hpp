#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wlc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// A parameter block violates one of its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

class NoRootError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "no_root"; }
};

/// Round-trip gain reached or exceeded the mirror losses.
class AboveThresholdError : public Error {
 public:
  AboveThresholdError(const std::string& what, double nu) : Error(what), nu_(nu) {}
  const char* kind() const noexcept override { return "above_threshold"; }
  double nu() const noexcept { return nu_; }

 private:
  double nu_;
};

/// |C_a|^2 + |C_b|^2 left the perturbative regime during integration.
class PerturbativeBreakdown : public Error {
 public:
  PerturbativeBreakdown(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  const char* kind() const noexcept override { return "perturbative_breakdown"; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class MeasurementError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "measurement"; }
};

}  // namespace wlc
