// Result files: CSV spectra with shortest round-trip numbers, and JSON reports.
#pragma once

#include <charconv>
#include <complex>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlc/errors.hpp"
#include "wlc/spectral_curve.hpp"

namespace wlc::cli {

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf, end);
}

inline void append_row(std::string& out, std::initializer_list<double> cols) {
  bool first = true;
  for (double c : cols) {
    if (!first) out += ',';
    out += format_double(c);
    first = false;
  }
  out += '\n';
}

inline std::string csv_complex(const ComplexCurve& c) {
  std::string out = "nu_rad_s,re,im\n";
  for (std::size_t k = 0; k < c.size(); ++k) append_row(out, {c.nu(k), c.values[k].real(), c.values[k].imag()});
  return out;
}

/// Mean curve with its standard errors; `err` stores (se_re, se_im).
inline std::string csv_complex_with_error(const ComplexCurve& mean, const ComplexCurve& err) {
  std::string out = "nu_rad_s,re,im,re_stderr,im_stderr\n";
  for (std::size_t k = 0; k < mean.size(); ++k)
    append_row(out, {mean.nu(k), mean.values[k].real(), mean.values[k].imag(), err.values[k].real(),
                     err.values[k].imag()});
  return out;
}

inline std::string csv_transmission(const RealCurve& c) {
  std::string out = "nu_rad_s,T\n";
  for (std::size_t k = 0; k < c.size(); ++k) append_row(out, {c.nu(k), c.values[k]});
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace wlc::cli
