#pragma once

// Real scalar fields on the periodic grid, their discrete Lebesgue norms and
// spectral access. Fields are plain value objects.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "frachh/fft.hpp"
#include "frachh/spatial_grid.hpp"

namespace frachh {

struct Field {
  SpatialGrid grid;
  std::vector<double> values;  // row-major, length grid.size()

  static Field zeros(const SpatialGrid& g) { return Field{g, std::vector<double>(g.size(), 0.0)}; }

  static Field sample(const SpatialGrid& g,
                      const std::function<double(const std::array<double, 3>&)>& f) {
    Field out = zeros(g);
    for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] = f(g.point(j));
    return out;
  }

  bool finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline void check_same_grid(const Field& a, const Field& b, const char* what) {
  if (a.grid != b.grid) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

inline Field operator+(const Field& a, const Field& b) {
  check_same_grid(a, b, "field addition");
  Field out = a;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += b.values[j];
  return out;
}

inline Field operator-(const Field& a, const Field& b) {
  check_same_grid(a, b, "field subtraction");
  Field out = a;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] -= b.values[j];
  return out;
}

inline Field operator*(double c, const Field& a) {
  Field out = a;
  for (auto& v : out.values) v *= c;
  return out;
}

inline double field_mean(const Field& u) {
  double s = 0.0;
  for (double v : u.values) s += v;
  return s / static_cast<double>(u.values.size());
}

// Discrete L^q norm: (dx^N sum |u|^q)^(1/q), max norm for q = infinity.
inline double lebesgue_norm(const Field& u, double q) {
  if (!(q >= 1.0)) throw std::domain_error("lebesgue_norm requires q >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::fabs(v));
    return m;
  }
  const double cell = std::pow(u.grid.dx(), u.grid.dim());
  double s = 0.0;
  for (double v : u.values) s += std::pow(std::fabs(v), q);
  return std::pow(cell * s, 1.0 / q);
}

inline std::vector<cdouble> to_spectrum(const Field& u) {
  std::vector<cdouble> a(u.values.size());
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = cdouble(u.values[j], 0.0);
  fft_nd(a, u.grid, false);
  return a;
}

// Inverse transform; the imaginary residue of the result is reported through
// max_imag (should be at rounding level for conjugate-symmetric spectra).
inline Field from_spectrum(const SpatialGrid& grid, std::vector<cdouble> spectrum,
                           double* max_imag = nullptr) {
  fft_nd(spectrum, grid, true);
  Field out = Field::zeros(grid);
  double residue = 0.0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    out.values[j] = spectrum[j].real();
    residue = std::max(residue, std::fabs(spectrum[j].imag()));
  }
  if (max_imag) *max_imag = residue;
  return out;
}

}  // namespace frachh
