#pragma once

// Iterative radix-2 complex FFT plus the N-dimensional wrapper used by the
// spectral field operations. Forward transform is the unnormalized DFT
// U_k = sum_j u_j e^(-2 pi i jk/n); the inverse carries the 1/n factor.

#include <complex>
#include <stdexcept>
#include <vector>

#include "frachh/spatial_grid.hpp"

namespace frachh {

using cdouble = std::complex<double>;

inline void fft_inplace(std::vector<cdouble>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft length must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * SpatialGrid::kPi / static_cast<double>(len);
    const cdouble wlen = std::polar(1.0, angle);
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cdouble u = a[i + k];
        const cdouble v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

// Transform along every axis of a row-major dim-dimensional cube of side n.
inline void fft_nd(std::vector<cdouble>& a, const SpatialGrid& grid, bool inverse) {
  const int dim = grid.dim();
  const std::size_t n = static_cast<std::size_t>(grid.n());
  if (a.size() != grid.size()) throw std::invalid_argument("fft_nd: buffer size mismatch");
  if (dim == 1) {
    fft_inplace(a, inverse);
    return;
  }
  std::vector<cdouble> line(n);
  // axis d has stride n^(dim-1-d) in row-major order
  for (int d = 0; d < dim; ++d) {
    std::size_t stride = 1;
    for (int k = d + 1; k < dim; ++k) stride *= n;
    const std::size_t block = stride * n;
    for (std::size_t base = 0; base < a.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t j = 0; j < n; ++j) line[j] = a[base + off + j * stride];
        fft_inplace(line, inverse);
        for (std::size_t j = 0; j < n; ++j) a[base + off + j * stride] = line[j];
      }
    }
  }
}

}  // namespace frachh
