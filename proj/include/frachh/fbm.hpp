#pragma once

// One-dimensional fractional Brownian motion: covariance, the H > 1/2
// Volterra kernel, exact Cholesky sampling, kernel-based sampling, and the
// singular inner product behind Wiener integrals against fBm.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "frachh/linalg.hpp"
#include "frachh/quadrature.hpp"
#include "frachh/rng.hpp"
#include "frachh/time_grid.hpp"

namespace frachh {

class Hurst {
 public:
  explicit Hurst(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0))
      throw std::invalid_argument("Hurst parameter must lie in (0,1)");
  }
  double value() const { return value_; }

 private:
  double value_;
};

// Covariance R(s,t) = (t^2H + s^2H - |t-s|^2H) / 2.
inline double fbm_covariance(double s, double t, Hurst h) {
  if (s < 0.0 || t < 0.0) throw std::domain_error("fbm_covariance requires s, t >= 0");
  const double twoH = 2.0 * h.value();
  return 0.5 * (std::pow(t, twoH) + std::pow(s, twoH) - std::pow(std::fabs(t - s), twoH));
}

// Normalization constant of the Volterra kernel.
inline double c_h(Hurst h) {
  const double H = h.value();
  return std::sqrt(2.0 * H * std::tgamma(1.5 - H) /
                   (std::tgamma(H + 0.5) * std::tgamma(2.0 - 2.0 * H)));
}

// Kernel K^H(t,s) for H >= 1/2 via the regular representation
//   K = c_H (H - 1/2) s^(1/2-H) integral_s^t (r-s)^(H-3/2) r^(H-1/2) dr.
// With the Molchan-Golosov constant c_H above, the (H - 1/2) factor is what
// makes int_0^t K(t,s)^2 ds = t^(2H); it also gives the right limit
// K -> 1 as H -> 1/2+. The substitution u = r-s leaves the weight u^(H-3/2),
// integrated exactly against a piecewise-linear interpolant of (u+s)^(H-1/2).
inline double volterra_kernel(double t, double s, Hurst h, int sub_panels = 256) {
  if (!(s > 0.0) || !(s < t)) throw std::domain_error("volterra_kernel requires 0 < s < t");
  const double H = h.value();
  if (H < 0.5)
    throw std::invalid_argument("volterra_kernel: kernel sampling is limited to H >= 1/2");
  if (H == 0.5) return 1.0;
  const double alpha = H - 1.5;
  const double integral = integrate_power_weighted(
      alpha, t - s, [&](double u) { return std::pow(u + s, H - 0.5); }, 40, sub_panels);
  return c_h(h) * (H - 0.5) * std::pow(s, 0.5 - H) * integral;
}

struct FbmPath {
  TimeGrid grid;
  std::vector<double> values;  // one per node, values[0] = 0
  double hurst;
  std::uint64_t seed;
};

// Exact sampler: factor the node covariance once, then each path is one
// lower-triangular multiply against i.i.d. normals.
class FbmCholeskySampler {
 public:
  FbmCholeskySampler(const TimeGrid& grid, Hurst h) : grid_(grid), hurst_(h.value()) {
    const int m = grid.steps();
    std::vector<double> cov(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        cov[static_cast<std::size_t>(i) * m + j] =
            fbm_covariance(grid.node(i + 1), grid.node(j + 1), h);
    try {
      factor_ = cholesky_lower(std::move(cov), m, "fBm node covariance");
    } catch (const CholeskyFailure&) {
      throw std::runtime_error(
          "fBm covariance factorization failed: numerically degenerate time grid");
    }
  }

  FbmPath sample(std::uint64_t seed) const {
    const int m = grid_.steps();
    GaussianStream rng(seed);
    std::vector<double> z(m);
    for (int i = 0; i < m; ++i) z[i] = rng.normal();
    std::vector<double> body = lower_tri_multiply(factor_, m, z);
    FbmPath path{grid_, std::vector<double>(m + 1, 0.0), hurst_, seed};
    for (int i = 0; i < m; ++i) path.values[i + 1] = body[i];
    return path;
  }

 private:
  TimeGrid grid_;
  double hurst_;
  std::vector<double> factor_;
};

inline FbmPath sample_fbm_cholesky(const TimeGrid& grid, Hurst h, std::uint64_t seed) {
  return FbmCholeskySampler(grid, h).sample(seed);
}

// Plain random-walk discretization of a Wiener process on the grid,
// W(t_i) = sum_{j<i} sqrt(dt) z_j. Shares the draw order of the kernel
// sampler so the two coincide bit-for-bit at H = 1/2.
inline FbmPath sample_wiener(const TimeGrid& grid, std::uint64_t seed) {
  const int m = grid.steps();
  const double root_dt = std::sqrt(grid.dt());
  GaussianStream rng(seed);
  FbmPath path{grid, std::vector<double>(m + 1, 0.0), 0.5, seed};
  for (int i = 0; i < m; ++i) path.values[i + 1] = path.values[i] + root_dt * rng.normal();
  return path;
}

// Kernel sampler: B(t_i) = sum_{j<i} K^H(t_i, m_j) dW_j with panel midpoints
// m_j. The kernel matrix is path-independent, so Monte Carlo campaigns reuse
// one instance.
class FbmVolterraSampler {
 public:
  FbmVolterraSampler(const TimeGrid& grid, Hurst h, int sub_panels = 64)
      : grid_(grid), hurst_(h.value()) {
    if (hurst_ < 0.5)
      throw std::invalid_argument(
          "fBm kernel sampler requires H >= 1/2; use the Cholesky sampler below 1/2");
    const int m = grid.steps();
    kernel_.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 1; i <= m; ++i)
      for (int j = 0; j < i; ++j)
        kernel_[static_cast<std::size_t>(i - 1) * m + j] =
            (hurst_ == 0.5) ? 1.0 : volterra_kernel(grid.node(i), grid.midpoint(j), h, sub_panels);
  }

  FbmPath sample(std::uint64_t seed) const {
    const int m = grid_.steps();
    const double root_dt = std::sqrt(grid_.dt());
    GaussianStream rng(seed);
    std::vector<double> dw(m);
    for (int j = 0; j < m; ++j) dw[j] = root_dt * rng.normal();
    FbmPath path{grid_, std::vector<double>(m + 1, 0.0), hurst_, seed};
    for (int i = 1; i <= m; ++i) {
      const double* row = kernel_.data() + static_cast<std::size_t>(i - 1) * m;
      double sum = 0.0;
      for (int j = 0; j < i; ++j) sum += row[j] * dw[j];
      path.values[i] = sum;
    }
    return path;
  }

  // Covariance of the discretized path, Cov = K diag(dt) K^T; its gap to the
  // exact covariance is the sampler's (deterministic) discretization bias.
  double discrete_covariance(int i, int k) const {
    const int m = grid_.steps();
    if (i < 1 || k < 1 || i > m || k > m) throw std::out_of_range("node index");
    const double* ri = kernel_.data() + static_cast<std::size_t>(i - 1) * m;
    const double* rk = kernel_.data() + static_cast<std::size_t>(k - 1) * m;
    double sum = 0.0;
    const int lim = std::min(i, k);
    for (int j = 0; j < lim; ++j) sum += ri[j] * rk[j];
    return sum * grid_.dt();
  }

 private:
  TimeGrid grid_;
  double hurst_;
  std::vector<double> kernel_;
};

inline FbmPath sample_fbm_volterra(const TimeGrid& grid, Hurst h, std::uint64_t seed,
                                   int sub_panels = 64) {
  return FbmVolterraSampler(grid, h, sub_panels).sample(seed);
}

// <f,g>_H = H(2H-1) int int f(s) g(t) |t-s|^(2H-2) ds dt for piecewise
// constant f, g on a uniform partition of [0,T]. The rectangle integrals of
// the singular weight are closed-form, so the result is exact for step data.
inline double fbm_inner_product(std::span<const double> f, std::span<const double> g, double T,
                                Hurst h) {
  const double H = h.value();
  if (H <= 0.5) throw std::invalid_argument("fbm_inner_product requires H > 1/2");
  if (f.size() != g.size() || f.empty())
    throw std::invalid_argument("fbm_inner_product: step functions must share one partition");
  if (!(T > 0.0)) throw std::invalid_argument("fbm_inner_product requires T > 0");
  const std::size_t m = f.size();
  const double cell = T / static_cast<double>(m);
  const double twoH = 2.0 * H;
  // w[d] = E[dB_i dB_j] for cell lag d = |i-j|
  std::vector<double> w(m);
  const double cell_pow = std::pow(cell, twoH);
  w[0] = cell_pow;
  for (std::size_t d = 1; d < m; ++d) {
    const double dd = static_cast<double>(d);
    w[d] = 0.5 * cell_pow *
           (std::pow(dd + 1.0, twoH) - 2.0 * std::pow(dd, twoH) + std::pow(dd - 1.0, twoH));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (f[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      row += g[j] * w[i >= j ? i - j : j - i];
    total += f[i] * row;
  }
  return total;
}

}  // namespace frachh
