#pragma once

// Truncated cylindrical fBm noise and the stochastic convolution Z(t) that
// solves the linear problem. Per retained torus mode with eigenvalue
// lambda = |xi|^theta, the vector (Z_k(t_1),...,Z_k(t_M)) is drawn exactly
// from the mode covariance
//   C(t,t') = H(2H-1) int_0^t int_0^t' e^(-(t-s)lambda) e^(-(t'-r)lambda)
//             |s-r|^(2H-2) ds dr
// by Cholesky factorization; the field is assembled with conjugate-symmetric
// spectral coefficients so realizations are real.

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "frachh/fbm.hpp"
#include "frachh/field.hpp"
#include "frachh/linalg.hpp"
#include "frachh/quadrature.hpp"
#include "frachh/rng.hpp"
#include "frachh/time_grid.hpp"

namespace frachh {

namespace detail {

inline double mode_cov_product_quadrature(double lambda, double t, double tp, double H,
                                          int cells) {
  const double alpha = 2.0 * H - 2.0;
  const double tmax = std::max(t, tp);
  const int ns = std::max(1, static_cast<int>(std::lround(cells * t / tmax)));
  const int nr = std::max(1, static_cast<int>(std::lround(cells * tp / tmax)));
  const double hs = t / ns;
  const double hr = tp / nr;
  // separable exponential factors at midpoints
  std::vector<double> es(ns), er(nr);
  for (int a = 0; a < ns; ++a) es[a] = std::exp(-lambda * (t - (a + 0.5) * hs));
  for (int b = 0; b < nr; ++b) er[b] = std::exp(-lambda * (tp - (b + 0.5) * hr));
  double total = 0.0;
  for (int a = 0; a < ns; ++a) {
    const double s0 = a * hs, s1 = s0 + hs;
    double row = 0.0;
    for (int b = 0; b < nr; ++b) {
      const double r0 = b * hr, r1 = r0 + hr;
      row += er[b] * abs_power_rect_integral(alpha, s0, s1, r0, r1);
    }
    total += es[a] * row;
  }
  return H * (2.0 * H - 1.0) * total;
}

}  // namespace detail

// Scalar mode covariance by product quadrature: the exponentials are frozen
// at cell midpoints, the singular |s-r|^(2H-2) factor is integrated exactly
// over every cell pair; two resolutions are combined by Richardson
// extrapolation of the O(h^2) freeze error. lambda = 0 reduces to the fBm
// covariance, exactly.
inline double mode_convolution_covariance(double lambda, double t, double tp, Hurst h,
                                          int cells = 512) {
  const double H = h.value();
  if (H <= 0.5) throw std::invalid_argument("mode_convolution_covariance requires H > 1/2");
  if (lambda < 0.0) throw std::domain_error("mode_convolution_covariance requires lambda >= 0");
  if (t < 0.0 || tp < 0.0) throw std::domain_error("mode covariance requires t, t' >= 0");
  if (t == 0.0 || tp == 0.0) return 0.0;
  if (lambda == 0.0) return fbm_covariance(t, tp, h);
  if (cells < 4) cells = 4;
  const double coarse = detail::mode_cov_product_quadrature(lambda, t, tp, H, cells / 2);
  const double fine = detail::mode_cov_product_quadrature(lambda, t, tp, H, cells);
  return fine + (fine - coarse) / 3.0;
}

// Mode covariance matrix over the grid nodes t_1..t_M via an O(Q^2)
// recurrence on the subdivided grid (Q = M*subdiv cells). Equivalent to
// Z_d(t_i) = sum_a e^(-(t_i-m_a)lambda) dB_a, a Gram matrix, hence positive
// semidefinite by construction.
inline std::vector<double> mode_covariance_matrix(double lambda, const TimeGrid& tgrid, Hurst h,
                                                  int subdiv = 4) {
  const double H = h.value();
  if (H <= 0.5) throw std::invalid_argument("mode covariance requires H > 1/2");
  if (subdiv < 1) throw std::invalid_argument("subdiv must be >= 1");
  const int m = tgrid.steps();
  const int q = m * subdiv;
  const double hfine = tgrid.dt() / subdiv;
  const double twoH = 2.0 * H;
  // w[d] = E[dB_a dB_b] for fine-cell lag d
  std::vector<double> w(q);
  const double cell_pow = std::pow(hfine, twoH);
  w[0] = cell_pow;
  for (int d = 1; d < q; ++d)
    w[d] = 0.5 * cell_pow *
           (std::pow(d + 1.0, twoH) - 2.0 * std::pow(d, twoH) + std::pow(d - 1.0, twoH));
  const double efull = std::exp(-lambda * hfine);
  const double ehalf = std::exp(-0.5 * lambda * hfine);
  std::vector<double> s(q + 1, 0.0);   // S(I, .) rolled over I
  std::vector<double> tk(q + 1, 0.0);  // T_I(.)
  std::vector<double> cov(static_cast<std::size_t>(m) * m, 0.0);
  for (int bigI = 0; bigI < q; ++bigI) {
    tk[0] = 0.0;
    for (int j = 0; j < q; ++j)
      tk[j + 1] = efull * tk[j] + ehalf * w[std::abs(bigI - j)];
    for (int j = 0; j <= q; ++j) s[j] = efull * s[j] + ehalf * tk[j];
    if ((bigI + 1) % subdiv == 0) {
      const int i = (bigI + 1) / subdiv;  // coarse row, 1-based
      for (int j = 1; j <= m; ++j)
        cov[static_cast<std::size_t>(i - 1) * m + (j - 1)] = s[static_cast<std::size_t>(j) * subdiv];
    }
  }
  return cov;
}

struct NoiseSpec {
  SpatialGrid grid;
  double hurst;
  double mu;
  int mode_cutoff;
  std::uint64_t seed;

  void validate() const {
    if (!(hurst > 0.0 && hurst < 1.0))
      throw std::invalid_argument("noise spec: Hurst parameter must lie in (0,1)");
    if (mode_cutoff < 0 || mode_cutoff > grid.n() / 2)
      throw std::invalid_argument("noise spec: mode_cutoff must lie in [0, n/2]");
  }
};

struct ConvolutionTrajectory {
  TimeGrid tgrid;
  std::vector<Field> fields;  // one per node, fields[0] identically zero
  NoiseSpec spec;
  double max_imag_residue = 0.0;
};

namespace detail {

struct ModeRep {
  std::array<int, 3> k{0, 0, 0};
  std::uint64_t key = 0;
  double lambda = 0.0;
  bool self_conjugate = false;
};

// Representatives of {k, -k} pairs with |k|_inf <= cutoff: k = 0, the
// self-conjugate combinations, and the lexicographically positive member of
// each remaining pair.
inline std::vector<ModeRep> enumerate_modes(const SpatialGrid& grid, int cutoff, double theta) {
  std::vector<ModeRep> reps;
  const int dim = grid.dim();
  std::array<int, 3> k{0, 0, 0};
  const std::uint64_t base = static_cast<std::uint64_t>(2 * cutoff + 1);
  auto lex_positive = [&](const std::array<int, 3>& v) {
    for (int d = 0; d < dim; ++d) {
      if (v[d] > 0) return true;
      if (v[d] < 0) return false;
    }
    return false;  // zero
  };
  auto recurse = [&](auto&& self, int d) -> void {
    if (d == dim) {
      bool self_conj = true;  // k and -k wrap to the same DFT slot
      bool zero = true;
      for (int dd = 0; dd < dim; ++dd) {
        if (k[dd] != 0) zero = false;
        if (k[dd] != 0 && std::abs(2 * k[dd]) != grid.n()) self_conj = false;
      }
      if (!zero && !lex_positive(k)) return;  // the -k partner carries it
      ModeRep rep;
      rep.k = k;
      rep.self_conjugate = self_conj;
      std::uint64_t key = 0;
      double xi2 = 0.0;
      for (int dd = 0; dd < dim; ++dd) {
        key = key * base + static_cast<std::uint64_t>(k[dd] + cutoff);
        const double xi = k[dd] * (SpatialGrid::kPi / grid.half_period());
        xi2 += xi * xi;
      }
      rep.key = key;
      rep.lambda = std::pow(std::sqrt(xi2), theta);
      if (xi2 == 0.0) rep.lambda = 0.0;
      reps.push_back(rep);
      return;
    }
    for (int v = -cutoff; v <= cutoff; ++v) {
      k[d] = v;
      self(self, d + 1);
    }
  };
  recurse(recurse, 0);
  return reps;
}

}  // namespace detail

inline ConvolutionTrajectory sample_stochastic_convolution(const NoiseSpec& spec,
                                                           const TimeGrid& tgrid, double theta,
                                                           int subdiv = 4) {
  spec.validate();
  if (!(spec.hurst > 0.5))
    throw std::invalid_argument(
        "stochastic convolution sampling requires H > 1/2 (exact-in-law regime)");
  if (!(theta > 0.0)) throw std::invalid_argument("stochastic convolution requires theta > 0");
  const Hurst h(spec.hurst);
  const int m = tgrid.steps();
  const SpatialGrid& grid = spec.grid;
  const double basis_norm = std::pow(2.0 * grid.half_period(), -0.5 * grid.dim());
  const auto reps = detail::enumerate_modes(grid, spec.mode_cutoff, theta);

  // factor each distinct eigenvalue once
  std::map<double, std::vector<double>> factors;
  for (const auto& rep : reps) {
    if (factors.count(rep.lambda)) continue;
    std::vector<double> cov = mode_covariance_matrix(rep.lambda, tgrid, h, subdiv);
    try {
      factors.emplace(rep.lambda, cholesky_lower(std::move(cov), m, "mode covariance"));
    } catch (const CholeskyFailure& e) {
      throw std::runtime_error("stochastic convolution: factorization failed for mode lambda = " +
                               std::to_string(rep.lambda) + " (" + e.what() + ")");
    }
  }

  // per-node spectral buffers
  std::vector<std::vector<cdouble>> spectra(
      m, std::vector<cdouble>(grid.size(), cdouble(0.0, 0.0)));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<double> zx(m), zy(m);
  for (const auto& rep : reps) {
    const auto& factor = factors.at(rep.lambda);
    GaussianStream sx(derive_stream(spec.seed, 2 * rep.key));
    for (int i = 0; i < m; ++i) zx[i] = sx.normal();
    std::vector<double> x = lower_tri_multiply(factor, m, zx);
    std::vector<double> y;
    if (!rep.self_conjugate) {
      GaussianStream sy(derive_stream(spec.seed, 2 * rep.key + 1));
      for (int i = 0; i < m; ++i) zy[i] = sy.normal();
      y = lower_tri_multiply(factor, m, zy);
    }
    // phase (-1)^(sum k_d) from x_j = -L + j dx
    int parity = 0;
    std::array<int, 3> kwrap{0, 0, 0};
    std::array<int, 3> kneg{0, 0, 0};
    for (int d = 0; d < grid.dim(); ++d) {
      parity += rep.k[d];
      kwrap[d] = (rep.k[d] % grid.n() + grid.n()) % grid.n();
      kneg[d] = ((-rep.k[d]) % grid.n() + grid.n()) % grid.n();
    }
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    const std::size_t idx = grid.flatten(kwrap);
    const std::size_t idx_neg = grid.flatten(kneg);
    for (int i = 0; i < m; ++i) {
      if (rep.self_conjugate) {
        spectra[i][idx] += cdouble(sign * x[i], 0.0);
      } else {
        const cdouble c(inv_sqrt2 * x[i], inv_sqrt2 * y[i]);
        spectra[i][idx] += sign * c;
        spectra[i][idx_neg] += sign * std::conj(c);
      }
    }
  }

  ConvolutionTrajectory out{tgrid, {}, spec, 0.0};
  out.fields.reserve(m + 1);
  out.fields.push_back(Field::zeros(grid));  // Z(0) = 0
  const double scale = spec.mu * basis_norm * static_cast<double>(grid.size());
  for (int i = 0; i < m; ++i) {
    double residue = 0.0;
    Field f = from_spectrum(grid, std::move(spectra[i]), &residue);
    for (auto& v : f.values) v *= scale;
    out.max_imag_residue = std::max(out.max_imag_residue, std::fabs(scale) * residue);
    out.fields.push_back(std::move(f));
  }
  return out;
}

// K(T)-style statistic: sup_i ||Z(t_i)||_q + sup_{i>=1} t_i^sigma ||Z(t_i)||_r,
// restricted to nodes with t_i <= horizon (default: the whole trajectory).
inline double K_statistic(const ConvolutionTrajectory& z, double sigma, double q, double r,
                          double horizon = -1.0) {
  if (!(sigma > 0.0)) throw std::invalid_argument("K_statistic requires sigma > 0");
  if (!(q >= 1.0) || !(r >= 1.0)) throw std::invalid_argument("K_statistic requires q, r >= 1");
  if (z.fields.empty()) throw std::invalid_argument("K_statistic on empty trajectory");
  if (horizon < 0.0) horizon = z.tgrid.horizon();
  double sup_q = 0.0;
  double sup_r = 0.0;
  for (int i = 0; i < static_cast<int>(z.fields.size()); ++i) {
    const double t = z.tgrid.node(i);
    if (t > horizon * (1.0 + 1e-12)) break;
    sup_q = std::max(sup_q, lebesgue_norm(z.fields[i], q));
    if (i >= 1) sup_r = std::max(sup_r, std::pow(t, sigma) * lebesgue_norm(z.fields[i], r));
  }
  return sup_q + sup_r;
}

// Exact second moment E||Z(t)||_2^2 = mu^2 sum_k C_k(t,t) over retained modes
// (the mode-truncation convergence diagnostic).
inline double expected_l2_squared(const NoiseSpec& spec, double t, double theta, int cells = 256) {
  spec.validate();
  const Hurst h(spec.hurst);
  const auto reps = detail::enumerate_modes(spec.grid, spec.mode_cutoff, theta);
  double sum = 0.0;
  std::map<double, double> cache;
  for (const auto& rep : reps) {
    auto it = cache.find(rep.lambda);
    double c;
    if (it != cache.end()) {
      c = it->second;
    } else {
      c = mode_convolution_covariance(rep.lambda, t, t, h, cells);
      cache.emplace(rep.lambda, c);
    }
    sum += rep.self_conjugate ? c : 2.0 * c;
  }
  return spec.mu * spec.mu * sum;
}

}  // namespace frachh
