#pragma once

// The singular weight |x|^(-gamma) with an exactly cell-averaged origin, the
// power nonlinearity |u|^(p-1) u, and the weighted-then-smoothed operator
// S_{theta,gamma}(t) = e^(-t(-Laplace)^(theta/2)) |.|^(-gamma).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "frachh/field.hpp"
#include "frachh/semigroup.hpp"
#include "frachh/spatial_grid.hpp"

namespace frachh {

namespace detail {

// integral of |x|^(-gamma) over [0,a]^N. With G(a) the integral over
// [0,a]^N minus [0,a/2]^N, homogeneity gives G(a/2) = 2^(gamma-N) G(a), so
//   I(a) = sum_j G(a 2^-j) = G(a) / (1 - 2^(gamma-N)).
// G itself is smooth (the shell stays away from the origin) and is done by
// tensor Gauss-Legendre over the 2^N - 1 non-corner subcells.
inline double octant_singular_integral(double gamma, double a, int dim) {
  static constexpr double kNodes[8] = {
      0.019855071751231884158, 0.101666761293186630204, 0.237233795041835507091,
      0.408282678752175097530, 0.591717321247824902470, 0.762766204958164492909,
      0.898333238706813369796, 0.980144928248768115842};
  static constexpr double kWeights[8] = {
      0.050614268145188129577, 0.111190517226687235272, 0.156853322938943643668,
      0.181341891689180991482, 0.181341891689180991482, 0.156853322938943643668,
      0.111190517226687235272, 0.050614268145188129577};
  const double half = 0.5 * a;
  const int pts = (dim == 1) ? 8 : (dim == 2 ? 64 : 512);
  double shell = 0.0;
  for (int c = 1; c < (1 << dim); ++c) {  // c = 0 would be the origin corner
    double cell = 0.0;
    for (int p = 0; p < pts; ++p) {
      double w = 1.0;
      double r2 = 0.0;
      int pp = p;
      for (int d = 0; d < dim; ++d) {
        const int node = pp % 8;
        pp /= 8;
        const double lo = (c >> d & 1) ? half : 0.0;
        const double x = lo + half * kNodes[node];
        w *= kWeights[node];
        r2 += x * x;
      }
      cell += w * std::pow(r2, -0.5 * gamma);
    }
    shell += cell * std::pow(half, dim);
  }
  return shell / (1.0 - std::pow(2.0, gamma - dim));
}

// Mean of |x|^(-gamma) over the cell [-h/2,h/2]^N.
inline double origin_cell_average(double gamma, double h, int dim) {
  if (gamma == 0.0) return 1.0;
  if (dim == 1) return std::pow(0.5 * h, -gamma) / (1.0 - gamma);
  const double cells = 1 << dim;  // octant symmetry
  return cells * octant_singular_integral(gamma, 0.5 * h, dim) / std::pow(h, dim);
}

}  // namespace detail

struct HardyWeight {
  SpatialGrid grid;
  double gamma;
  std::vector<double> values;
};

inline HardyWeight build_hardy_weight(const SpatialGrid& grid, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("hardy weight requires gamma >= 0");
  if (gamma >= static_cast<double>(grid.dim()))
    throw std::invalid_argument("hardy weight requires gamma < N for local integrability");
  HardyWeight w{grid, gamma, std::vector<double>(grid.size(), 1.0)};
  if (gamma == 0.0) return w;
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    const double r = grid.radius(j);
    w.values[j] = (r == 0.0) ? detail::origin_cell_average(gamma, grid.dx(), grid.dim())
                             : std::pow(r, -gamma);
  }
  return w;
}

inline Field apply_weight(const HardyWeight& w, const Field& u) {
  if (w.grid != u.grid) throw std::invalid_argument("hardy weight: grid mismatch");
  Field out = u;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] *= w.values[j];
  return out;
}

// w(x) |u|^(p-1) u, computed as sign(u) |u|^p to stay real for non-integer p.
inline Field nonlinearity(const Field& u, double p, const HardyWeight& w) {
  if (w.grid != u.grid) throw std::invalid_argument("nonlinearity: grid mismatch");
  if (!(p >= 1.0)) throw std::domain_error("nonlinearity requires p >= 1");
  Field out = u;
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const double v = u.values[j];
    out.values[j] = w.values[j] * (v >= 0.0 ? 1.0 : -1.0) * std::pow(std::fabs(v), p);
  }
  return out;
}

inline Field apply_S(const Field& u, double t, double theta, const HardyWeight& w) {
  if (!(t > 0.0))
    throw std::invalid_argument("S_{theta,gamma} requires t > 0 (weighted data may leave L^q)");
  return apply_semigroup(apply_weight(w, u), t, theta);
}

inline Field apply_S(const Field& u, double t, double theta, double gamma) {
  return apply_S(u, t, theta, build_hardy_weight(u.grid, gamma));
}

}  // namespace frachh
