#pragma once

// The fractional heat semigroup e^(-t(-Laplace)^(theta/2)) as the Fourier
// multiplier e^(-t|xi|^theta) on the torus. The xi = 0 factor is exactly one,
// so the flow conserves the field mean.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "frachh/field.hpp"

namespace frachh {

struct SemigroupMultiplier {
  double theta;
  double t;
  std::vector<double> factors;  // one per flat spectral index, all in (0,1]
};

inline SemigroupMultiplier build_semigroup_multiplier(const SpatialGrid& grid, double t,
                                                      double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("semigroup requires theta > 0");
  if (t < 0.0) throw std::invalid_argument("semigroup requires t >= 0");
  SemigroupMultiplier m{theta, t, std::vector<double>(grid.size())};
  for (std::size_t j = 0; j < m.factors.size(); ++j)
    m.factors[j] = std::exp(-t * std::pow(grid.xi_norm(j), theta));
  return m;
}

inline Field apply_semigroup(const Field& u, double t, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("semigroup requires theta > 0");
  if (t < 0.0) throw std::invalid_argument("semigroup requires t >= 0");
  if (t == 0.0) return u;  // identity, exactly
  const SemigroupMultiplier m = build_semigroup_multiplier(u.grid, t, theta);
  std::vector<cdouble> spec = to_spectrum(u);
  for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= m.factors[j];
  return from_spectrum(u.grid, std::move(spec));
}

}  // namespace frachh
