#pragma once

// Monte Carlo verifiers for the semigroup smoothing estimate and its
// Hardy-weighted version. Trial fields are sums of periodic Gaussian bumps
// whose parameters are drawn independently of the grid, so refining the grid
// refines the same continuum ensemble. The first few trials are fixed probe
// profiles (bump at the origin and off-center) to pin the near-extremal
// configurations.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "frachh/field.hpp"
#include "frachh/hardy.hpp"
#include "frachh/rng.hpp"
#include "frachh/semigroup.hpp"

namespace frachh {

// Periodic Gaussian bump via the nearest image per axis.
inline Field bump_field(const SpatialGrid& grid, const std::array<double, 3>& center, double width,
                        double amplitude) {
  Field out = Field::zeros(grid);
  const double period = 2.0 * grid.half_period();
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const auto x = grid.point(j);
    double d2 = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double dd = std::remainder(x[d] - center[d], period);
      d2 += dd * dd;
    }
    out.values[j] = amplitude * std::exp(-0.5 * d2 / (width * width));
  }
  return out;
}

struct TrialFieldOptions {
  int bumps = 3;
  double min_width_over_L = 1.0 / 16.0;  // keeps widths >= 8 dx on n = 256
  double max_width_over_L = 1.0 / 4.0;
};

inline Field random_trial_field(const SpatialGrid& grid, GaussianStream& rng,
                                const TrialFieldOptions& opt = {}) {
  const double L = grid.half_period();
  Field out = Field::zeros(grid);
  for (int b = 0; b < opt.bumps; ++b) {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int d = 0; d < grid.dim(); ++d) c[d] = rng.uniform(-L, L);
    const double w = rng.uniform(opt.min_width_over_L * L, opt.max_width_over_L * L);
    const double a = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.2, 1.0);
    out = out + bump_field(grid, c, w, a);
  }
  return out;
}

// Deterministic probe profiles tried before the random trials.
inline std::vector<Field> probe_fields(const SpatialGrid& grid) {
  const double L = grid.half_period();
  std::vector<Field> probes;
  probes.push_back(bump_field(grid, {0.0, 0.0, 0.0}, L / 16.0, 1.0));
  probes.push_back(bump_field(grid, {0.0, 0.0, 0.0}, L / 8.0, 1.0));
  probes.push_back(bump_field(grid, {0.0, 0.0, 0.0}, L / 3.0, 1.0));
  probes.push_back(bump_field(grid, {0.5 * L, 0.0, 0.0}, L / 8.0, 1.0));
  probes.push_back(bump_field(grid, {0.25 * L, 0.0, 0.0}, L / 16.0, -1.0) +
                   bump_field(grid, {-0.25 * L, 0.0, 0.0}, L / 12.0, 1.0));
  return probes;
}

// max over trials and t of ||e^(-tA) phi||_q t^((N/theta)(1/p-1/q)) / ||phi||_p.
inline double verify_smoothing(const SpatialGrid& grid, double theta, double p, double q,
                               const std::vector<double>& t_list, int trials, std::uint64_t seed) {
  if (!(p >= 1.0) || !(q >= p)) throw std::invalid_argument("verify_smoothing requires 1 <= p <= q");
  if (!(theta > 0.0)) throw std::invalid_argument("verify_smoothing requires theta > 0");
  const double exponent =
      (static_cast<double>(grid.dim()) / theta) * (1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q));
  GaussianStream rng(seed);
  double worst = 0.0;
  std::vector<Field> fields = probe_fields(grid);
  for (int k = 0; k < trials; ++k) fields.push_back(random_trial_field(grid, rng));
  for (const Field& phi : fields) {
    const double denom = lebesgue_norm(phi, p);
    if (denom == 0.0) continue;
    for (double t : t_list) {
      const Field evolved = apply_semigroup(phi, t, theta);
      const double ratio = lebesgue_norm(evolved, q) * std::pow(t, exponent) / denom;
      worst = std::max(worst, ratio);
    }
  }
  return worst;
}

// max over trials and t of ||S_{theta,gamma}(t) phi||_q t^((N/theta)(1/p-1/q)+gamma/theta)
// / ||phi||_p. Parameters must satisfy 1/q < gamma/N + 1/p < 1. The q = infinity
// endpoint is accepted but lies outside the estimate's stated range.
inline double verify_hardy_estimate(const SpatialGrid& grid, double theta, double gamma, double p,
                                    double q, const std::vector<double>& t_list, int trials,
                                    std::uint64_t seed) {
  if (!(p > 1.0) || !(q > 1.0))
    throw std::invalid_argument("verify_hardy_estimate requires p, q > 1");
  if (!(theta > 0.0)) throw std::invalid_argument("verify_hardy_estimate requires theta > 0");
  const double N = static_cast<double>(grid.dim());
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  const double lhs = gamma / N + 1.0 / p;
  // at gamma = 0 the operator degenerates to the plain semigroup, where the
  // boundary case p = q is just the contraction bound
  const bool left_ok = (inv_q < lhs) || (gamma == 0.0 && inv_q <= 1.0 / p);
  if (!(left_ok && lhs < 1.0))
    throw std::invalid_argument(
        "verify_hardy_estimate requires 1/q < gamma/N + 1/p < 1");
  const double exponent = (N / theta) * (1.0 / p - inv_q) + gamma / theta;
  const HardyWeight w = build_hardy_weight(grid, gamma);
  GaussianStream rng(seed);
  double worst = 0.0;
  std::vector<Field> fields = probe_fields(grid);
  for (int k = 0; k < trials; ++k) fields.push_back(random_trial_field(grid, rng));
  for (const Field& phi : fields) {
    const double denom = lebesgue_norm(phi, p);
    if (denom == 0.0) continue;
    for (double t : t_list) {
      const Field evolved = apply_S(phi, t, theta, w);
      const double ratio = lebesgue_norm(evolved, q) * std::pow(t, exponent) / denom;
      worst = std::max(worst, ratio);
    }
  }
  return worst;
}

}  // namespace frachh
