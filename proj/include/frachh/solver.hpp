#pragma once

// Picard fixed-point construction of the mild solution. The Duhamel term is
// discretized by product integration: the source is frozen at the left node
// of each panel and the semigroup factor is integrated exactly per frequency,
// which absorbs the (t-s) singularity into the spectral weight.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "frachh/field.hpp"
#include "frachh/hardy.hpp"
#include "frachh/io.hpp"
#include "frachh/ktheta.hpp"
#include "frachh/noise.hpp"
#include "frachh/semigroup.hpp"
#include "frachh/time_grid.hpp"
#include "frachh/verify.hpp"
#include "frachh/wellposedness.hpp"

namespace frachh {

struct InitialCondition {
  enum class Kind { Zero, Sine, Bump, FromFile };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  int mode = 1;         // sine frequency index along the first axis
  double width = 0.5;   // bump width
  std::string path;     // FromFile
};

inline Field build_initial_condition(const SpatialGrid& grid, const InitialCondition& ic) {
  switch (ic.kind) {
    case InitialCondition::Kind::Zero:
      return Field::zeros(grid);
    case InitialCondition::Kind::Sine: {
      const double k = ic.mode * SpatialGrid::kPi / grid.half_period();
      return Field::sample(grid, [&](const std::array<double, 3>& x) {
        return ic.amplitude * std::sin(k * x[0]);
      });
    }
    case InitialCondition::Kind::Bump:
      return bump_field(grid, {0.0, 0.0, 0.0}, ic.width, ic.amplitude);
    case InitialCondition::Kind::FromFile: {
      Field f = read_field_binary(ic.path);
      if (f.grid != grid)
        throw std::invalid_argument("initial condition file grid does not match solver grid");
      return f;
    }
  }
  throw std::logic_error("unreachable initial condition kind");
}

// 2/3-rule truncation: zero every coefficient with a frequency index above
// floor(n/3) on any axis.
inline void dealias_spectrum(std::vector<cdouble>& spec, const SpatialGrid& grid) {
  const int cutoff = grid.n() / 3;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const auto idx = grid.unflatten(j);
    for (int d = 0; d < grid.dim(); ++d) {
      if (std::abs(grid.freq_index(idx[d])) > cutoff) {
        spec[j] = cdouble(0.0, 0.0);
        break;
      }
    }
  }
}

// d(u,v) = sup_i ||u_i - v_i||_q + sup_{i>=1} t_i^sigma ||u_i - v_i||_r.
inline double metric_d(std::span<const Field> u, std::span<const Field> v, const TimeGrid& tgrid,
                       double sigma, double q, double r) {
  if (u.size() != v.size() || u.size() != static_cast<std::size_t>(tgrid.steps()) + 1)
    throw std::invalid_argument("metric_d: trajectory length mismatch");
  double sup_q = 0.0, sup_r = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    check_same_grid(u[i], v[i], "metric_d");
    const Field diff = u[i] - v[i];
    sup_q = std::max(sup_q, lebesgue_norm(diff, q));
    if (i >= 1)
      sup_r = std::max(sup_r, std::pow(tgrid.node(static_cast<int>(i)), sigma) *
                                  lebesgue_norm(diff, r));
  }
  return sup_q + sup_r;
}

namespace detail {

// Per-frequency exact panel integral of the semigroup factor:
//   int_0^dt e^(-lambda s) ds = (1 - e^(-lambda dt)) / lambda  (dt at lambda=0).
struct DuhamelTables {
  std::vector<double> decay;   // e^(-lambda_k dt)
  std::vector<double> weight;  // (1 - e^(-lambda_k dt)) / lambda_k
};

inline DuhamelTables duhamel_tables(const SpatialGrid& grid, double dt, double theta) {
  DuhamelTables t;
  t.decay.resize(grid.size());
  t.weight.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double lambda = std::pow(grid.xi_norm(j), theta);
    const double e = std::exp(-lambda * dt);
    t.decay[j] = e;
    t.weight[j] = (lambda == 0.0) ? dt : (1.0 - e) / lambda;
  }
  return t;
}

}  // namespace detail

// All Duhamel integrals I(t_i) = int_0^{t_i} e^(-(t_i-s)A) source(s) ds for
// i = 0..M, with source frozen at left nodes. Sources at nodes 0..M-1 are
// used. Set dealias for the 2/3-rule truncation of the source spectra.
inline std::vector<Field> duhamel_sweep(std::span<const Field> source, const TimeGrid& tgrid,
                                        double theta, bool dealias) {
  if (source.size() < static_cast<std::size_t>(tgrid.steps()))
    throw std::invalid_argument("duhamel_sweep: need sources at nodes 0..M-1");
  const SpatialGrid& grid = source[0].grid;
  const auto tables = detail::duhamel_tables(grid, tgrid.dt(), theta);
  std::vector<Field> out;
  out.reserve(tgrid.steps() + 1);
  out.push_back(Field::zeros(grid));
  std::vector<cdouble> acc(grid.size(), cdouble(0.0, 0.0));
  for (int i = 0; i < tgrid.steps(); ++i) {
    std::vector<cdouble> src = to_spectrum(source[i]);
    if (dealias) dealias_spectrum(src, grid);
    for (std::size_t j = 0; j < acc.size(); ++j)
      acc[j] = tables.decay[j] * acc[j] + tables.weight[j] * src[j];
    out.push_back(from_spectrum(grid, acc));
  }
  return out;
}

// Single-node Duhamel integral of S_{theta,gamma}(t_i - s) source(s): the
// Hardy weight is applied to the source, then the semigroup convolution.
inline Field duhamel_quadrature(std::span<const Field> source, int node, const TimeGrid& tgrid,
                                double theta, const HardyWeight& w) {
  if (node < 0 || node > tgrid.steps()) throw std::out_of_range("duhamel_quadrature: node index");
  if (source.size() < static_cast<std::size_t>(node))
    throw std::invalid_argument("duhamel_quadrature: need sources at nodes 0..node-1");
  std::vector<Field> weighted;
  weighted.reserve(node);
  for (int a = 0; a < node; ++a) weighted.push_back(apply_weight(w, source[a]));
  if (node == 0) return Field::zeros(w.grid);
  TimeGrid partial(tgrid.node(node), node);
  return duhamel_sweep(weighted, partial, theta, false).back();
}

inline Field duhamel_quadrature(std::span<const Field> source, int node, const TimeGrid& tgrid,
                                double theta, double gamma) {
  return duhamel_quadrature(source, node, tgrid, theta,
                            build_hardy_weight(source[0].grid, gamma));
}

// The map Phi(u)(t_i) = e^(-t_i A) u0 + int_0^{t_i} S(t_i-s) |u|^(p-1)u ds + Z(t_i),
// with the noise realization fixed at construction.
class PicardOperator {
 public:
  PicardOperator(const SpatialGrid& grid, const TimeGrid& tgrid, double theta, double gamma,
                 double p, const Field& u0, std::vector<Field> noise)
      : grid_(grid),
        tgrid_(tgrid),
        theta_(theta),
        p_(p),
        weight_(build_hardy_weight(grid, gamma)),
        noise_(std::move(noise)) {
    if (noise_.size() != static_cast<std::size_t>(tgrid.steps()) + 1)
      throw std::invalid_argument("PicardOperator: noise trajectory length mismatch");
    // linear part e^(-t_i A) u0 via one forward transform
    std::vector<cdouble> u0_spec = to_spectrum(u0);
    linear_.reserve(tgrid.steps() + 1);
    linear_.push_back(u0);
    for (int i = 1; i <= tgrid.steps(); ++i) {
      std::vector<cdouble> spec = u0_spec;
      const double t = tgrid.node(i);
      for (std::size_t j = 0; j < spec.size(); ++j)
        spec[j] *= std::exp(-t * std::pow(grid.xi_norm(j), theta_));
      linear_.push_back(from_spectrum(grid, std::move(spec)));
    }
  }

  std::vector<Field> initial_iterate() const {
    std::vector<Field> u;
    u.reserve(linear_.size());
    for (std::size_t i = 0; i < linear_.size(); ++i) u.push_back(linear_[i] + noise_[i]);
    return u;
  }

  std::vector<Field> apply(std::span<const Field> u) const {
    std::vector<Field> sources;
    sources.reserve(tgrid_.steps());
    for (int a = 0; a < tgrid_.steps(); ++a)
      sources.push_back(nonlinearity(u[a], p_, weight_));
    std::vector<Field> duhamel = duhamel_sweep(sources, tgrid_, theta_, true);
    std::vector<Field> out;
    out.reserve(linear_.size());
    for (std::size_t i = 0; i < linear_.size(); ++i)
      out.push_back(linear_[i] + duhamel[i] + noise_[i]);
    return out;
  }

  const std::vector<Field>& noise() const { return noise_; }

 private:
  SpatialGrid grid_;
  TimeGrid tgrid_;
  double theta_;
  double p_;
  HardyWeight weight_;
  std::vector<Field> noise_;
  std::vector<Field> linear_;
};

struct SolverConfig {
  ModelParams params;
  SpatialGrid grid{1, 256, SpatialGrid::kPi};
  TimeGrid tgrid{1.0, 128};
  int mode_cutoff = 32;
  std::uint64_t seed = 1;
  double picard_tol = 1e-10;
  int max_picard_iters = 30;
  InitialCondition ic;
  bool override_admissibility = false;
  double c_hardy = 1.0;   // empirical constant fed into the budget
  double kappa = -1.0;    // smoothing constant; negative means compute it
  int noise_subdiv = 4;
  bool skip_budget = false;
};

struct SolutionTrajectory {
  TimeGrid tgrid;
  std::vector<Field> fields;
  std::vector<double> norm_q;
  std::vector<double> weighted_norm_r;  // t_i^sigma ||u(t_i)||_r
  std::vector<double> picard_history;
  bool converged = false;
  bool in_ball = false;
  ContractionBudget budget;
  DerivedExponents exps;
  bool admissibility_overridden = false;
  std::vector<std::string> violations;
};

inline SolutionTrajectory picard_solve(const SolverConfig& cfg) {
  const ModelParams& mp = cfg.params;
  if (cfg.grid.dim() != mp.dim)
    throw std::invalid_argument("picard_solve: grid dimension differs from params.N");
  if (!(cfg.picard_tol > 0.0) || cfg.max_picard_iters < 1)
    throw std::invalid_argument("picard_solve: need picard_tol > 0 and max_picard_iters >= 1");

  SolutionTrajectory out{cfg.tgrid, {}, {}, {}, {}, false, false, {}, {}, false, {}};
  const AdmissibilityResult adm = check_admissible(mp);
  if (adm.accepted) {
    out.exps = adm.exps;
  } else {
    if (!cfg.override_admissibility) {
      std::string msg = "parameters rejected by the admissibility check:";
      for (const auto& s : adm.violations) msg += " [" + s + "]";
      throw std::invalid_argument(msg + " (pass the override flag to run anyway)");
    }
    out.admissibility_overridden = true;
    out.violations = adm.violations;
    out.exps = exponents(mp, default_r(mp.p, mp.q));
  }
  const double sigma = out.exps.sigma;
  const double r = out.exps.r;

  const Field u0 = build_initial_condition(cfg.grid, cfg.ic);

  std::vector<Field> noise_fields;
  ConvolutionTrajectory z{cfg.tgrid, {}, NoiseSpec{cfg.grid, mp.hurst, mp.mu, cfg.mode_cutoff, cfg.seed}, 0.0};
  if (mp.mu != 0.0) {
    z = sample_stochastic_convolution(z.spec, cfg.tgrid, mp.theta, cfg.noise_subdiv);
    noise_fields = z.fields;
  } else {
    noise_fields.assign(cfg.tgrid.steps() + 1, Field::zeros(cfg.grid));
    z.fields = noise_fields;
  }

  if (!cfg.skip_budget) {
    const double kappa = (cfg.kappa >= 0.0) ? cfg.kappa : smoothing_constant(mp.theta, mp.dim);
    auto k_of_t = [&](double T) {
      return (mp.mu == 0.0) ? 0.0 : K_statistic(z, sigma, mp.q, r, T);
    };
    out.budget = existence_budget(out.exps, mp.p, kappa, cfg.c_hardy, lebesgue_norm(u0, mp.q), k_of_t);
    if (cfg.tgrid.horizon() > out.budget.t_star && !cfg.override_admissibility) {
      throw std::invalid_argument(
          "horizon T = " + std::to_string(cfg.tgrid.horizon()) +
          " exceeds the contraction budget T* = " + std::to_string(out.budget.t_star) +
          " (pass the override flag to run anyway)");
    }
  }

  PicardOperator phi(cfg.grid, cfg.tgrid, mp.theta, mp.gamma, mp.p, u0, std::move(noise_fields));
  std::vector<Field> u = phi.initial_iterate();
  for (int k = 0; k < cfg.max_picard_iters; ++k) {
    std::vector<Field> v = phi.apply(u);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!v[i].finite())
        throw std::runtime_error("picard iterate became non-finite at node " + std::to_string(i) +
                                 " (t = " + std::to_string(cfg.tgrid.node(static_cast<int>(i))) +
                                 ") during iteration " + std::to_string(k + 1));
    const double gap = metric_d(v, u, cfg.tgrid, sigma, mp.q, r);
    out.picard_history.push_back(gap);
    u = std::move(v);
    if (gap < cfg.picard_tol) {
      out.converged = true;
      break;
    }
  }

  out.fields = std::move(u);
  out.norm_q.resize(out.fields.size());
  out.weighted_norm_r.resize(out.fields.size());
  double sup_q = 0.0, sup_r = 0.0;
  for (std::size_t i = 0; i < out.fields.size(); ++i) {
    out.norm_q[i] = lebesgue_norm(out.fields[i], mp.q);
    out.weighted_norm_r[i] =
        (i == 0) ? 0.0
                 : std::pow(cfg.tgrid.node(static_cast<int>(i)), sigma) *
                       lebesgue_norm(out.fields[i], r);
    sup_q = std::max(sup_q, out.norm_q[i]);
    sup_r = std::max(sup_r, out.weighted_norm_r[i]);
  }
  out.in_ball = !cfg.skip_budget && out.budget.feasible &&
                sup_q <= out.budget.ball_radius && sup_r <= out.budget.ball_radius;
  return out;
}

}  // namespace frachh
