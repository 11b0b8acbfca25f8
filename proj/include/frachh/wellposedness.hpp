#pragma once

// Parameter admissibility, derived exponents, and the existence-time /
// contraction budget. Derived exponents are computed in exact rational
// arithmetic whenever the inputs fit (every finite double is rational); on
// overflow the computation falls back to floating point with a 1e-12
// relative margin on the strict inequalities.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frachh/rational.hpp"
#include "frachh/special.hpp"

namespace frachh {

struct ModelParams {
  int dim = 1;           // N
  double theta = 2.0;
  double gamma = 0.0;
  double p = 2.0;
  double q = 2.0;
  double hurst = 0.75;   // H
  double mu = 0.0;
};

struct DerivedExponents {
  double r = 0.0;
  double sigma = 0.0;
  double a = 0.0;
  double b = 0.0;
  double a_plus_b_minus_1 = 0.0;
  double a_minus_p_sigma = 0.0;
  double a_minus_sigma = 0.0;
  double a_plus_sigma = 0.0;
  double third_slack = 0.0;  // 1 + (1-p) sigma - N(p-1)/(r theta) - gamma/theta
  bool exact = false;        // the rational path succeeded
  Rational r_rat{0}, sigma_rat{0}, a_rat{0}, b_rat{0};
};

inline double default_r(double p, double q) {
  if (!(p > 1.0) || !(q > 1.0)) throw std::invalid_argument("default_r requires p, q > 1");
  return 2.0 * p * q / (p + 1.0);
}

namespace detail {

template <typename T>
struct ExponentSet {
  T r, sigma, a, b, apb1, ampsig, amsig, apsig, third;
};

template <typename T>
ExponentSet<T> exponent_formulas(T N, T theta, T gamma, T p, T q, T r) {
  const T one(1);
  const T sigma = (N / theta) * (one / q - one / r);
  const T a = one - (N / theta) * (p / r - one / q) - gamma / theta;
  const T b = one - p * sigma;
  const T third = one + (one - p) * sigma - N * (p - one) / (r * theta) - gamma / theta;
  return {r, sigma, a, b, a + b - one, a - p * sigma, a - sigma, a + sigma, third};
}

// strict a < b: exact for rationals
inline bool strictly_less(const Rational& a, const Rational& b) { return a < b; }
// with a 1e-12 relative margin for floating point
inline bool strictly_less(double a, double b) {
  return a < b - 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

template <typename T>
bool r_in_window(T N, T gamma, T p, T q, T r) {
  const T one(1);
  const T inv_r = one / r;
  const T lower = (one / p) * (one / q - gamma / N);
  return strictly_less(lower, inv_r) && strictly_less(inv_r, one / q);
}

}  // namespace detail

// sigma, a, b and every slack quantity the fixed-point argument needs, for a given r.
// Rejects r outside the admissible window (3.1)-style: 1/p (1/q - gamma/N) < 1/r < 1/q.
inline DerivedExponents exponents(const ModelParams& mp, double r) {
  if (!(r > 1.0) || std::isinf(r)) throw std::invalid_argument("exponents requires 1 < r < inf");
  DerivedExponents out;
  bool window_ok = false;
  try {
    const Rational N(mp.dim);
    const Rational theta = Rational::from_double(mp.theta);
    const Rational gamma = Rational::from_double(mp.gamma);
    const Rational p = Rational::from_double(mp.p);
    const Rational q = Rational::from_double(mp.q);
    const Rational rr = Rational::from_double(r);
    window_ok = detail::r_in_window(N, gamma, p, q, rr);
    if (window_ok) {
      const auto e = detail::exponent_formulas(N, theta, gamma, p, q, rr);
      out.r = e.r.to_double();
      out.sigma = e.sigma.to_double();
      out.a = e.a.to_double();
      out.b = e.b.to_double();
      out.a_plus_b_minus_1 = e.apb1.to_double();
      out.a_minus_p_sigma = e.ampsig.to_double();
      out.a_minus_sigma = e.amsig.to_double();
      out.a_plus_sigma = e.apsig.to_double();
      out.third_slack = e.third.to_double();
      out.exact = true;
      out.r_rat = e.r;
      out.sigma_rat = e.sigma;
      out.a_rat = e.a;
      out.b_rat = e.b;
    }
  } catch (const RationalOverflow&) {
    const double N = mp.dim;
    window_ok = detail::r_in_window(N, mp.gamma, mp.p, mp.q, r);
    if (window_ok) {
      const auto e = detail::exponent_formulas(N, mp.theta, mp.gamma, mp.p, mp.q, r);
      out.r = e.r;
      out.sigma = e.sigma;
      out.a = e.a;
      out.b = e.b;
      out.a_plus_b_minus_1 = e.apb1;
      out.a_minus_p_sigma = e.ampsig;
      out.a_minus_sigma = e.amsig;
      out.a_plus_sigma = e.apsig;
      out.third_slack = e.third;
      out.exact = false;
    }
  }
  if (!window_ok)
    throw std::invalid_argument("exponents: r outside the admissible window (1/p)(1/q - gamma/N) < 1/r < 1/q");
  return out;
}

// Diagnostic: the refined interval bounds on 1/r,
//   (1/p) max(1/q - gamma/N, p/q - theta/N) < 1/r
//       < (1/p) min(1 - gamma/N, 1/q - gamma/N + theta/N, p/q).
// Any admissible tuple with the default r satisfies them; exposed for sweeps.
inline bool refined_r_window_ok(const ModelParams& mp, double r) {
  const double N = static_cast<double>(mp.dim);
  const double inv_r = 1.0 / r;
  const double lower =
      (1.0 / mp.p) * std::max(1.0 / mp.q - mp.gamma / N, mp.p / mp.q - mp.theta / N);
  const double upper = (1.0 / mp.p) * std::min({1.0 - mp.gamma / N,
                                                1.0 / mp.q - mp.gamma / N + mp.theta / N,
                                                mp.p / mp.q});
  return lower < inv_r && inv_r < upper;
}

struct AdmissibilityResult {
  bool accepted = false;
  std::vector<std::string> violations;
  DerivedExponents exps;  // populated when accepted
};

// Full acceptance check: structural constraints, the q and H thresholds,
// and positivity of every derived slack for the default r = 2pq/(p+1).
// Rejection is a value listing each violated inequality by name.
inline AdmissibilityResult check_admissible(const ModelParams& mp) {
  AdmissibilityResult res;
  auto& v = res.violations;
  if (mp.dim < 1) v.push_back("N < 1");
  if (!(mp.p > 1.0)) v.push_back("p <= 1");
  if (!(2.0 * mp.theta > 1.0)) v.push_back("2*theta <= 1");
  const double N = static_cast<double>(mp.dim);
  bool gamma_ok = true;
  if (!(mp.gamma > 0.0)) {
    v.push_back("gamma <= 0");
    gamma_ok = false;
  } else if (!(mp.gamma < std::min(mp.theta, N))) {
    v.push_back("gamma >= min(theta, N)");
    gamma_ok = false;
  }
  if (std::isinf(mp.q)) {
    v.push_back("q = infinity");
  } else if (gamma_ok && mp.p > 1.0) {
    const double q_min = std::max(N * mp.p / (N - mp.gamma), N * (mp.p - 1.0) / (mp.theta - mp.gamma));
    if (!(mp.q > q_min)) v.push_back("q <= max(N*p/(N-gamma), N*(p-1)/(theta-gamma))");
  }
  if (!(mp.hurst < 1.0)) v.push_back("H >= 1");
  // the N/(2 theta) threshold only makes sense once 2 theta > 1 holds
  if (2.0 * mp.theta > 1.0 && mp.q > 0.0) {
    const double h_min = std::max({1.0 / mp.q, N / (2.0 * mp.theta), 0.5});
    if (!(mp.hurst > h_min)) v.push_back("H <= max(1/q, N/(2*theta), 1/2)");
  }
  if (!v.empty()) return res;

  DerivedExponents e;
  try {
    e = exponents(mp, default_r(mp.p, mp.q));
  } catch (const std::invalid_argument&) {
    v.push_back("default r outside the admissible r-window");
    return res;
  }
  if (!(e.sigma > 0.0)) v.push_back("sigma <= 0");
  if (!(e.a > 0.0)) v.push_back("a <= 0");
  if (!(e.b > 0.0)) v.push_back("b <= 0");
  if (!(e.a_plus_b_minus_1 > 0.0)) v.push_back("a + b - 1 <= 0");
  if (!(e.a_minus_p_sigma > 0.0)) v.push_back("a - p*sigma <= 0");
  if (!(e.a_minus_sigma > 0.0)) v.push_back("a - sigma <= 0");
  if (!(e.third_slack > 0.0)) v.push_back("third positivity slack <= 0");
  if (!v.empty()) return res;
  res.accepted = true;
  res.exps = e;
  return res;
}

struct ContractionBudget {
  double kappa = 0.0;        // smoothing constant
  double ball_radius = 0.0;  // M = 2 kappa ||u0||_q + 1
  double c_hardy = 0.0;
  double lambda = 0.0;       // contraction factor at T_star
  double t_star = 0.0;       // 0 when no grid horizon is feasible
  bool feasible = false;
  std::string diagnostics;
};

// The two contraction terms C_hardy p M^(p-1) T^(a - p sigma) and ... T^(a + sigma).
inline std::pair<double, double> contraction_terms(const DerivedExponents& e, double p, double M,
                                                   double c_hardy, double T) {
  const double pref = c_hardy * p * std::pow(M, p - 1.0);
  return {pref * std::pow(T, e.a_minus_p_sigma), pref * std::pow(T, e.a_plus_sigma)};
}

inline double contraction_factor(const DerivedExponents& e, double p, double M, double c_hardy,
                                 double T) {
  const auto [t1, t2] = contraction_terms(e, p, M, c_hardy, T);
  return t1 + t2;
}

// Largest horizon T = 2^-j (j = 0..40) with both the self-map inequality and
// lambda(T) < 1. Feasibility is monotone in T because every exponent is
// positive, so the geometric scan suffices.
inline ContractionBudget existence_budget(const DerivedExponents& e, double p, double kappa,
                                          double c_hardy, double u0_norm,
                                          const std::function<double(double)>& k_of_t) {
  if (!(kappa >= 0.0) || !(c_hardy >= 0.0) || !(u0_norm >= 0.0))
    throw std::invalid_argument("existence_budget requires nonnegative kappa, C_hardy, ||u0||");
  ContractionBudget out;
  out.kappa = kappa;
  out.c_hardy = c_hardy;
  out.ball_radius = 2.0 * kappa * u0_norm + 1.0;
  const double M = out.ball_radius;
  const double beta_max = std::max(beta_function(e.a, e.b), beta_function(e.a_minus_sigma, e.b));
  double last_lhs = 0.0;
  double last_lambda = 0.0;
  for (int j = 0; j <= 40; ++j) {
    const double T = std::ldexp(1.0, -j);
    const double lhs = kappa * u0_norm + k_of_t(T) +
                       c_hardy * std::pow(M, p) * std::pow(T, e.a_plus_b_minus_1) * beta_max;
    const double lam = contraction_factor(e, p, M, c_hardy, T);
    last_lhs = lhs;
    last_lambda = lam;
    if (lhs <= M && lam < 1.0) {
      out.t_star = T;
      out.lambda = lam;
      out.feasible = true;
      return out;
    }
  }
  out.t_star = 0.0;
  out.lambda = last_lambda;
  out.diagnostics = "no feasible horizon on the geometric grid; at T = 2^-40 the self-map bound was " +
                    std::to_string(last_lhs) + " against M = " + std::to_string(M) +
                    " with contraction factor " + std::to_string(last_lambda);
  return out;
}

}  // namespace frachh
