#pragma once

// Quadrature kit: adaptive Gauss-Kronrod 15(7) for smooth/oscillatory 1-D
// integrands, exact panel moments for power-law weights, and the closed-form
// double integral of |t-s|^alpha over a rectangle (the workhorse behind every
// fractional-covariance computation here).

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace frachh {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

namespace detail {

inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// 7-point Gauss weights at nodes 1, 3, 5, 7 of the Kronrod set.
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
inline void gk15_panel(const F& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0;
  double resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGK15Nodes[i];
    double fv;
    if (i == 7) {
      fv = f(c);
      resk += kGK15WeightsK[i] * fv;
      resg += kGK15WeightsG[3] * fv;
    } else {
      const double f1 = f(c - dx);
      const double f2 = f(c + dx);
      resk += kGK15WeightsK[i] * (f1 + f2);
      if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * (f1 + f2);
    }
  }
  kronrod = resk * h;
  err = std::fabs((resk - resg) * h);
}

}  // namespace detail

// Adaptive bisection on top of GK15 with an absolute error target.
template <typename F>
inline QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                           int max_panels = 20000) {
  struct Panel {
    double a, b, value, err;
  };
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  double v, e;
  detail::gk15_panel(f, a, b, v, e);
  std::vector<Panel> panels{{a, b, v, e}};
  double total_err = e;
  double total_val = v;
  while (total_err > abs_tol && static_cast<int>(panels.size()) < max_panels) {
    // split the worst panel
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].err > panels[worst].err) worst = i;
    Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (mid <= p.a || mid >= p.b) break;  // interval exhausted at double precision
    Panel left{p.a, mid, 0, 0}, right{mid, p.b, 0, 0};
    detail::gk15_panel(f, left.a, left.b, left.value, left.err);
    detail::gk15_panel(f, right.a, right.b, right.value, right.err);
    total_val += left.value + right.value - p.value;
    total_err += left.err + right.err - p.err;
    panels[worst] = left;
    panels.push_back(right);
  }
  // recompute totals to avoid drift
  total_val = 0.0;
  total_err = 0.0;
  for (const Panel& p : panels) {
    total_val += p.value;
    total_err += p.err;
  }
  out.value = total_val;
  out.error_estimate = total_err;
  out.converged = total_err <= abs_tol;
  return out;
}

// Exact moments of the weight u^alpha on [u0,u1], alpha > -1:
//   m0 = integral u^alpha du,  m1 = integral u^(alpha+1) du.
inline double power_moment0(double alpha, double u0, double u1) {
  return (std::pow(u1, alpha + 1.0) - std::pow(u0, alpha + 1.0)) / (alpha + 1.0);
}
inline double power_moment1(double alpha, double u0, double u1) {
  return (std::pow(u1, alpha + 2.0) - std::pow(u0, alpha + 2.0)) / (alpha + 2.0);
}

// integral_0^U u^alpha g(u) du for alpha in (-1,0]: geometric levels toward the
// endpoint singularity, piecewise-linear g against exact weight moments per
// sub-panel. g must be smooth on (0,U].
template <typename G>
inline double integrate_power_weighted(double alpha, double upper, const G& g, int levels = 40,
                                       int sub_panels = 256) {
  if (!(alpha > -1.0)) throw std::domain_error("integrate_power_weighted requires alpha > -1");
  if (upper <= 0.0) return 0.0;
  double total = 0.0;
  double hi = upper;
  double g_hi = g(hi);
  for (int lev = 0; lev < levels; ++lev) {
    const double lo = hi * 0.5;
    const double g_lo = g(lo);
    const double width = (hi - lo) / sub_panels;
    double u0 = lo;
    double g0 = g_lo;
    for (int j = 0; j < sub_panels; ++j) {
      const double u1 = (j + 1 == sub_panels) ? hi : lo + width * (j + 1);
      const double g1 = (j + 1 == sub_panels) ? g_hi : g(u1);
      const double slope = (g1 - g0) / (u1 - u0);
      total += (g0 - slope * u0) * power_moment0(alpha, u0, u1) +
               slope * power_moment1(alpha, u0, u1);
      u0 = u1;
      g0 = g1;
    }
    hi = lo;
    g_hi = g_lo;
    // The closing panel below is exact for linear g, so stop grading once the
    // curvature of g over [0,hi] can no longer matter.
    if (lev >= 4) {
      const double curvature = std::fabs(g(hi * 1e-9) - 2.0 * g(0.5 * hi) + g_hi);
      if (curvature * power_moment0(alpha, 0.0, hi) < 1e-15 * std::fabs(total)) break;
    }
  }
  // closing panel [0, hi], linear between g(0+) and g(hi)
  const double g_zero = g(hi * 1e-9);
  const double slope = (g_hi - g_zero) / hi;
  total += g_zero * power_moment0(alpha, 0.0, hi) + slope * power_moment1(alpha, 0.0, hi);
  return total;
}

// Closed form of integral_a^b integral_c^d |t-s|^alpha ds dt for alpha in
// (-1,0): twice-antiderivative Psi(x) = |x|^(alpha+2) / ((alpha+1)(alpha+2)).
inline double abs_power_rect_integral(double alpha, double a, double b, double c, double d) {
  const double denom = (alpha + 1.0) * (alpha + 2.0);
  auto psi = [&](double x) { return std::pow(std::fabs(x), alpha + 2.0) / denom; };
  return psi(d - a) - psi(d - b) - psi(c - a) + psi(c - b);
}

}  // namespace frachh
