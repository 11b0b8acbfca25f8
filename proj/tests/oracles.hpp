#pragma once

// Shared independent oracles for the test suites: adaptive Simpson, a
// Lanczos gamma implementation (independent of std::tgamma), and small
// Monte Carlo helpers. These deliberately avoid the library's own
// quadrature/special-function code paths.

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 48) {
  const double fa = f(a), fb = f(b), fc = f(0.5 * (a + b));
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double x0, double x2, double f0, double f1, double f2, double eps, int d) -> double {
    const double xm = 0.5 * (x0 + x2);
    const double fl = f(0.5 * (x0 + xm));
    const double fr = f(0.5 * (xm + x2));
    const double whole = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
    const double left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + f1);
    const double right = (x2 - xm) / 6.0 * (f1 + 4.0 * fr + f2);
    if (d <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return rec(x0, xm, f0, fl, f1, 0.5 * eps, d - 1) +
           rec(xm, x2, f1, fr, f2, 0.5 * eps, d - 1);
  };
  return rec(a, b, fa, fc, fb, tol, depth);
}

// Lanczos approximation, g = 7, 9 coefficients (classic table).
inline double lanczos_gamma(double z) {
  static const double coef[9] = {0.99999999999980993,     676.5203681218851,
                                 -1259.1392167224028,     771.32342877765313,
                                 -176.61502916214059,     12.507343278686905,
                                 -0.13857109526572012,    9.9843695780195716e-6,
                                 1.5056327351493116e-7};
  const double pi = 3.14159265358979323846;
  if (z < 0.5) return pi / (std::sin(pi * z) * lanczos_gamma(1.0 - z));
  z -= 1.0;
  double x = coef[0];
  for (int i = 1; i < 9; ++i) x += coef[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

struct RunningMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
  long long n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return sum / n; }
  double variance() const { return sum_sq / n - mean() * mean(); }
  // standard error of the mean
  double se_mean() const { return std::sqrt(variance() / n); }
};

}  // namespace oracles
