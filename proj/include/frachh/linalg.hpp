#pragma once

// Minimal dense kit: row-major symmetric matrices and an in-place Cholesky.
// Matrices here are small (time-grid sized), so no blocking.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace frachh {

struct CholeskyFailure : std::runtime_error {
  explicit CholeskyFailure(const std::string& what, int pivot_index)
      : std::runtime_error(what), pivot(pivot_index) {}
  int pivot;
};

// Lower Cholesky factor of a symmetric positive-definite matrix stored
// row-major in a flat vector. Throws CholeskyFailure on a non-positive pivot.
inline std::vector<double> cholesky_lower(std::vector<double> a, int n,
                                          const std::string& context = "matrix") {
  if (static_cast<std::size_t>(n) * n != a.size())
    throw std::invalid_argument("cholesky_lower: size mismatch");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        sum -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
      if (i == j) {
        if (!(sum > 0.0))
          throw CholeskyFailure("cholesky factorization failed (" + context +
                                    "): non-positive pivot at index " + std::to_string(i),
                                i);
        a[static_cast<std::size_t>(i) * n + j] = std::sqrt(sum);
      } else {
        a[static_cast<std::size_t>(i) * n + j] = sum / a[static_cast<std::size_t>(j) * n + j];
      }
    }
    for (int j = i + 1; j < n; ++j) a[static_cast<std::size_t>(i) * n + j] = 0.0;
  }
  return a;
}

// y = L * z for a lower-triangular factor.
inline std::vector<double> lower_tri_multiply(const std::vector<double>& l, int n,
                                              const std::vector<double>& z) {
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = l.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j <= i; ++j) s += row[j] * z[j];
    y[i] = s;
  }
  return y;
}

}  // namespace frachh
