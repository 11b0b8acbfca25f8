#pragma once

// Periodic box [-L,L)^N sampled on n points per axis, with the dual
// frequencies xi_k = k*pi/L used by every spectral multiplier.

#include <array>
#include <cmath>
#include <stdexcept>

namespace frachh {

class SpatialGrid {
 public:
  SpatialGrid(int dimension, int points_per_axis, double half_period)
      : dim_(dimension), n_(points_per_axis), half_period_(half_period) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("spatial dimension must be 1, 2 or 3");
    if (!(half_period_ > 0.0)) throw std::invalid_argument("half-period L must be positive");
    if (n_ < 4 || (n_ & (n_ - 1)) != 0)
      throw std::invalid_argument("points per axis must be a power of two >= 4");
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  double half_period() const { return half_period_; }
  double dx() const { return 2.0 * half_period_ / n_; }

  std::size_t size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim_; ++d) s *= static_cast<std::size_t>(n_);
    return s;
  }

  // Coordinate along one axis: x_j = -L + j*dx.
  double coord(int j) const { return -half_period_ + dx() * j; }

  // Signed integer frequency for DFT index j (Nyquist mapped to +n/2).
  int freq_index(int j) const { return (j <= n_ / 2) ? j : j - n_; }

  // Dual frequency xi = k*pi/L for DFT index j.
  double xi(int j) const { return freq_index(j) * (kPi / half_period_); }

  std::array<int, 3> unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(flat % static_cast<std::size_t>(n_));
      flat /= static_cast<std::size_t>(n_);
    }
    return idx;
  }

  std::size_t flatten(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < dim_; ++d)
      flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[d]);
    return flat;
  }

  std::array<double, 3> point(std::size_t flat) const {
    const auto idx = unflatten(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) x[d] = coord(idx[d]);
    return x;
  }

  double radius(std::size_t flat) const {
    const auto x = point(flat);
    double r2 = 0.0;
    for (int d = 0; d < dim_; ++d) r2 += x[d] * x[d];
    return std::sqrt(r2);
  }

  // |xi| for a flat spectral index.
  double xi_norm(std::size_t flat) const {
    const auto idx = unflatten(flat);
    double s2 = 0.0;
    for (int d = 0; d < dim_; ++d) {
      const double x = xi(idx[d]);
      s2 += x * x;
    }
    return std::sqrt(s2);
  }

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.half_period_ == b.half_period_;
  }
  friend bool operator!=(const SpatialGrid& a, const SpatialGrid& b) { return !(a == b); }

  static constexpr double kPi = 3.14159265358979323846;

 private:
  int dim_;
  int n_;
  double half_period_;
};

}  // namespace frachh
