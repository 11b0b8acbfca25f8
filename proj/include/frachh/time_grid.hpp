#pragma once

#include <stdexcept>
#include <vector>

namespace frachh {

// Uniform grid t_i = i*T/M on [0,T], i = 0..M.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("time horizon must be positive");
    if (steps < 1) throw std::invalid_argument("time grid needs at least one step");
  }

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double dt() const { return horizon_ / steps_; }
  double node(int i) const { return horizon_ * (static_cast<double>(i) / steps_); }
  double midpoint(int i) const { return horizon_ * ((static_cast<double>(i) + 0.5) / steps_); }

  std::vector<double> nodes() const {
    std::vector<double> t(steps_ + 1);
    for (int i = 0; i <= steps_; ++i) t[i] = node(i);
    return t;
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.horizon_ == b.horizon_ && a.steps_ == b.steps_;
  }

 private:
  double horizon_;
  int steps_;
};

}  // namespace frachh
