#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace sdenum {

// Neumaier-compensated accumulator. Used wherever a reported statistic must
// not depend on accumulation order at the tolerance level (error sums over
// paths, double Ito integral sums over fine steps).
class NeumaierSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  void merge(const NeumaierSum& other) noexcept {
    add(other.sum_);
    comp_ += other.comp_;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) noexcept {
  NeumaierSum s;
  for (double v : values) s.add(v);
  return s.value();
}

}  // namespace sdenum
