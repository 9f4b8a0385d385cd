#pragma once

#include <cmath>

namespace nade {

// Neumaier compensated summation: the result is as accurate as if the
// terms were added in twice the working precision.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace nade
