#pragma once

#include <cmath>

namespace votebound::detail {

// Neumaier compensated accumulator; keeps weight-sum checks at the 1e-12
// tolerance independent of the number of terms.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      comp_ += (sum_ - t) + value;
    } else {
      comp_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace votebound::detail
