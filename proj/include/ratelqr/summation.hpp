#pragma once

#include <cstddef>
#include <span>

namespace ratelqr {

// Compensated (Kahan) accumulator; carries the low-order bits lost by
// straight summation.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Pairwise reduction. The result depends only on the element order, never on
// how the work that produced the elements was scheduled.
inline double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 32) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace ratelqr
