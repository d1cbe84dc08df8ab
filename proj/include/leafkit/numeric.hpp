#pragma once

#include <cmath>
#include <iterator>
#include <type_traits>

namespace leafkit {

/// Neumaier-compensated running sum. Reductions in the toolkit go through this
/// so results do not depend on how a batch was chunked.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(Scalar x) {
    add(x);
    return *this;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

template <typename Range>
auto compensated_sum(const Range& values) {
  using Scalar = std::decay_t<decltype(*std::begin(values))>;
  CompensatedSum<Scalar> acc;
  for (const auto& v : values) acc.add(v);
  return acc.value();
}

}  // namespace leafkit
