#pragma once

#include <memory>
#include <vector>

namespace fieldlab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes, weights;
};

/// Cached and shared; safe to call concurrently.
std::shared_ptr<const GaussRule> gauss_legendre(int n);

/// Compensated (Neumaier) accumulator.
template <class T>
class NeumaierSum {
 public:
  void add(const T& v) {
    const T t = sum_ + v;
    if (magnitude(sum_) >= magnitude(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  template <class U>
  static double magnitude(const U& u) {
    using std::abs;
    return abs(u);
  }
  T sum_{}, comp_{};
};

}  // namespace fieldlab
