#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace lexgeo {

/// Neumaier-compensated accumulator. All reductions in the library go
/// through this so results do not depend on how work was partitioned.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double sum(std::span<const double> xs) noexcept {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double mean(std::span<const double> xs) noexcept {
  return xs.empty() ? 0.0 : sum(xs) / static_cast<double>(xs.size());
}

/// Sample variance (n-1 denominator). Returns 0 for fewer than two values.
inline double sample_variance(std::span<const double> xs) noexcept {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  KahanSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size() - 1);
}

inline double sample_sd(std::span<const double> xs) noexcept { return std::sqrt(sample_variance(xs)); }

}  // namespace lexgeo
