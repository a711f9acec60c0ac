#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace spde {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum &operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;       // unbiased; NaN for a single sample
  double stderr_of_mean = 0.0; // sqrt(variance / count); NaN for a single sample
};

/// Mean and standard error, accumulated in index order so the result is
/// independent of how the samples were produced.
inline SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.count = xs.size();
  if (xs.empty()) {
    s.mean = s.variance = s.stderr_of_mean = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  CompensatedSum sum;
  for (double x : xs)
    sum += x;
  s.mean = sum.value() / double(xs.size());
  if (xs.size() < 2) {
    s.variance = s.stderr_of_mean = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  CompensatedSum sq;
  for (double x : xs)
    sq += (x - s.mean) * (x - s.mean);
  s.variance = sq.value() / double(xs.size() - 1);
  s.stderr_of_mean = std::sqrt(s.variance / double(xs.size()));
  return s;
}

} // namespace spde
