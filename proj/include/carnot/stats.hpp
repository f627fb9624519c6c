#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "carnot/common.hpp"

namespace carnot {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion, endpoints clamped to [0,1].
inline Interval wilson_interval(std::int64_t successes, std::int64_t n,
                                double z = 1.959963984540054) {
  require(n > 0, "wilson_interval: n must be positive");
  const double p = static_cast<double>(successes) / static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * double(n) * double(n))) / denom;
  Interval w;
  w.lo = std::max(0.0, center - half);
  w.hi = std::min(1.0, center + half);
  // at the boundary counts the analytic endpoints are exact
  if (successes == 0) w.lo = 0.0;
  if (successes == n) w.hi = 1.0;
  return w;
}

/// Streaming mean/variance accumulator (Welford).
class OnlineMoments {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
    const double z = x - 0.0;
    sum2_ += z * z;
    sum3_ += z * z * z;
    sum4_ += z * z * z * z;
    sum_ += x;
  }

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double standard_error() const {
    return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
  }

  /// Excess kurtosis of the sample (zero for a Gaussian).
  double excess_kurtosis() const {
    if (n_ < 4) return 0.0;
    const double n = static_cast<double>(n_);
    const double m = sum_ / n;
    // central moments from raw moments about 0
    const double m2 = sum2_ / n - m * m;
    const double m4 = sum4_ / n - 4 * m * sum3_ / n + 6 * m * m * sum2_ / n - 3 * m * m * m * m;
    return m4 / (m2 * m2) - 3.0;
  }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double sum_ = 0.0, sum2_ = 0.0, sum3_ = 0.0, sum4_ = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_line: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  require(std::abs(denom) > 0, "fit_line: degenerate abscissa grid");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = f.intercept + f.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

/// Quantile of an unsorted sample (linear interpolation between order stats).
inline double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), "quantile: empty sample");
  require(q >= 0.0 && q <= 1.0, "quantile: q outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= xs.size()) return xs.back();
  const double frac = pos - static_cast<double>(i);
  return xs[i] * (1.0 - frac) + xs[i + 1] * frac;
}

}  // namespace carnot
