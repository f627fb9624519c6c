#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "carnot/common.hpp"

namespace carnot {

/// Element of the truncated tensor algebra over R^d: one dense coefficient
/// array per level k = 0..N, level k holding d^k entries indexed by words
/// (i_1..i_k) over {0..d-1} in row-major order, idx = sum i_j * d^(k-j).
class TensorSeries {
 public:
  TensorSeries(int d, int N) : d_(d), n_(N) {
    require(d >= 1 && N >= 1, "TensorSeries: need d >= 1, N >= 1");
    levels_.resize(static_cast<std::size_t>(N) + 1);
    std::size_t sz = 1;
    for (int k = 0; k <= N; ++k) {
      levels_[k].assign(sz, 0.0);
      sz *= static_cast<std::size_t>(d);
    }
  }

  /// Multiplicative unit: 1 at level 0.
  static TensorSeries unit(int d, int N) {
    TensorSeries t(d, N);
    t.levels_[0][0] = 1.0;
    return t;
  }

  int dim() const { return d_; }
  int depth() const { return n_; }

  std::vector<double>& level(int k) { return levels_[k]; }
  const std::vector<double>& level(int k) const { return levels_[k]; }

  double scalar() const { return levels_[0][0]; }

  static std::size_t level_size(int d, int k) {
    std::size_t sz = 1;
    for (int i = 0; i < k; ++i) sz *= static_cast<std::size_t>(d);
    return sz;
  }

  bool same_shape(const TensorSeries& o) const { return d_ == o.d_ && n_ == o.n_; }

  TensorSeries& operator+=(const TensorSeries& o) {
    require_dims(same_shape(o), "TensorSeries: shape mismatch in +=");
    for (int k = 0; k <= n_; ++k)
      for (std::size_t i = 0; i < levels_[k].size(); ++i) levels_[k][i] += o.levels_[k][i];
    return *this;
  }

  TensorSeries& operator-=(const TensorSeries& o) {
    require_dims(same_shape(o), "TensorSeries: shape mismatch in -=");
    for (int k = 0; k <= n_; ++k)
      for (std::size_t i = 0; i < levels_[k].size(); ++i) levels_[k][i] -= o.levels_[k][i];
    return *this;
  }

  TensorSeries& operator*=(double c) {
    for (auto& lv : levels_)
      for (double& x : lv) x *= c;
    return *this;
  }

  friend TensorSeries operator+(TensorSeries a, const TensorSeries& b) { return a += b; }
  friend TensorSeries operator-(TensorSeries a, const TensorSeries& b) { return a -= b; }
  friend TensorSeries operator*(double c, TensorSeries a) { return a *= c; }

  /// Scale level k by lambda^k (the canonical one-parameter dilation).
  void dilate_levels(double lambda) {
    double p = 1.0;
    for (int k = 1; k <= n_; ++k) {
      p *= lambda;
      for (double& x : levels_[k]) x *= p;
    }
  }

  double level_frobenius(int k) const {
    double s = 0.0;
    for (double x : levels_[k]) s += x * x;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& lv : levels_)
      for (double x : lv) m = std::max(m, std::abs(x));
    return m;
  }

  bool finite() const {
    for (const auto& lv : levels_)
      for (double x : lv) {
        if (!std::isfinite(x)) return false;
      }
    return true;
  }

 private:
  int d_;
  int n_;
  std::vector<std::vector<double>> levels_;
};

/// Truncated tensor product: level k of the result collects sum_{i+j=k} a_i (x) b_j.
inline TensorSeries mul(const TensorSeries& a, const TensorSeries& b) {
  require_dims(a.same_shape(b), "TensorSeries: shape mismatch in mul");
  const int d = a.dim(), N = a.depth();
  TensorSeries out(d, N);
  for (int i = 0; i <= N; ++i) {
    const auto& la = a.level(i);
    bool la_zero = true;
    for (double x : la)
      if (x != 0.0) {
        la_zero = false;
        break;
      }
    if (la_zero) continue;
    for (int j = 0; i + j <= N; ++j) {
      const auto& lb = b.level(j);
      auto& lo = out.level(i + j);
      const std::size_t nb = lb.size();
      for (std::size_t p = 0; p < la.size(); ++p) {
        const double ap = la[p];
        if (ap == 0.0) continue;
        const std::size_t base = p * nb;
        for (std::size_t q = 0; q < nb; ++q) lo[base + q] += ap * lb[q];
      }
    }
  }
  return out;
}

/// exp of a series with zero scalar part, truncated at level N (Horner form).
inline TensorSeries exp_series(const TensorSeries& x) {
  require(x.scalar() == 0.0, "exp_series: scalar part must be 0");
  const int N = x.depth();
  TensorSeries acc = TensorSeries::unit(x.dim(), N);
  for (int m = N; m >= 1; --m) {
    acc = mul(x, acc);
    acc *= 1.0 / static_cast<double>(m);
    acc.level(0)[0] += 1.0;
  }
  return acc;
}

/// log of a series with unit scalar part, truncated at level N.
inline TensorSeries log_series(const TensorSeries& g) {
  require(std::abs(g.scalar() - 1.0) < 1e-9, "log_series: scalar part must be 1");
  const int N = g.depth();
  TensorSeries y = g;
  y.level(0)[0] = 0.0;  // y = g - 1
  TensorSeries out(g.dim(), N);
  TensorSeries pw = y;
  double sign = 1.0;
  for (int m = 1; m <= N; ++m) {
    TensorSeries term = pw;
    term *= sign / static_cast<double>(m);
    out += term;
    if (m < N) pw = mul(pw, y);
    sign = -sign;
  }
  return out;
}

/// Multiplicative inverse of a unital series via the finite Neumann sum.
inline TensorSeries series_inverse(const TensorSeries& g) {
  require(std::abs(g.scalar() - 1.0) < 1e-9, "series_inverse: scalar part must be 1");
  const int N = g.depth();
  TensorSeries z = TensorSeries::unit(g.dim(), N);
  z -= g;  // z = 1 - g, zero scalar part
  TensorSeries out = TensorSeries::unit(g.dim(), N);
  TensorSeries pw = z;
  for (int m = 1; m <= N; ++m) {
    out += pw;
    if (m < N) pw = mul(pw, z);
  }
  return out;
}

}  // namespace carnot
