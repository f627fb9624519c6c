#pragma once

#include <cmath>
#include <vector>

#include "carnot/lyndon.hpp"
#include "carnot/tensor.hpp"

namespace carnot {

/// Grouplike element of the truncated tensor algebra: unit scalar part and
/// log contained in the free Lie subspace.  The group law is truncated tensor
/// multiplication; increments of signature paths live here.
class GroupElement {
 public:
  GroupElement(int d, int N) : series_(TensorSeries::unit(d, N)) {}

  explicit GroupElement(TensorSeries s) : series_(std::move(s)) {
    require(std::abs(series_.scalar() - 1.0) < 1e-9, "GroupElement: level-0 must equal 1");
    series_.level(0)[0] = 1.0;
  }

  static GroupElement identity(int d, int N) { return GroupElement(d, N); }

  int dim() const { return series_.dim(); }
  int depth() const { return series_.depth(); }
  const TensorSeries& series() const { return series_; }

  /// Level-1 projection.
  const std::vector<double>& level1() const { return series_.level(1); }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return GroupElement(mul(a.series_, b.series_));
  }

  GroupElement& operator*=(const GroupElement& o) {
    series_ = mul(series_, o.series_);
    return *this;
  }

 private:
  TensorSeries series_;
};

inline GroupElement group_inverse(const GroupElement& g) {
  return GroupElement(series_inverse(g.series()));
}

/// delta_lambda: scales level k by lambda^k.  Requires lambda > 0.
inline GroupElement dilate(double lambda, const GroupElement& g) {
  require(lambda > 0.0, "dilate: lambda must be positive");
  TensorSeries s = g.series();
  s.dilate_levels(lambda);
  return GroupElement(std::move(s));
}

/// Exponential of a Lie element (Lyndon coordinates) into the group.
inline GroupElement lie_exp(const LieElement& e) {
  return GroupElement(exp_series(lie_to_tensor(e)));
}

/// Exponential of a level-1 vector; closed form v^(x)k / k! per level.
inline GroupElement exp_level1(const std::vector<double>& v, int N) {
  const int d = static_cast<int>(v.size());
  TensorSeries out = TensorSeries::unit(d, N);
  std::vector<double> pw = v;
  double fact = 1.0;
  for (int k = 1; k <= N; ++k) {
    fact *= static_cast<double>(k);
    auto& lv = out.level(k);
    for (std::size_t i = 0; i < pw.size(); ++i) lv[i] = pw[i] / fact;
    if (k < N) {
      std::vector<double> nx(pw.size() * v.size());
      for (std::size_t p = 0; p < pw.size(); ++p)
        for (std::size_t q = 0; q < v.size(); ++q) nx[p * v.size() + q] = pw[p] * v[q];
      pw.swap(nx);
    }
  }
  return GroupElement(std::move(out));
}

/// Tensor logarithm in Lyndon coordinates.  Throws NotGrouplike when the log
/// has a component outside the free Lie subspace larger than `tol`.
inline LieElement group_log(const GroupElement& g, double tol = kDefaultTol) {
  LieExtraction ex = tensor_to_lie(log_series(g.series()));
  if (ex.residual > tol)
    throw NotGrouplike("group_log: input is not grouplike (residual " +
                       std::to_string(ex.residual) + ")");
  return ex.coeffs;
}

/// Largest coefficient of log(g) outside the free Lie subspace.
inline double grouplike_defect(const GroupElement& g) {
  return tensor_to_lie(log_series(g.series())).residual;
}

inline bool is_grouplike(const GroupElement& g, double tol = kDefaultTol) {
  return grouplike_defect(g) <= tol;
}

namespace detail {

inline double hom_norm_from_pair(const TensorSeries& g, const TensorSeries& ginv) {
  const int N = g.depth();
  double best = 0.0;
  for (int k = 1; k <= N; ++k) {
    const double m = std::max(g.level_frobenius(k), ginv.level_frobenius(k));
    best = std::max(best, std::pow(m, 1.0 / static_cast<double>(k)));
  }
  return best;
}

}  // namespace detail

/// Symmetric homogeneous norm max_k max(|g_k|, |g^-1_k|)^(1/k) with the
/// Frobenius norm per level.  Exactly 1-homogeneous under dilation, symmetric
/// under inversion, and comparable to the Carnot-Caratheodory norm (ball-box).
inline double homogeneous_norm(const GroupElement& g) {
  return detail::hom_norm_from_pair(g.series(), series_inverse(g.series()));
}

/// Left-invariant distance hom_norm(g^-1 h) induced by the homogeneous norm.
inline double group_distance(const GroupElement& g, const GroupElement& h) {
  const TensorSeries rel = mul(series_inverse(g.series()), h.series());
  return detail::hom_norm_from_pair(rel, series_inverse(rel));
}

}  // namespace carnot
