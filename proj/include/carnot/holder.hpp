#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "carnot/path.hpp"

namespace carnot {

/// Comparison applied to |u - v| versus eps when restricting a Holder norm to
/// a band of pair gaps.
enum class Relation { less, less_equal, equal, greater_equal, greater };

inline bool relation_holds(double gap, Relation rel, double eps) {
  const double tol = detail::kTimeTol * std::max(1.0, std::abs(eps));
  switch (rel) {
    case Relation::less: return gap < eps - tol;
    case Relation::less_equal: return gap <= eps + tol;
    case Relation::equal: return std::abs(gap - eps) <= tol;
    case Relation::greater_equal: return gap >= eps - tol;
    case Relation::greater: return gap > eps + tol;
  }
  return false;
}

/// Pairwise homogeneous distances of a group path with cached inverses.
class IncrementTable {
 public:
  explicit IncrementTable(const GroupPath& x) : path_(&x), inv_(x.value_inverses()) {}

  const GroupPath& path() const { return *path_; }

  GroupElement increment(std::size_t i, std::size_t j) const {
    return GroupElement(mul(inv_[i].series(), path_->value(j).series()));
  }

  double dist(std::size_t i, std::size_t j) const {
    const TensorSeries inc = mul(inv_[i].series(), path_->value(j).series());
    const TensorSeries rev = mul(inv_[j].series(), path_->value(i).series());
    return detail::hom_norm_from_pair(inc, rev);
  }

 private:
  const GroupPath* path_;
  std::vector<GroupElement> inv_;
};

namespace detail {

struct IndexWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;  // inclusive
};

inline IndexWindow window_of(const std::vector<double>& times, double s, double t) {
  require(s < t, "holder norm: need s < t");
  IndexWindow w;
  w.lo = 0;
  while (w.lo < times.size() && times[w.lo] < s - kTimeTol) ++w.lo;
  w.hi = times.size() - 1;
  while (w.hi > 0 && times[w.hi] > t + kTimeTol) --w.hi;
  return w;
}

}  // namespace detail

/// Restricted alpha-Holder norm over grid pairs u < v in [s,t] whose gap
/// satisfies the relation against eps.  Returns 0 when no pair qualifies.
inline double restricted_holder_norm(const IncrementTable& tab, double alpha, Relation rel,
                                     double eps, double s, double t) {
  require(alpha > 0.0 && alpha <= 1.0, "holder norm: alpha must lie in (0,1]");
  require(eps > 0.0, "holder norm: eps must be positive");
  const auto& times = tab.path().times();
  const auto w = detail::window_of(times, s, t);
  double sup = 0.0;
  for (std::size_t i = w.lo; i + 1 <= w.hi; ++i) {
    for (std::size_t j = i + 1; j <= w.hi; ++j) {
      const double gap = times[j] - times[i];
      if (!relation_holds(gap, rel, eps)) continue;
      const double ratio = tab.dist(i, j) / std::pow(gap, alpha);
      if (ratio > sup) sup = ratio;
    }
  }
  return sup;
}

inline double restricted_holder_norm(const GroupPath& x, double alpha, Relation rel, double eps,
                                     double s, double t) {
  return restricted_holder_norm(IncrementTable(x), alpha, rel, eps, s, t);
}

/// Unrestricted grid Holder norm over [s,t].
inline double holder_norm(const IncrementTable& tab, double alpha, double s, double t) {
  return restricted_holder_norm(tab, alpha, Relation::less_equal, t - s + 1.0, s, t);
}

inline double holder_norm(const GroupPath& x, double alpha) {
  return holder_norm(IncrementTable(x), alpha, 0.0, x.duration());
}

/// Successive threshold times: tau_0 = s, and tau_n is the first grid time
/// t > tau_{n-1} at which the gap->=eps restricted norm over [tau_{n-1}, t]
/// reaches gamma.  The list ends when no further time qualifies.
inline std::vector<double> holder_stopping_times(const IncrementTable& tab, double alpha,
                                                 double eps, double gamma, double s) {
  require(eps > 0.0 && gamma > 0.0, "stopping times: eps and gamma must be positive");
  require(alpha > 0.0 && alpha <= 1.0, "stopping times: alpha must lie in (0,1]");
  const auto& times = tab.path().times();
  std::vector<double> taus{s};
  std::size_t start = 0;
  while (start < times.size() && times[start] < s - detail::kTimeTol) ++start;
  std::size_t win = start;
  double sup = 0.0;
  for (std::size_t j = win + 1; j < times.size(); ++j) {
    for (std::size_t i = win; i < j; ++i) {
      const double gap = times[j] - times[i];
      if (!relation_holds(gap, Relation::greater_equal, eps)) continue;
      const double ratio = tab.dist(i, j) / std::pow(gap, alpha);
      if (ratio > sup) sup = ratio;
    }
    if (sup >= gamma) {
      taus.push_back(times[j]);
      win = j;
      sup = 0.0;
    }
  }
  return taus;
}

inline std::vector<double> holder_stopping_times(const GroupPath& x, double alpha, double eps,
                                                 double gamma, double s) {
  return holder_stopping_times(IncrementTable(x), alpha, eps, gamma, s);
}

// ---------------------------------------------------------------------------
// Closed-form bounds used by the deterministic Holder-norm suites.

namespace detail {
inline void check_bound_args(double gamma, double eps, double alpha) {
  require(gamma > 0.0 && eps > 0.0, "bound: gamma and eps must be positive");
  require(alpha > 0.0 && alpha <= 1.0, "bound: alpha must lie in (0,1]");
}
}  // namespace detail

/// Bound on the gap-exactly-eps norm given that excursions from every
/// stopping time stay below c: (3 c eps^-alpha) v (4 gamma + c eps^-alpha).
inline double bound_from_stopping_windows(double c, double gamma, double eps, double alpha) {
  detail::check_bound_args(gamma, eps, alpha);
  require(c > 0.0, "bound: c must be positive");
  const double ce = c * std::pow(eps, -alpha);
  return std::max(3.0 * ce, 4.0 * gamma + ce);
}

/// Bound on the gap-below-2^-n0 eps norm given gap-exactly-dyadic norms <= gamma.
inline double bound_from_dyadic_scales(double gamma, double alpha) {
  require(gamma > 0.0, "bound: gamma must be positive");
  require(alpha > 0.0 && alpha <= 1.0, "bound: alpha must lie in (0,1]");
  return gamma / (1.0 - std::pow(2.0, -alpha));
}

/// Bound on the full Holder norm given eps-grid anchors inside a ball of
/// radius r and short-gap norms <= gamma on each block.
inline double bound_from_ball_anchors(double gamma, double r, double eps, double alpha) {
  detail::check_bound_args(gamma, eps, alpha);
  require(r >= 0.0, "bound: r must be nonnegative");
  return 2.0 * gamma + 2.0 * r * std::pow(eps, -alpha);
}

// ---------------------------------------------------------------------------

/// Homogeneous alpha-Holder distance between two group paths: supremum over
/// common-grid pairs of the increment distance over gap^alpha, plus the
/// distance of the starting points.  Paths are merged onto the union grid
/// (geodesic interpolation) when their grids differ.
inline double alpha_holder_distance(const GroupPath& x, const GroupPath& y, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha_holder_distance: alpha must lie in (0,1]");
  require_dims(x.dim() == y.dim() && x.depth() == y.depth(),
               "alpha_holder_distance: incompatible path shapes");
  const GroupPath *px = &x, *py = &y;
  GroupPath rx = x, ry = y;  // storage for resampled copies
  if (x.times() != y.times()) {
    const auto grid = detail::merge_grids(x.times(), y.times());
    rx = x.resampled(grid);
    ry = y.resampled(grid);
    px = &rx;
    py = &ry;
  }
  const auto& times = px->times();
  const auto xinv = px->value_inverses();
  const auto yinv = py->value_inverses();
  double sup = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const TensorSeries xinc = mul(xinv[i].series(), px->value(j).series());
      const TensorSeries yinc = mul(yinv[i].series(), py->value(j).series());
      const TensorSeries xrev = mul(xinv[j].series(), px->value(i).series());
      const TensorSeries yrev = mul(yinv[j].series(), py->value(i).series());
      const TensorSeries rel = mul(xrev, yinc);
      const TensorSeries rev = mul(yrev, xinc);
      const double dist = detail::hom_norm_from_pair(rel, rev);
      const double ratio = dist / std::pow(times[j] - times[i], alpha);
      if (ratio > sup) sup = ratio;
    }
  }
  return sup + group_distance(px->value(0), py->value(0));
}

/// One pairwise sweep serving several Holder exponents at once.
/// Requires both paths on the same grid.
inline std::vector<double> alpha_holder_distance_multi(const GroupPath& x, const GroupPath& y,
                                                       const std::vector<double>& alphas) {
  require_dims(x.dim() == y.dim() && x.depth() == y.depth(),
               "alpha_holder_distance_multi: incompatible path shapes");
  require(x.times() == y.times(), "alpha_holder_distance_multi: paths must share a grid");
  const auto& times = x.times();
  const auto xinv = x.value_inverses();
  const auto yinv = y.value_inverses();
  std::vector<double> sups(alphas.size(), 0.0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const TensorSeries xinc = mul(xinv[i].series(), x.value(j).series());
      const TensorSeries yinc = mul(yinv[i].series(), y.value(j).series());
      const TensorSeries xrev = mul(xinv[j].series(), x.value(i).series());
      const TensorSeries yrev = mul(yinv[j].series(), y.value(i).series());
      const double dist = detail::hom_norm_from_pair(mul(xrev, yinc), mul(yrev, xinc));
      const double gap = times[j] - times[i];
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double ratio = dist / std::pow(gap, alphas[a]);
        if (ratio > sups[a]) sups[a] = ratio;
      }
    }
  }
  const double d0 = group_distance(x.value(0), y.value(0));
  for (double& s : sups) s += d0;
  return sups;
}

/// Unrestricted Holder norms for several exponents in one sweep.
inline std::vector<double> holder_norm_multi(const GroupPath& x,
                                             const std::vector<double>& alphas) {
  IncrementTable tab(x);
  const auto& times = x.times();
  std::vector<double> sups(alphas.size(), 0.0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const double dist = tab.dist(i, j);
      const double gap = times[j] - times[i];
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double ratio = dist / std::pow(gap, alphas[a]);
        if (ratio > sups[a]) sups[a] = ratio;
      }
    }
  }
  return sups;
}

// ---------------------------------------------------------------------------

struct PVariation {
  double value = 0.0;
  bool exact = true;  // false when the grid was subsampled before the DP
};

/// p-variation over grid partitions by dynamic programming.  Grids above
/// `max_exact_points` are subsampled to that size first (keeping endpoints),
/// which yields a lower bound; the result is flagged as approximate.
inline PVariation p_variation(const GroupPath& x, double p,
                              std::size_t max_exact_points = 2000) {
  require(p > 1.0, "p_variation: p must exceed 1");
  PVariation out;
  const std::size_t n = x.size();
  if (n < 2) return out;

  std::vector<std::size_t> idx;
  if (n <= max_exact_points) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  } else {
    out.exact = false;
    const double stride = static_cast<double>(n - 1) / static_cast<double>(max_exact_points - 1);
    idx.reserve(max_exact_points);
    for (std::size_t k = 0; k < max_exact_points; ++k)
      idx.push_back(static_cast<std::size_t>(std::llround(stride * static_cast<double>(k))));
    idx.back() = n - 1;
  }

  IncrementTable tab(x);
  const std::size_t m = idx.size();
  std::vector<double> best(m, 0.0);
  for (std::size_t j = 1; j < m; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double cand = best[i] + std::pow(tab.dist(idx[i], idx[j]), p);
      if (cand > b) b = cand;
    }
    best[j] = b;
  }
  out.value = std::pow(best[m - 1], 1.0 / p);
  return out;
}

}  // namespace carnot
