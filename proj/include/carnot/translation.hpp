#pragma once

#include <cmath>

#include "carnot/holder.hpp"
#include "carnot/path.hpp"

namespace carnot {

/// Sobolev W^{1,2} seminorm of a piecewise-linear path over [s,t]:
/// the derivative is constant per segment, so the energy integral is the sum
/// of |slope|^2 * overlap over segments intersecting [s,t].
inline double w12_norm(const LinearPath& h, double s, double t) {
  require(s >= 0.0 && t <= h.duration() + detail::kTimeTol && s <= t,
          "w12_norm: [s,t] outside path domain");
  if (t - s <= detail::kTimeTol) return 0.0;
  const auto& times = h.times();
  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double a = std::max(times[i], s);
    const double b = std::min(times[i + 1], t);
    if (b <= a) continue;
    const double dt = times[i + 1] - times[i];
    const Eigen::VectorXd slope = (h.value(i + 1) - h.value(i)) / dt;
    energy += slope.squaredNorm() * (b - a);
  }
  return std::sqrt(energy);
}

inline double w12_norm(const LinearPath& h) { return w12_norm(h, 0.0, h.duration()); }

/// Piecewise-linear path bundled with its cached W^{1,2} seminorm.
struct SobolevPath {
  LinearPath path;
  double w12 = 0.0;

  explicit SobolevPath(LinearPath p) : path(std::move(p)), w12(w12_norm(path)) {}
};

namespace detail {

inline std::size_t ilog2_ceil(std::size_t m) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < m) ++k;
  return k;
}

}  // namespace detail

/// Translation of a group path by a bounded-variation perturbation h.
///
/// Both paths are merged onto their common grid.  On each interval the
/// x-increment is represented by its geodesic exp segment and summed with the
/// (linear) h-segment by interleaved concatenation on `sub_steps` sub-steps:
/// the output increment is (exp(L/m) exp(dh/m))^m with L = log of the
/// x-increment.  The interleaving is exact in the refinement limit; the
/// finite-m error shrinks monotonically as sub_steps grows and is measurable
/// by doubling.  First-level additivity and translation of the identity path
/// hold exactly for every m.
inline GroupPath translate(const GroupPath& x, const LinearPath& h, int sub_steps = 64,
                           std::size_t max_grid_points = 1u << 20) {
  require_dims(x.dim() == h.dim(), "translate: path dimensions differ");
  require(sub_steps >= 1, "translate: sub_steps must be >= 1");
  const int d = x.dim(), N = x.depth();

  const GroupPath* px = &x;
  const LinearPath* ph = &h;
  GroupPath rx = x;
  LinearPath rh = h;
  if (x.times() != h.times()) {
    const auto grid = detail::merge_grids(x.times(), h.times());
    require(grid.size() <= max_grid_points, "translate: merged grid exceeds refinement limit");
    rx = x.resampled(grid);
    rh = h.resampled(grid);
    px = &rx;
    ph = &rh;
  }

  const auto& times = px->times();
  std::vector<GroupElement> out;
  out.reserve(times.size());
  out.push_back(px->value(0));
  const std::size_t m = static_cast<std::size_t>(sub_steps);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    TensorSeries log_inc = log_series(px->increment(i, i + 1).series());
    Eigen::VectorXd dh = ph->value(i + 1) - ph->value(i);

    GroupElement inc(d, N);
    if (dh.isZero(0.0)) {
      inc = GroupElement(exp_series(log_inc));  // zero translator: exact
    } else {
      log_inc *= 1.0 / static_cast<double>(m);
      std::vector<double> step(dh.size());
      for (Eigen::Index j = 0; j < dh.size(); ++j)
        step[static_cast<std::size_t>(j)] = dh[j] / static_cast<double>(m);
      GroupElement factor = GroupElement(exp_series(log_inc)) * exp_level1(step, N);
      // h is linear on the merged grid, so all m interleaved factors agree;
      // the power is taken by binary splitting.
      GroupElement pow = GroupElement::identity(d, N);
      std::size_t e = m;
      GroupElement base = factor;
      while (e > 0) {
        if (e & 1u) pow *= base;
        e >>= 1u;
        if (e > 0) base *= base;
      }
      inc = pow;
    }
    out.push_back(out.back() * inc);
  }
  return GroupPath(times, std::move(out));
}

}  // namespace carnot
