#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "carnot/holder.hpp"
#include "carnot/rng.hpp"

namespace carnot {

/// Outcome of one randomized deterministic-bound suite.
struct LemmaSuiteResult {
  std::int64_t cases = 0;
  std::int64_t violations = 0;
  double worst_margin = 0.0;  // max ratio (observed quantity / bound) seen
};

namespace lemma_detail {

/// Uniform-grid random group path.  Per-step increments are generated as
/// dilated grouplike elements, so their homogeneous norm is set exactly.
/// `burst_scale` > 0 inserts runs of large steps at dyadic positions.
inline GroupPath random_grid_path(int d, int N, std::size_t points, double T, Rng& rng,
                                  double step_scale, double step_cap, double burst_scale,
                                  int bursts) {
  std::vector<double> times(points);
  for (std::size_t i = 0; i < points; ++i)
    times[i] = T * static_cast<double>(i) / static_cast<double>(points - 1);
  times.front() = 0.0;

  // mark burst runs (2..5 consecutive steps) starting at dyadic indices
  std::vector<double> target(points, 0.0);
  for (std::size_t i = 1; i < points; ++i) {
    double s = std::abs(rng.gaussian()) * step_scale;
    target[i] = std::min(s, step_cap);
  }
  for (int b = 0; b < bursts; ++b) {
    const int level = 1 + static_cast<int>(rng.below(4));
    const std::size_t denom = std::size_t{1} << level;
    std::size_t start = (points - 1) * (1 + rng.below(denom - 1)) / denom;
    const std::size_t len = 2 + rng.below(4);
    for (std::size_t k = 0; k < len && start + k + 1 < points; ++k) {
      target[start + k + 1] = std::min(burst_scale * (0.6 + 0.4 * rng.uniform()), step_cap);
    }
  }

  std::vector<GroupElement> vals;
  vals.reserve(points);
  vals.push_back(GroupElement::identity(d, N));
  for (std::size_t i = 1; i < points; ++i) {
    LieElement l = LieElement::zero(d, N);
    double scale = 1.0;
    for (int k = 1; k <= N; ++k) {
      for (double& c : l.levels[k - 1]) c = rng.uniform(-scale, scale);
      scale *= 0.5;
    }
    GroupElement inc = lie_exp(l);
    const double norm = homogeneous_norm(inc);
    if (norm > 0.0 && target[i] > 0.0)
      inc = dilate(target[i] / norm, inc);
    else
      inc = GroupElement::identity(d, N);
    vals.push_back(vals.back() * inc);
  }
  return GroupPath(std::move(times), std::move(vals));
}

}  // namespace lemma_detail

/// Randomized verification of the stopping-window bound: detect the smallest
/// premise constant c (the largest excursion within eps of any stopping time)
/// and require the gap-exactly-eps norm to stay below
/// bound_from_stopping_windows(c, gamma, eps, alpha).
///
/// Paths are uniform-grid walks with multi-step bursts at dyadic times.
/// Per-step increments are capped at (2 - 2^alpha) gamma eps^alpha: a single
/// grid step is below the resolution of grid stopping times, so an unresolved
/// one-step jump could evade every premise window while still contributing a
/// gap-eps pair.  Under the cap the continuous-time argument transfers to
/// grid suprema verbatim.
inline LemmaSuiteResult run_window_bound_suite(std::int64_t cases, std::uint64_t seed,
                                               int d = 2, int N = 2) {
  LemmaSuiteResult res;
  Rng rng(seed, 0x11);
  for (std::int64_t cs = 0; cs < cases; ++cs) {
    const int K = 5 + static_cast<int>(rng.below(2));  // 33 or 65 points
    const std::size_t points = (std::size_t{1} << K) + 1;
    const double T = 1.0;
    const int j = 2 + static_cast<int>(rng.below(2));
    const double eps = std::pow(2.0, -j);
    // the per-step cap (2 - 2^alpha) gamma eps^alpha degenerates at alpha = 1
    const double alpha = rng.uniform(0.1, 0.95);
    const double gamma = rng.uniform(0.3, 2.0);
    const double cap = (2.0 - std::pow(2.0, alpha)) * gamma * std::pow(eps, alpha) * 0.98;

    const double mesh = T / static_cast<double>(points - 1);
    GroupPath x = lemma_detail::random_grid_path(
        d, N, points, T, rng, /*step_scale=*/0.25 * gamma * std::pow(mesh, alpha),
        /*step_cap=*/cap, /*burst_scale=*/cap, /*bursts=*/static_cast<int>(rng.below(4)));

    IncrementTable tab(x);
    const auto taus = holder_stopping_times(tab, alpha, eps, gamma, 0.0);

    // premise constant: largest excursion from any stopping time within eps
    double c_star = 0.0;
    const auto& times = x.times();
    for (double tau : taus) {
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < tau - detail::kTimeTol) continue;
        if (times[i] > tau + eps + detail::kTimeTol) break;
        std::size_t tau_idx = detail::locate(times, tau);
        c_star = std::max(c_star, tab.dist(tau_idx, i));
      }
    }
    const double c = c_star * (1.0 + 1e-9) + 1e-15;

    const double observed = restricted_holder_norm(tab, alpha, Relation::equal, eps, 0.0, T);
    const double bound = bound_from_stopping_windows(c, gamma, eps, alpha);
    ++res.cases;
    res.worst_margin = std::max(res.worst_margin, observed / bound);
    if (observed >= bound * (1.0 + 1e-12)) ++res.violations;
  }
  return res;
}

/// Randomized verification of the dyadic-scale chaining bound on uniform
/// dyadic grids: whenever every gap-exactly-2^-n eps norm (n > n0) stays
/// below gamma, the gap-below-2^-n0 eps norm stays below
/// bound_from_dyadic_scales(gamma, alpha).  Single-step jumps are allowed.
inline LemmaSuiteResult run_dyadic_bound_suite(std::int64_t cases, std::uint64_t seed,
                                               int d = 2, int N = 2) {
  LemmaSuiteResult res;
  Rng rng(seed, 0x22);
  for (std::int64_t cs = 0; cs < cases; ++cs) {
    const int K = 5 + static_cast<int>(rng.below(2));
    const std::size_t points = (std::size_t{1} << K) + 1;
    const double T = 1.0, eps = 1.0;
    const int n0 = static_cast<int>(rng.below(3));
    const double alpha = rng.uniform(0.1, 1.0);
    const double mesh = T / static_cast<double>(points - 1);

    GroupPath x = lemma_detail::random_grid_path(
        d, N, points, T, rng, /*step_scale=*/0.3 * std::pow(mesh, alpha),
        /*step_cap=*/10.0, /*burst_scale=*/rng.uniform(0.5, 3.0),
        /*bursts=*/static_cast<int>(rng.below(5)));
    IncrementTable tab(x);

    double gamma_star = 0.0;
    for (int n = n0 + 1; n <= K; ++n) {
      gamma_star = std::max(gamma_star, restricted_holder_norm(tab, alpha, Relation::equal,
                                                               std::pow(2.0, -n) * eps, 0.0, T));
    }
    const double gamma = gamma_star * (1.0 + 1e-12) + 1e-300;
    const double observed =
        restricted_holder_norm(tab, alpha, Relation::less, std::pow(2.0, -n0) * eps, 0.0, T);
    const double bound = bound_from_dyadic_scales(gamma, alpha);
    ++res.cases;
    if (bound > 0.0) res.worst_margin = std::max(res.worst_margin, observed / bound);
    if (observed > bound * (1.0 + 1e-12)) ++res.violations;
  }
  return res;
}

/// Randomized verification of the ball-anchor bound: anchors at multiples of
/// eps inside a ball of radius r plus short-gap norms below gamma on each
/// block bound the full Holder norm by bound_from_ball_anchors.
inline LemmaSuiteResult run_anchor_bound_suite(std::int64_t cases, std::uint64_t seed,
                                               int d = 2, int N = 2) {
  LemmaSuiteResult res;
  Rng rng(seed, 0x33);
  for (std::int64_t cs = 0; cs < cases; ++cs) {
    const int K = 5 + static_cast<int>(rng.below(2));
    const std::size_t points = (std::size_t{1} << K) + 1;
    const double T = 1.0;
    const int j = 1 + static_cast<int>(rng.below(3));
    const double eps = std::pow(2.0, -j);
    const double alpha = rng.uniform(0.1, 1.0);
    const double mesh = T / static_cast<double>(points - 1);

    GroupPath x = lemma_detail::random_grid_path(
        d, N, points, T, rng, /*step_scale=*/0.4 * std::pow(mesh, alpha),
        /*step_cap=*/10.0, /*burst_scale=*/rng.uniform(0.3, 1.5),
        /*bursts=*/static_cast<int>(rng.below(4)));
    IncrementTable tab(x);
    const auto& times = x.times();

    const GroupElement center = x.value(0);
    double r_star = 0.0;
    double gamma_star = 0.0;
    const std::size_t blocks = static_cast<std::size_t>(std::round(T / eps));
    for (std::size_t k = 0; k <= blocks; ++k) {
      const double tk = static_cast<double>(k) * eps;
      const std::size_t idx = detail::locate(times, tk);
      r_star = std::max(r_star, group_distance(center, x.value(idx)));
      if (k < blocks) {
        gamma_star = std::max(gamma_star, restricted_holder_norm(tab, alpha, Relation::less_equal,
                                                                 eps, tk, tk + eps));
      }
    }
    const double gamma = gamma_star * (1.0 + 1e-12) + 1e-300;
    const double observed = holder_norm(tab, alpha, 0.0, T);
    const double bound = bound_from_ball_anchors(gamma, r_star, eps, alpha);
    ++res.cases;
    if (bound > 0.0) res.worst_margin = std::max(res.worst_margin, observed / bound);
    if (observed > bound * (1.0 + 1e-12)) ++res.violations;
  }
  return res;
}

}  // namespace carnot
