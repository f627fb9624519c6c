#pragma once

#include <Eigen/Dense>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "carnot/lyndon.hpp"
#include "carnot/rng.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

/// Exact Lie bracket [V, W] = (DW) V - (DV) W by polynomial differentiation.
inline PolyVectorField lie_bracket(const PolyVectorField& V, const PolyVectorField& W) {
  require_dims(V.e == W.e, "lie_bracket: dimension mismatch");
  PolyVectorField out = directional_derivative(W, V);
  out -= directional_derivative(V, W);
  return out;
}

/// Left-nested iterated brackets indexed by multi-indices over {0..d-1}:
/// entry (i) is V_i and entry I.j is [entry(I), V_j].
class BracketTable {
 public:
  using MultiIndex = std::vector<int>;

  BracketTable() = default;

  static BracketTable build(const VectorFieldSystem& sys, int depth,
                            std::size_t max_entries = 1000000) {
    sys.validate();
    require(depth >= 1, "BracketTable: depth must be >= 1");
    const int d = sys.d();
    std::size_t total = 0, level = 1;
    for (int k = 1; k <= depth; ++k) {
      level *= static_cast<std::size_t>(d);
      total += level;
      require(total <= max_entries, "BracketTable: d^depth exceeds the entry guard");
    }

    BracketTable tab;
    tab.e_ = sys.e;
    tab.d_ = d;
    tab.depth_ = depth;
    std::vector<MultiIndex> frontier;
    for (int i = 0; i < d; ++i) {
      MultiIndex I{i};
      tab.entries_.emplace(I, sys.fields[static_cast<std::size_t>(i)]);
      frontier.push_back(I);
    }
    for (int k = 2; k <= depth; ++k) {
      std::vector<MultiIndex> next;
      next.reserve(frontier.size() * static_cast<std::size_t>(d));
      for (const auto& I : frontier) {
        const PolyVectorField& base = tab.entries_.at(I);
        for (int j = 0; j < d; ++j) {
          MultiIndex IJ = I;
          IJ.push_back(j);
          tab.entries_.emplace(IJ, lie_bracket(base, sys.fields[static_cast<std::size_t>(j)]));
          next.push_back(IJ);
        }
      }
      frontier.swap(next);
    }
    return tab;
  }

  int e() const { return e_; }
  int d() const { return d_; }
  int depth() const { return depth_; }

  const PolyVectorField& at(const MultiIndex& I) const { return entries_.at(I); }

  const std::map<MultiIndex, PolyVectorField>& entries() const { return entries_; }

  /// Test-support constructor for injected tables.
  static BracketTable from_entries(int e, int d, int depth,
                                   std::map<MultiIndex, PolyVectorField> entries) {
    BracketTable tab;
    tab.e_ = e;
    tab.d_ = d;
    tab.depth_ = depth;
    tab.entries_ = std::move(entries);
    return tab;
  }

 private:
  int e_ = 0;
  int d_ = 0;
  int depth_ = 0;
  std::map<MultiIndex, PolyVectorField> entries_;
};

struct RankPolicy {
  double rel_tol = 1e-8;    // relative singular-value threshold
  double abs_floor = 1e-12;
  double robustness_span = 3.1622776601683795;  // sqrt(10): one decade total
};

namespace detail {

/// Singular values of the matrix of bracket evaluations with
/// min_len <= |I| <= max_len at the point y (descending).
inline std::vector<double> bracket_singular_values(const BracketTable& tab,
                                                   const Eigen::VectorXd& y, int min_len,
                                                   int max_len) {
  const int e = tab.e();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(e, e);
  bool any = false;
  for (const auto& [I, field] : tab.entries()) {
    const int len = static_cast<int>(I.size());
    if (len < min_len || len > max_len) continue;
    const Eigen::VectorXd v = field.eval(y);
    gram += v * v.transpose();
    any = true;
  }
  std::vector<double> sv(static_cast<std::size_t>(e), 0.0);
  if (!any) return sv;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  for (int i = 0; i < e; ++i)
    sv[static_cast<std::size_t>(i)] = std::sqrt(std::max(es.eigenvalues()[e - 1 - i], 0.0));
  return sv;
}

inline int rank_from_singular_values(const std::vector<double>& sv, const RankPolicy& pol,
                                     double scale) {
  const double thr = std::max(pol.rel_tol * scale, pol.abs_floor);
  int r = 0;
  for (double s : sv)
    if (s > thr) ++r;
  return r;
}

}  // namespace detail

/// Numerical dimension of span{ V_[I](y) : |I| >= min_len } using singular
/// values above max(rel_tol * sigma_max, abs_floor).  An empty selection has
/// dimension zero.
inline int span_dimension_at(const BracketTable& tab, const Eigen::VectorXd& y, int min_len,
                             const RankPolicy& pol = RankPolicy{}) {
  require(min_len >= 1, "span_dimension_at: min_len must be >= 1");
  const auto sv = detail::bracket_singular_values(tab, y, min_len, tab.depth());
  return detail::rank_from_singular_values(sv, pol, sv.empty() ? 0.0 : sv.front());
}

struct OrbitSample {
  std::vector<Eigen::VectorXd> points;  // first entry is y0
  int discarded = 0;                    // flow blowups
};

struct OrbitOptions {
  double time_range = 0.3;   // flow times drawn uniform on [-range, range]
  int min_flows = 4;
  int max_flows = 8;
  double rk4_step = 1e-3;
  double runaway_norm = 1e6;
};

namespace detail {

inline bool rk4_flow(const PolyVectorField& V, Eigen::VectorXd& y, double time,
                     const OrbitOptions& opt) {
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(time) / opt.rk4_step)));
  const double h = time / steps;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd k1 = V.eval(y);
    const Eigen::VectorXd k2 = V.eval(y + 0.5 * h * k1);
    const Eigen::VectorXd k3 = V.eval(y + 0.5 * h * k2);
    const Eigen::VectorXd k4 = V.eval(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite() || y.norm() > opt.runaway_norm) return false;
  }
  return true;
}

}  // namespace detail

/// Points reachable from y0 by composing flows e^{t_j V_{i_j}} with random
/// small times; diversity on the orbit is what matters here, not flow
/// accuracy.  Blown-up compositions are discarded and counted.
inline OrbitSample sample_orbit(const VectorFieldSystem& sys, const Eigen::VectorXd& y0,
                                int n_points, std::uint64_t seed,
                                const OrbitOptions& opt = OrbitOptions{}) {
  sys.validate();
  require_dims(y0.size() == sys.e, "sample_orbit: start point dimension mismatch");
  require(n_points >= 1, "sample_orbit: n_points must be >= 1");
  OrbitSample out;
  out.points.push_back(y0);
  Rng rng(seed, 0x0b17);
  int attempts = 0;
  while (static_cast<int>(out.points.size()) < n_points && attempts < 10 * n_points) {
    ++attempts;
    Eigen::VectorXd y = y0;
    const int flows =
        opt.min_flows + static_cast<int>(rng.below(
                            static_cast<std::uint64_t>(opt.max_flows - opt.min_flows + 1)));
    bool ok = true;
    for (int f = 0; f < flows && ok; ++f) {
      const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(sys.d())));
      const double t = rng.uniform(-opt.time_range, opt.time_range);
      ok = detail::rk4_flow(sys.fields[i], y, t, opt);
    }
    if (ok)
      out.points.push_back(y);
    else
      ++out.discarded;
  }
  return out;
}

// ---------------------------------------------------------------------------

enum class Verdict { holds, fails, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// Evidence for the bracket-rank constancy check.
struct RankConstancyReport {
  Verdict verdict = Verdict::inconclusive;
  int N = 0;
  int depth = 0;
  std::vector<int> ranks;              // per sampled point, brackets up to depth
  std::vector<int> ranks_prev_depth;   // per point, brackets up to depth - 1
  std::vector<double> sigma_gap;       // per point: smallest kept / largest dropped sv
  int discarded_points = 0;
  std::vector<std::string> notes;

  nlohmann::json to_json() const {
    return {{"verdict", to_string(verdict)},
            {"N", N},
            {"depth", depth},
            {"ranks_per_point", ranks},
            {"ranks_prev_depth", ranks_prev_depth},
            {"singular_value_gaps", sigma_gap},
            {"discarded_points", discarded_points},
            {"warnings", notes}};
  }
};

/// Constancy over sampled orbit points of dim span{ V_[I](y) : |I| > N }.
///
/// "holds": every point shows the same rank, stably across one decade of
/// threshold variation, with no rank change when the deepest bracket level is
/// removed.  "fails": ranks differ and each differing rank is threshold-stable.
/// "inconclusive": threshold-unstable ranks or depth saturation.
inline RankConstancyReport check_rank_constancy_over(const BracketTable& tab,
                                                     const std::vector<Eigen::VectorXd>& points,
                                                     int N, const RankPolicy& pol = RankPolicy{}) {
  require(!points.empty(), "check_rank_constancy: no evaluation points");
  RankConstancyReport rep;
  rep.N = N;
  rep.depth = tab.depth();
  const int min_len = N + 1;

  if (tab.depth() < min_len) {
    rep.verdict = Verdict::holds;
    rep.notes.push_back("vacuous: no brackets longer than N within depth");
    rep.ranks.assign(points.size(), 0);
    rep.ranks_prev_depth.assign(points.size(), 0);
    return rep;
  }

  bool stable = true;
  bool saturated = false;
  for (const auto& y : points) {
    const auto sv = detail::bracket_singular_values(tab, y, min_len, tab.depth());
    const double scale = sv.empty() ? 0.0 : sv.front();
    const int r = detail::rank_from_singular_values(sv, pol, scale);
    RankPolicy lo = pol, hi = pol;
    lo.rel_tol /= pol.robustness_span;
    lo.abs_floor /= pol.robustness_span;
    hi.rel_tol *= pol.robustness_span;
    hi.abs_floor *= pol.robustness_span;
    const int r_lo = detail::rank_from_singular_values(sv, lo, scale);
    const int r_hi = detail::rank_from_singular_values(sv, hi, scale);
    if (r_lo != r_hi) stable = false;
    rep.ranks.push_back(r);
    // gap evidence: kept sigma_r over dropped sigma_{r+1}; -1 when nothing is dropped
    double gap = -1.0;
    if (r > 0 && static_cast<std::size_t>(r) < sv.size() && sv[static_cast<std::size_t>(r)] > 0.0)
      gap = sv[static_cast<std::size_t>(r - 1)] / sv[static_cast<std::size_t>(r)];
    rep.sigma_gap.push_back(gap);

    if (tab.depth() > min_len) {
      const auto sv_prev = detail::bracket_singular_values(tab, y, min_len, tab.depth() - 1);
      const double sc_prev = sv_prev.empty() ? 0.0 : sv_prev.front();
      const int r_prev = detail::rank_from_singular_values(sv_prev, pol, sc_prev);
      rep.ranks_prev_depth.push_back(r_prev);
      if (r_prev != r) saturated = true;
    } else {
      rep.ranks_prev_depth.push_back(-1);
    }
  }

  if (tab.depth() == min_len) {
    rep.verdict = Verdict::inconclusive;
    rep.notes.push_back("depth window too shallow to assess saturation (depth == N + 1)");
    return rep;
  }
  if (saturated) {
    rep.verdict = Verdict::inconclusive;
    rep.notes.push_back("depth saturation: the deepest bracket level changes some rank");
    return rep;
  }
  if (!stable) {
    rep.verdict = Verdict::inconclusive;
    rep.notes.push_back("rank unstable within one decade of threshold variation");
    return rep;
  }
  bool all_equal = true;
  for (int r : rep.ranks)
    if (r != rep.ranks.front()) all_equal = false;
  rep.verdict = all_equal ? Verdict::holds : Verdict::fails;
  if (!all_equal) rep.notes.push_back("rank differs across sampled orbit points");
  return rep;
}

inline RankConstancyReport check_rank_constancy(const VectorFieldSystem& sys, int N,
                                                const Eigen::VectorXd& y0, int depth,
                                                int n_points, std::uint64_t seed,
                                                const RankPolicy& pol = RankPolicy{}) {
  BracketTable tab = BracketTable::build(sys, depth);
  OrbitSample orbit = sample_orbit(sys, y0, n_points, seed);
  RankConstancyReport rep = check_rank_constancy_over(tab, orbit.points, N, pol);
  rep.discarded_points = orbit.discarded;
  if (orbit.discarded > 0)
    rep.notes.push_back(std::to_string(orbit.discarded) + " flow compositions discarded");
  return rep;
}

/// dim of the coupled system's Lie algebra at y: the group dimension plus the
/// excess bracket span dim span{ V_[I](y) : |I| > N }.
inline std::uint64_t coupled_lie_dimension(const VectorFieldSystem& sys, int N,
                                           const Eigen::VectorXd& y, int depth,
                                           const RankPolicy& pol = RankPolicy{}) {
  BracketTable tab = BracketTable::build(sys, depth);
  const auto dims = witt_dimensions(sys.d(), N);
  return dims.dim_group +
         static_cast<std::uint64_t>(span_dimension_at(tab, y, N + 1, pol));
}

}  // namespace carnot
