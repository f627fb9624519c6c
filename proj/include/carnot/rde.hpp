#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <ostream>
#include <vector>

#include "carnot/path.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

/// Step-N Euler scheme for dY = V(Y) dX driven by group increments:
///   y' = y + sum_{k=1..N} sum_{(i_1..i_k)} (V_{i_1} ... V_{i_k} Id)(y) g^{(i_1..i_k)}
/// where V_i acts as the directional-derivative operator along V_i and the
/// multi-index matches the tensor slot order of the increment.  The iterated
/// derivative fields are exact polynomial compositions, precomputed once.
class EulerScheme {
 public:
  EulerScheme(VectorFieldSystem sys, int N) : sys_(std::move(sys)), depth_(N) {
    sys_.validate();
    require(N >= 1, "EulerScheme: N must be >= 1");
    const int d = sys_.d();
    const int e = sys_.e;

    // identity map as a polynomial field
    PolyVectorField id = PolyVectorField::zero(e);
    for (int i = 0; i < e; ++i)
      id.components[static_cast<std::size_t>(i)] = Polynomial::variable(e, i);

    tables_.resize(static_cast<std::size_t>(N));
    // level 1: V_i Id = V_i
    tables_[0] = sys_.fields;
    for (int k = 2; k <= N; ++k) {
      const auto& prev = tables_[static_cast<std::size_t>(k - 2)];
      auto& cur = tables_[static_cast<std::size_t>(k - 1)];
      cur.reserve(static_cast<std::size_t>(d) * prev.size());
      // multi-index (i, J): outermost operator V_i applied to the field of J
      for (int i = 0; i < d; ++i) {
        for (const auto& fj : prev)
          cur.push_back(directional_derivative(fj, sys_.fields[static_cast<std::size_t>(i)]));
      }
    }
  }

  const VectorFieldSystem& system() const { return sys_; }
  int depth() const { return depth_; }

  Eigen::VectorXd step(const Eigen::VectorXd& y, const GroupElement& g) const {
    require_dims(g.dim() == sys_.d(), "EulerScheme: driver dimension mismatch");
    require_dims(y.size() == sys_.e, "EulerScheme: state dimension mismatch");
    const int N = std::min(depth_, g.depth());
    Eigen::VectorXd out = y;
    for (int k = 1; k <= N; ++k) {
      const auto& lv = g.series().level(k);
      const auto& tab = tables_[static_cast<std::size_t>(k - 1)];
      for (std::size_t idx = 0; idx < tab.size(); ++idx) {
        const double c = lv[idx];
        if (c == 0.0) continue;
        out += c * tab[idx].eval(y);
      }
    }
    return out;
  }

 private:
  VectorFieldSystem sys_;
  int depth_;
  // tables_[k-1][flat multi-index] = V_{i_1} ... V_{i_k} Id
  std::vector<std::vector<PolyVectorField>> tables_;
};

/// Iterate the step scheme over the driver's grid increments.
/// Throws NonFiniteState (with the step index) if the state blows up.
inline std::vector<Eigen::VectorXd> solve_rde(const EulerScheme& scheme,
                                              const Eigen::VectorXd& y0, const GroupPath& X) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(X.size());
  out.push_back(y0);
  for (std::size_t k = 0; k + 1 < X.size(); ++k) {
    Eigen::VectorXd next = scheme.step(out.back(), X.increment(k, k + 1));
    if (!next.allFinite())
      throw NonFiniteState("solve_rde: non-finite state at step " + std::to_string(k),
                           static_cast<std::int64_t>(k));
    out.push_back(std::move(next));
  }
  return out;
}

inline std::vector<Eigen::VectorXd> solve_rde(const VectorFieldSystem& sys,
                                              const Eigen::VectorXd& y0, const GroupPath& X) {
  return solve_rde(EulerScheme(sys, X.depth()), y0, X);
}

/// CSV dump: header "t,y1,...,ye".
inline void write_solution_csv(const std::vector<double>& times,
                               const std::vector<Eigen::VectorXd>& ys, std::ostream& os) {
  require(times.size() == ys.size(), "write_solution_csv: size mismatch");
  os << "t";
  for (Eigen::Index j = 1; j <= ys.front().size(); ++j) os << ",y" << j;
  os << "\n";
  char buf[64];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", times[i]);
    os << buf;
    for (Eigen::Index j = 0; j < ys[i].size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ys[i][j]);
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace carnot
