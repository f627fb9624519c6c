#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "carnot/group.hpp"
#include "carnot/rng.hpp"

namespace carnot {

/// Measurable map from the group into symmetric d x d matrices with uniform
/// ellipticity constant Lambda: Lambda^-1 |xi|^2 <= <xi, a(x) xi> <= Lambda |xi|^2.
class SubellipticField {
 public:
  using EvalFn = std::function<Eigen::MatrixXd(const GroupElement&)>;

  SubellipticField(int d, double lambda, EvalFn eval, bool level1_only, bool constant,
                   std::string name = "custom")
      : d_(d),
        lambda_(lambda),
        eval_(std::move(eval)),
        level1_only_(level1_only),
        constant_(constant),
        name_(std::move(name)) {
    require(d >= 1, "SubellipticField: d must be >= 1");
    require(lambda >= 1.0, "SubellipticField: Lambda must be >= 1");
  }

  int dim() const { return d_; }
  double lambda() const { return lambda_; }
  bool depends_on_level_one_only() const { return level1_only_; }
  bool is_constant() const { return constant_; }
  const std::string& name() const { return name_; }

  Eigen::MatrixXd operator()(const GroupElement& x) const { return eval_(x); }

  /// Sample random points and directions; throws on an ellipticity violation.
  void spot_check(Rng& rng, int samples = 32, double slack = 1e-9) const {
    for (int s = 0; s < samples; ++s) {
      LieElement l = LieElement::zero(d_, 2);
      for (double& c : l.levels[0]) c = rng.uniform(-2.0, 2.0);
      for (double& c : l.levels[1]) c = rng.uniform(-1.0, 1.0);
      const GroupElement x = lie_exp(l);
      const Eigen::MatrixXd a = eval_(x);
      if ((a - a.transpose()).lpNorm<Eigen::Infinity>() > 1e-12)
        throw EllipticityViolation("field '" + name_ + "' is not symmetric at a sampled point",
                                   -1);
      Eigen::VectorXd xi(d_);
      for (int j = 0; j < d_; ++j) xi[j] = rng.gaussian();
      const double q = xi.dot(a * xi);
      const double n2 = xi.squaredNorm();
      if (q < n2 / lambda_ - slack || q > n2 * lambda_ + slack)
        throw EllipticityViolation("field '" + name_ + "' violates ellipticity at a sampled point",
                                   -1);
    }
  }

  static SubellipticField identity(int d) {
    return SubellipticField(
        d, 1.0, [d](const GroupElement&) { return Eigen::MatrixXd::Identity(d, d); }, true, true,
        "identity");
  }

  static SubellipticField scaled_identity(int d, double c) {
    require(c > 0.0, "scaled_identity: scale must be positive");
    const double lam = std::max(c, 1.0 / c);
    return SubellipticField(
        d, std::max(1.0, lam),
        [d, c](const GroupElement&) {
          return (c * Eigen::MatrixXd::Identity(d, d)).eval();
        },
        true, true, "scaled_identity");
  }

  static SubellipticField diagonal(const Eigen::VectorXd& diag) {
    const int d = static_cast<int>(diag.size());
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) {
      require(diag[j] > 0.0, "diagonal: entries must be positive");
      hi = std::max(hi, diag[j]);
      lo = std::min(lo, diag[j]);
    }
    const double lam = std::max({1.0, hi, 1.0 / lo});
    Eigen::MatrixXd m = diag.asDiagonal();
    return SubellipticField(
        d, lam, [m](const GroupElement&) { return m; }, true, true, "diagonal");
  }

  /// Smooth level-1-dependent field a(x) = (base + amp sin(x^1)) Id.
  static SubellipticField level1_sine(int d, double base, double amp) {
    require(base - std::abs(amp) > 0.0, "level1_sine: base must exceed |amp|");
    const double lam = std::max({1.0, base + std::abs(amp), 1.0 / (base - std::abs(amp))});
    return SubellipticField(
        d, lam,
        [d, base, amp](const GroupElement& x) {
          const double f = base + amp * std::sin(x.level1()[0]);
          return (f * Eigen::MatrixXd::Identity(d, d)).eval();
        },
        true, false, "level1_sine");
  }

 private:
  int d_;
  double lambda_;
  EvalFn eval_;
  bool level1_only_;
  bool constant_;
  std::string name_;
};

}  // namespace carnot
