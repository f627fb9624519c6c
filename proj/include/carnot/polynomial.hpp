#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <vector>

#include "carnot/common.hpp"

namespace carnot {

/// Multivariate polynomial with dense-exponent monomials, stored in an
/// ordered map so arithmetic and iteration are deterministic.  Coefficient
/// arithmetic on small integers is exact in double precision, which the
/// bracket calculus relies on.
class Polynomial {
 public:
  using Exponents = std::vector<unsigned>;

  explicit Polynomial(int nvars) : nvars_(nvars) {
    require(nvars >= 1, "Polynomial: need at least one variable");
  }

  static Polynomial constant(int nvars, double c) {
    Polynomial p(nvars);
    if (c != 0.0) p.terms_[Exponents(static_cast<std::size_t>(nvars), 0)] = c;
    return p;
  }

  static Polynomial variable(int nvars, int var, double coeff = 1.0) {
    require(var >= 0 && var < nvars, "Polynomial: variable index out of range");
    Polynomial p(nvars);
    Exponents e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(var)] = 1;
    p.terms_[e] = coeff;
    return p;
  }

  static Polynomial monomial(int nvars, Exponents expo, double coeff) {
    require(expo.size() == static_cast<std::size_t>(nvars), "Polynomial: exponent arity mismatch");
    Polynomial p(nvars);
    if (coeff != 0.0) p.terms_[std::move(expo)] = coeff;
    return p;
  }

  int nvars() const { return nvars_; }
  const std::map<Exponents, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_) {
      int d = 0;
      for (unsigned k : e) d += static_cast<int>(k);
      deg = std::max(deg, d);
    }
    return deg;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_dims(nvars_ == o.nvars_, "Polynomial: arity mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    require_dims(nvars_ == o.nvars_, "Polynomial: arity mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  Polynomial& operator*=(double c) {
    if (c == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(double c, Polynomial p) { return p *= c; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require_dims(a.nvars_ == b.nvars_, "Polynomial: arity mismatch");
    Polynomial out(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  /// Exact partial derivative.
  Polynomial derivative(int var) const {
    require(var >= 0 && var < nvars_, "Polynomial: variable index out of range");
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
      const unsigned k = e[static_cast<std::size_t>(var)];
      if (k == 0) continue;
      Exponents de = e;
      --de[static_cast<std::size_t>(var)];
      out.add_term(de, c * static_cast<double>(k));
    }
    return out;
  }

  double eval(const Eigen::VectorXd& y) const {
    require_dims(y.size() == nvars_, "Polynomial: evaluation arity mismatch");
    double out = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (std::size_t i = 0; i < e.size(); ++i) {
        for (unsigned k = 0; k < e[i]; ++k) t *= y[static_cast<Eigen::Index>(i)];
      }
      out += t;
    }
    return out;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  void add_term(const Exponents& e, double c) {
    if (c == 0.0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  int nvars_;
  std::map<Exponents, double> terms_;
};

}  // namespace carnot
