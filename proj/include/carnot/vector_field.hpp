#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "carnot/polynomial.hpp"

namespace carnot {

/// Polynomial vector field on R^e: one polynomial per coordinate.
struct PolyVectorField {
  int e = 0;
  std::vector<Polynomial> components;

  static PolyVectorField zero(int e) {
    PolyVectorField f;
    f.e = e;
    f.components.assign(static_cast<std::size_t>(e), Polynomial(e));
    return f;
  }

  bool is_zero() const {
    for (const auto& p : components)
      if (!p.is_zero()) return false;
    return true;
  }

  Eigen::VectorXd eval(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(e);
    for (int i = 0; i < e; ++i) out[i] = components[static_cast<std::size_t>(i)].eval(y);
    return out;
  }

  PolyVectorField& operator-=(const PolyVectorField& o) {
    require_dims(e == o.e, "PolyVectorField: dimension mismatch");
    for (int i = 0; i < e; ++i)
      components[static_cast<std::size_t>(i)] -= o.components[static_cast<std::size_t>(i)];
    return *this;
  }
};

/// Derivative of the components of F along V: (sum_l V^l d_l F^m)_m.
inline PolyVectorField directional_derivative(const PolyVectorField& F,
                                              const PolyVectorField& V) {
  require_dims(F.e == V.e, "directional_derivative: dimension mismatch");
  PolyVectorField out = PolyVectorField::zero(F.e);
  for (int m = 0; m < F.e; ++m) {
    Polynomial acc(F.e);
    for (int l = 0; l < F.e; ++l) {
      const Polynomial dF = F.components[static_cast<std::size_t>(m)].derivative(l);
      if (dF.is_zero() || V.components[static_cast<std::size_t>(l)].is_zero()) continue;
      acc += V.components[static_cast<std::size_t>(l)] * dF;
    }
    out.components[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

/// Driving system V = (V_1, ..., V_d) of polynomial vector fields on R^e.
struct VectorFieldSystem {
  int e = 0;
  std::vector<PolyVectorField> fields;

  int d() const { return static_cast<int>(fields.size()); }

  int max_degree() const {
    int deg = 0;
    for (const auto& f : fields)
      for (const auto& p : f.components) deg = std::max(deg, p.degree());
    return deg;
  }

  void validate() const {
    require(e >= 1, "VectorFieldSystem: e must be >= 1");
    require(!fields.empty(), "VectorFieldSystem: need at least one field");
    for (const auto& f : fields) {
      require_dims(f.e == e, "VectorFieldSystem: field dimension mismatch");
      require_dims(static_cast<int>(f.components.size()) == e,
                   "VectorFieldSystem: component count mismatch");
    }
  }
};

// ---------------------------------------------------------------------------
// JSON shape: {"e": 3, "fields": [ field... ]} where a field is a list of e
// polynomials and a polynomial is a list of {"coeff": c, "exponents": [..]}.

inline nlohmann::json polynomial_to_json(const Polynomial& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) {
    out.push_back({{"coeff", c}, {"exponents", e}});
  }
  return out;
}

inline Polynomial polynomial_from_json(const nlohmann::json& j, int nvars) {
  require(j.is_array(), "vector field json: polynomial must be an array of monomials");
  Polynomial p(nvars);
  for (const auto& mono : j) {
    require(mono.contains("coeff") && mono.contains("exponents"),
            "vector field json: monomial needs 'coeff' and 'exponents'");
    const auto expo = mono.at("exponents").get<std::vector<unsigned>>();
    require(expo.size() == static_cast<std::size_t>(nvars),
            "vector field json: exponent arity mismatch");
    p += Polynomial::monomial(nvars, expo, mono.at("coeff").get<double>());
  }
  return p;
}

inline nlohmann::json vector_field_system_to_json(const VectorFieldSystem& sys) {
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : sys.fields) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& p : f.components) comps.push_back(polynomial_to_json(p));
    fields.push_back(comps);
  }
  return {{"e", sys.e}, {"fields", fields}};
}

inline VectorFieldSystem vector_field_system_from_json(const nlohmann::json& j) {
  require(j.contains("e"), "vector field json: missing field 'e'");
  require(j.contains("fields"), "vector field json: missing field 'fields'");
  VectorFieldSystem sys;
  sys.e = j.at("e").get<int>();
  for (const auto& fj : j.at("fields")) {
    require(fj.is_array() && fj.size() == static_cast<std::size_t>(sys.e),
            "vector field json: each field needs e component polynomials");
    PolyVectorField f;
    f.e = sys.e;
    for (const auto& pj : fj) f.components.push_back(polynomial_from_json(pj, sys.e));
    sys.fields.push_back(std::move(f));
  }
  sys.validate();
  return sys;
}

// ---------------------------------------------------------------------------
// Named systems used throughout the tests and demos.

/// V1 = d/dx, V2 = d/dy + x d/dz on R^3.
inline VectorFieldSystem heisenberg_fields() {
  VectorFieldSystem sys;
  sys.e = 3;
  PolyVectorField v1 = PolyVectorField::zero(3);
  v1.components[0] = Polynomial::constant(3, 1.0);
  PolyVectorField v2 = PolyVectorField::zero(3);
  v2.components[1] = Polynomial::constant(3, 1.0);
  v2.components[2] = Polynomial::variable(3, 0);
  sys.fields = {v1, v2};
  return sys;
}

/// V1 = d/dx, V2 = x d/dy on R^2.
inline VectorFieldSystem shear_fields() {
  VectorFieldSystem sys;
  sys.e = 2;
  PolyVectorField v1 = PolyVectorField::zero(2);
  v1.components[0] = Polynomial::constant(2, 1.0);
  PolyVectorField v2 = PolyVectorField::zero(2);
  v2.components[1] = Polynomial::variable(2, 0);
  sys.fields = {v1, v2};
  return sys;
}

/// V1 = V2 = d/dx on R^2 (degenerate: the orbit is a line).
inline VectorFieldSystem parallel_fields() {
  VectorFieldSystem sys;
  sys.e = 2;
  PolyVectorField v = PolyVectorField::zero(2);
  v.components[0] = Polynomial::constant(2, 1.0);
  sys.fields = {v, v};
  return sys;
}

/// Linear fields V_i(y) = A_i y.
inline VectorFieldSystem linear_fields(const std::vector<Eigen::MatrixXd>& mats) {
  require(!mats.empty(), "linear_fields: need at least one matrix");
  const int e = static_cast<int>(mats.front().rows());
  VectorFieldSystem sys;
  sys.e = e;
  for (const auto& A : mats) {
    require_dims(A.rows() == e && A.cols() == e, "linear_fields: square matrices of equal size");
    PolyVectorField f = PolyVectorField::zero(e);
    for (int i = 0; i < e; ++i) {
      Polynomial row(e);
      for (int j = 0; j < e; ++j) {
        if (A(i, j) != 0.0) row += Polynomial::variable(e, j, A(i, j));
      }
      f.components[static_cast<std::size_t>(i)] = row;
    }
    sys.fields.push_back(std::move(f));
  }
  return sys;
}

inline VectorFieldSystem named_fields(const std::string& name) {
  if (name == "heisenberg") return heisenberg_fields();
  if (name == "shear") return shear_fields();
  if (name == "parallel") return parallel_fields();
  throw std::invalid_argument("named_fields: unknown system '" + name + "'");
}

}  // namespace carnot
