#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace carnot {

inline constexpr const char* kVersion = "0.1.0";

/// Default absolute tolerance for algebraic identities on unit-scale inputs.
inline constexpr double kDefaultTol = 1e-10;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotGrouplike : std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown when a matrix field violates its declared ellipticity bounds.
struct EllipticityViolation : std::runtime_error {
  EllipticityViolation(const std::string& what, std::int64_t step)
      : std::runtime_error(what), step_index(step) {}
  std::int64_t step_index = -1;
};

/// Thrown by conditional estimators when too few paths survive the
/// conditioning event.
struct InsufficientConditioningMass : std::runtime_error {
  InsufficientConditioningMass(const std::string& what, std::int64_t survived,
                               std::int64_t total)
      : std::runtime_error(what), survivors(survived), samples(total) {}
  std::int64_t survivors = 0;
  std::int64_t samples = 0;
};

struct NonFiniteState : std::runtime_error {
  NonFiniteState(const std::string& what, std::int64_t step)
      : std::runtime_error(what), step_index(step) {}
  std::int64_t step_index = -1;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_dims(bool cond, const std::string& msg) {
  if (!cond) throw DimensionMismatch(msg);
}

}  // namespace carnot
