#include <catch2/catch_amalgamated.hpp>

#include "carnot/lemma_suite.hpp"

using namespace carnot;

// Randomized verification of the three deterministic Holder-norm bounds.
// Full 1000-case runs live in the acceptance suite; these smaller runs keep
// the unit suite fast while still exercising the adversarial generators.

TEST_CASE("stopping-window bound holds on randomized grid paths") {
  auto res = run_window_bound_suite(200, 20240601);
  CHECK(res.cases == 200);
  CHECK(res.violations == 0);
  CHECK(res.worst_margin <= 1.0 + 1e-12);
}

TEST_CASE("dyadic-scale bound holds on randomized dyadic grid paths") {
  auto res = run_dyadic_bound_suite(200, 20240602);
  CHECK(res.cases == 200);
  CHECK(res.violations == 0);
}

TEST_CASE("ball-anchor bound holds on randomized grid paths") {
  auto res = run_anchor_bound_suite(200, 20240603);
  CHECK(res.cases == 200);
  CHECK(res.violations == 0);
}
