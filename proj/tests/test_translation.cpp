#include <catch2/catch_amalgamated.hpp>

#include "carnot/translation.hpp"
#include "test_util.hpp"

using namespace carnot;

namespace {

Eigen::VectorXd vecn(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double max_abs_diff(const TensorSeries& a, const TensorSeries& b) {
  TensorSeries d = a;
  d -= b;
  return d.max_abs();
}

double path_max_diff(const GroupPath& x, const GroupPath& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    m = std::max(m, max_abs_diff(x.value(i).series(), y.value(i).series()));
  return m;
}

LinearPath random_linear(int d, std::size_t points, Rng& rng, double scale) {
  std::vector<double> times(points);
  std::vector<Eigen::VectorXd> vals(points);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < points; ++i) {
    times[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    vals[i] = v;
    for (int j = 0; j < d; ++j) v[j] += rng.gaussian() * scale;
  }
  return LinearPath(std::move(times), std::move(vals));
}

// group path whose log-increments carry genuine higher-level content
GroupPath rough_walk(int d, int N, std::size_t points, Rng& rng, double scale) {
  std::vector<double> times(points);
  std::vector<GroupElement> vals;
  GroupElement cur = GroupElement::identity(d, N);
  for (std::size_t i = 0; i < points; ++i) {
    times[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    if (i > 0) cur *= testutil::random_grouplike(d, N, rng, scale);
    vals.push_back(cur);
  }
  return GroupPath(std::move(times), std::move(vals));
}

}  // namespace

TEST_CASE("w12 seminorm of piecewise-linear paths") {
  SECTION("constant derivative") {
    const double T = 2.25, v = 1.3;
    LinearPath h({0.0, T}, {vecn({0.0}), vecn({v * T})});
    CHECK(w12_norm(h) == Catch::Approx(std::abs(v) * std::sqrt(T)));
  }

  SECTION("constant path") {
    LinearPath h = LinearPath::constant(vecn({2.0, -1.0}), 3.0);
    CHECK(w12_norm(h) == 0.0);
  }

  SECTION("slopes +1 then -1 over unit durations") {
    LinearPath h({0.0, 1.0, 2.0}, {vecn({0.0}), vecn({1.0}), vecn({0.0})});
    CHECK(w12_norm(h) == Catch::Approx(std::sqrt(2.0)));
  }

  SECTION("zero-length interval") {
    LinearPath h({0.0, 1.0}, {vecn({0.0}), vecn({1.0})});
    CHECK(w12_norm(h, 0.5, 0.5) == 0.0);
  }

  SECTION("subinterval energy") {
    LinearPath h({0.0, 1.0, 2.0}, {vecn({0.0}), vecn({1.0}), vecn({0.0})});
    CHECK(w12_norm(h, 0.5, 1.5) == Catch::Approx(1.0));
    SobolevPath sp(h);
    CHECK(sp.w12 == Catch::Approx(w12_norm(h)));
  }
}

TEST_CASE("translation identities") {
  Rng rng(2024);
  const int d = 2, N = 3;

  SECTION("translating the constant path gives the signature lift, exactly") {
    LinearPath h = random_linear(d, 9, rng, 0.4);
    GroupPath zero(h.times(),
                   std::vector<GroupElement>(h.size(), GroupElement::identity(d, N)));
    GroupPath lifted = signature_lift(h, N);
    GroupPath translated = translate(zero, h, 64);
    CHECK(path_max_diff(lifted, translated) < 1e-14);
  }

  SECTION("zero translator is the identity map, exactly") {
    GroupPath x = rough_walk(d, N, 9, rng, 0.4);
    LinearPath zero = LinearPath::zero(d, 1.0);
    CHECK(path_max_diff(translate(x, zero, 64), x) < 1e-12);
  }

  SECTION("first-level additivity is exact at every grid time") {
    GroupPath x = rough_walk(d, N, 9, rng, 0.4);
    LinearPath h = random_linear(d, 9, rng, 0.5);
    GroupPath y = translate(x, h, 16);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int j = 0; j < d; ++j) {
        const double expect = x.value(i).level1()[static_cast<std::size_t>(j)] +
                              h.value(i)[j] - h.value(0)[j];
        CHECK(y.value(i).level1()[static_cast<std::size_t>(j)] ==
              Catch::Approx(expect).margin(1e-12));
      }
    }
  }

  SECTION("round trip returns the path within sub-sampling tolerance") {
    // The backward pass inverts the forward interleaving factor by factor,
    // so the round trip is exact up to round-off at any sub-step count.
    for (int rep = 0; rep < 10; ++rep) {
      GroupPath x = rough_walk(d, N, 9, rng, 0.35);
      LinearPath h = random_linear(d, 9, rng, 0.35);
      GroupPath back = translate(translate(x, h, 64), h.negated(), 64);
      CHECK(path_max_diff(back, x) < 1e-6);
    }
  }

  SECTION("sub-sampling error shrinks under sub-step doubling") {
    GroupPath x = rough_walk(d, N, 9, rng, 0.5);
    LinearPath h = random_linear(d, 9, rng, 0.5);
    const GroupPath ref = translate(x, h, 4096);
    double prev = -1.0;
    for (int m : {8, 16, 32, 64}) {
      const double err = path_max_diff(translate(x, h, m), ref);
      if (prev >= 0.0) CHECK(err < prev);
      prev = err;
    }
  }

  SECTION("translating a lift matches lifting the summed path") {
    LinearPath g = random_linear(d, 9, rng, 0.4);
    LinearPath h = random_linear(d, 9, rng, 0.4);
    GroupPath x = signature_lift(g, N);
    std::vector<Eigen::VectorXd> sum;
    for (std::size_t i = 0; i < g.size(); ++i) sum.push_back(g.value(i) + h.value(i));
    GroupPath expect = signature_lift(LinearPath(g.times(), sum), N);
    // interleaving error decays like 1/m
    const double e64 = path_max_diff(translate(x, h, 64), expect);
    const double e512 = path_max_diff(translate(x, h, 512), expect);
    CHECK(e512 < e64 / 6.0);
    CHECK(e512 < 5e-3);
  }

  SECTION("dimension mismatch is rejected") {
    GroupPath x = rough_walk(2, 2, 5, rng, 0.3);
    LinearPath h = random_linear(3, 5, rng, 0.3);
    CHECK_THROWS_AS(translate(x, h), DimensionMismatch);
  }
}
