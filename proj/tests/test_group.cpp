#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "carnot/group.hpp"
#include "carnot/lyndon.hpp"
#include "test_util.hpp"

using namespace carnot;

namespace {

// Independent oracle: count words that are strictly smaller than all of their
// proper rotations (equivalently, aperiodic minimal necklace representatives).
std::uint64_t lyndon_count_brute(int d, int k) {
  std::uint64_t count = 0;
  std::vector<int> w(static_cast<std::size_t>(k), 0);
  const auto total = static_cast<std::uint64_t>(std::pow(d, k));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (int i = k - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<int>(c % static_cast<std::uint64_t>(d));
      c /= static_cast<std::uint64_t>(d);
    }
    bool lyndon = true;
    for (int r = 1; r < k && lyndon; ++r) {
      std::vector<int> rot(w.begin() + r, w.end());
      rot.insert(rot.end(), w.begin(), w.begin() + r);
      if (!std::lexicographical_compare(w.begin(), w.end(), rot.begin(), rot.end()))
        lyndon = false;
    }
    if (lyndon) ++count;
  }
  return count;
}

double max_abs_diff(const TensorSeries& a, const TensorSeries& b) {
  TensorSeries d = a;
  d -= b;
  return d.max_abs();
}

}  // namespace

TEST_CASE("witt dimensions match examples and brute-force Lyndon enumeration") {
  auto d21 = witt_dimensions(2, 1);
  CHECK(d21.dim_group == 2);
  CHECK(d21.homogeneous_dim == 2);

  auto d22 = witt_dimensions(2, 2);
  CHECK(d22.dim_group == 3);
  CHECK(d22.homogeneous_dim == 4);

  auto d23 = witt_dimensions(2, 3);
  CHECK(d23.dim_group == 5);
  CHECK(d23.homogeneous_dim == 10);

  for (int d = 1; d <= 4; ++d) {
    for (int N = 1; N <= 5; ++N) {
      auto dims = witt_dimensions(d, N);
      REQUIRE(dims.dim_group >= static_cast<std::uint64_t>(d));
      REQUIRE(dims.homogeneous_dim >= dims.dim_group);
      for (int k = 1; k <= N; ++k) {
        CHECK(dims.witt[k - 1] == lyndon_count_brute(d, k));
      }
    }
  }
}

TEST_CASE("witt dimensions reject overflowing inputs") {
  CHECK_THROWS_AS(witt_dimensions(1000, 12), std::overflow_error);
}

TEST_CASE("Lyndon enumeration matches witt counts and basis is extractable") {
  for (int d = 2; d <= 3; ++d) {
    for (int N = 2; N <= 4; ++N) {
      const auto& basis = LyndonBasis::get(d, N);
      auto dims = witt_dimensions(d, N);
      for (int k = 1; k <= N; ++k)
        REQUIRE(basis.words(k).size() == dims.witt[k - 1]);

      // round trip: Lyndon coords -> tensor -> Lyndon coords, zero residual
      Rng rng(17 + static_cast<std::uint64_t>(d * 10 + N));
      for (int rep = 0; rep < 50; ++rep) {
        LieElement e = testutil::random_lie(d, N, rng);
        auto ex = tensor_to_lie(lie_to_tensor(e));
        REQUIRE(ex.residual < 1e-12);
        for (int k = 1; k <= N; ++k)
          for (std::size_t i = 0; i < e.levels[k - 1].size(); ++i)
            REQUIRE(ex.coeffs.levels[k - 1][i] == Catch::Approx(e.levels[k - 1][i]).margin(1e-12));
      }
    }
  }
}

TEST_CASE("group axioms hold on random grouplike elements") {
  for (int d = 2; d <= 4; ++d) {
    for (int N = 2; N <= 4; ++N) {
      Rng rng(1000 + static_cast<std::uint64_t>(d * 10 + N));
      const GroupElement e = GroupElement::identity(d, N);
      for (int rep = 0; rep < 100; ++rep) {
        GroupElement g = testutil::random_grouplike(d, N, rng);
        GroupElement h = testutil::random_grouplike(d, N, rng);
        GroupElement k = testutil::random_grouplike(d, N, rng);

        CHECK(max_abs_diff((e * g).series(), g.series()) < 1e-14);
        CHECK(max_abs_diff((g * e).series(), g.series()) < 1e-14);
        CHECK(max_abs_diff(((g * h) * k).series(), (g * (h * k)).series()) < 1e-10);
        CHECK(max_abs_diff((g * group_inverse(g)).series(), e.series()) < 1e-10);
        CHECK(is_grouplike(g * h, 1e-10));
      }
    }
  }
}

TEST_CASE("chen product expands to the order-2 commutator") {
  // antisymmetric level-2 part of exp(u) exp(v) equals (u (x) v - v (x) u) / 2
  const int d = 3, N = 2;
  Rng rng(7);
  auto u = testutil::random_vector(d, rng);
  auto v = testutil::random_vector(d, rng);
  GroupElement g = exp_level1(u, N) * exp_level1(v, N);
  const auto& l2 = g.series().level(2);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double anti = 0.5 * (l2[static_cast<std::size_t>(i * d + j)] -
                                 l2[static_cast<std::size_t>(j * d + i)]);
      CHECK(anti == Catch::Approx(0.5 * (u[i] * v[j] - v[i] * u[j])).margin(1e-12));
    }
  }
}

TEST_CASE("exp and log are mutually inverse") {
  SECTION("identity maps to zero") {
    GroupElement e = GroupElement::identity(2, 3);
    LieElement l = group_log(e);
    CHECK(l.max_abs() == 0.0);
  }

  SECTION("scalar exponential series, d=1 N=3") {
    const double v = 0.7;
    GroupElement g = exp_level1({v}, 3);
    CHECK(g.series().level(0)[0] == Catch::Approx(1.0));
    CHECK(g.series().level(1)[0] == Catch::Approx(v));
    CHECK(g.series().level(2)[0] == Catch::Approx(v * v / 2.0));
    CHECK(g.series().level(3)[0] == Catch::Approx(v * v * v / 6.0));
  }

  SECTION("round trip on random Lie elements") {
    for (int d = 2; d <= 3; ++d) {
      for (int N = 2; N <= 3; ++N) {
        Rng rng(42 + static_cast<std::uint64_t>(d + N));
        for (int rep = 0; rep < 250; ++rep) {
          LieElement l = testutil::random_lie(d, N, rng);
          LieElement back = group_log(lie_exp(l));
          for (int k = 1; k <= N; ++k)
            for (std::size_t i = 0; i < l.levels[k - 1].size(); ++i)
              REQUIRE(back.levels[k - 1][i] ==
                      Catch::Approx(l.levels[k - 1][i]).margin(1e-10));
        }
      }
    }
  }

  SECTION("log rejects non-grouplike input") {
    TensorSeries s = TensorSeries::unit(2, 2);
    s.level(2)[1] = 0.3;  // symmetric part only: not in the Lie subspace
    s.level(2)[2] = 0.3;
    GroupElement bad(std::move(s));
    CHECK_THROWS_AS(group_log(bad), NotGrouplike);
  }

  SECTION("inverse of exp is exp of negated vector") {
    auto v = std::vector<double>{0.3, -0.2};
    GroupElement g = exp_level1(v, 3);
    GroupElement ginv = group_inverse(g);
    GroupElement expect = exp_level1({-0.3, 0.2}, 3);
    CHECK(max_abs_diff(ginv.series(), expect.series()) < 1e-13);
  }
}

TEST_CASE("dilation and homogeneous norm") {
  Rng rng(99);
  const int d = 2, N = 3;

  SECTION("dilate(1) is the identity map; dilations compose") {
    GroupElement g = testutil::random_grouplike(d, N, rng);
    CHECK(max_abs_diff(dilate(1.0, g).series(), g.series()) == 0.0);
    CHECK(max_abs_diff(dilate(2.0, dilate(0.5, g)).series(), g.series()) < 1e-14);
  }

  SECTION("dilate acts on one-parameter subgroups") {
    auto v = std::vector<double>{0.4, -0.1};
    CHECK(max_abs_diff(dilate(3.0, exp_level1(v, N)).series(),
                       exp_level1({1.2, -0.3}, N).series()) < 1e-13);
  }

  SECTION("norm of identity is zero, norm of exp(v) is |v|") {
    CHECK(homogeneous_norm(GroupElement::identity(d, N)) == 0.0);
    auto v = std::vector<double>{3.0, 4.0};
    CHECK(homogeneous_norm(exp_level1(v, N)) == Catch::Approx(5.0));
  }

  SECTION("exact 1-homogeneity and symmetry") {
    for (int rep = 0; rep < 50; ++rep) {
      GroupElement g = testutil::random_grouplike(d, N, rng);
      const double n = homogeneous_norm(g);
      CHECK(homogeneous_norm(dilate(3.0, g)) == Catch::Approx(3.0 * n).epsilon(1e-12));
      CHECK(homogeneous_norm(group_inverse(g)) == Catch::Approx(n).epsilon(1e-12));
    }
  }

  SECTION("distance is induced by the norm") {
    GroupElement g = testutil::random_grouplike(d, N, rng);
    GroupElement h = testutil::random_grouplike(d, N, rng);
    CHECK(group_distance(g, h) ==
          Catch::Approx(homogeneous_norm(group_inverse(g) * h)).epsilon(1e-12));
    // the 1/k-th root in the homogeneous norm amplifies coefficient round-off
    CHECK(group_distance(g, g) < 1e-5);
  }
}
