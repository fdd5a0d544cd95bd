#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "groupoidal/cocycle.hpp"
#include "groupoidal/groupoid.hpp"

#include <random>

using namespace groupoidal;

TEST_CASE("pair groupoid on 2 units is valid") {
  auto g = build_pair_groupoid(2);
  CHECK(g.n_units() == 2);
  CHECK(g.all_morphisms(0).size() == 4);
  CHECK(validate_axioms(g, 0).valid());
}

TEST_CASE("corrupted composition table is detected with a witness") {
  auto g = build_cyclic_group_groupoid(12);
  auto f = g.finite_data();
  f.table[{3, 4}] = 2;  // should be 7
  ValidationReport rep;
  detail::validate_finite(f, rep);
  CHECK_FALSE(rep.violations.empty());
}

TEST_CASE("swap transformation groupoid passes a 1000-sample budget") {
  auto g = build_transformation_groupoid(2, {1, 0});
  CHECK(validate_axioms(g, 1000).valid());
}

TEST_CASE("composition bookkeeping") {
  auto g = build_transformation_groupoid(2, {1, 0});
  SUBCASE("degrees add when sources match") {
    // d(0,1) = 0 . 1 = 1 = r(1,1)
    auto ab = g.compose(Morphism::trans(0, 1), Morphism::trans(1, 1));
    REQUIRE(ab.has_value());
    CHECK(*ab == Morphism::trans(0, 2));
  }
  SUBCASE("units are left identities") {
    Morphism a = Morphism::trans(1, 3);
    auto ua = g.compose(g.unit(g.range(a)), a);
    REQUIRE(ua.has_value());
    CHECK(*ua == a);
  }
  SUBCASE("non-composable pairs are rejected as a normal outcome") {
    // d(0,1) = 1 != 0 = r(0,1)
    CHECK_FALSE(g.compose(Morphism::trans(0, 1), Morphism::trans(0, 1)).has_value());
  }
}

TEST_CASE("Deaconu composition and inversion") {
  auto g = build_deaconu_groupoid(2, {1, 0});  // sigma = swap
  Morphism a = Morphism::deaconu(0, 1, 1);
  REQUIRE(g.is_valid(a));
  auto prod = g.compose(a, g.invert(a));
  REQUIRE(prod.has_value());
  CHECK(*prod == g.unit(0));
  CHECK(g.invert(a) == Morphism::deaconu(1, -1, 0));
}

TEST_CASE("inversion bookkeeping") {
  SUBCASE("transformation 5-cycle") {
    auto g = build_transformation_groupoid(5, {1, 2, 3, 4, 0});
    CHECK(g.invert(Morphism::trans(0, 3)) == Morphism::trans(3, -3));
  }
  SUBCASE("units are their own inverses") {
    auto g = build_transformation_groupoid(3, {1, 2, 0});
    for (int x = 0; x < 3; ++x) CHECK(g.invert(g.unit(x)) == g.unit(x));
  }
  SUBCASE("pair groupoid (i,j) inverts to (j,i)") {
    auto g = build_pair_groupoid(3);
    // id = i*3 + j
    CHECK(g.invert(Morphism::finite(1 * 3 + 2)) == Morphism::finite(2 * 3 + 1));
  }
}

TEST_CASE("transformation groupoid builders") {
  SUBCASE("one unit, identity action, is Z") {
    auto g = build_transformation_groupoid(1, {0});
    CHECK(g.n_units() == 1);
    CHECK(g.source(Morphism::trans(0, 7)) == 0);
    CHECK(g.all_morphisms(3).size() == 7);
  }
  SUBCASE("3-cycle: period divides degree") {
    auto g = build_transformation_groupoid(3, {1, 2, 0});
    CHECK(g.source(Morphism::trans(0, 3)) == 0);
    CHECK(g.source(Morphism::trans(0, 1)) == 1);
  }
  SUBCASE("identity action on two points is two copies of Z") {
    auto g = build_transformation_groupoid(2, {0, 1});
    CHECK_FALSE(g.compose(Morphism::trans(0, 1), Morphism::trans(1, 1)).has_value());
    CHECK(g.compose(Morphism::trans(0, 1), Morphism::trans(0, 1)).has_value());
  }
  SUBCASE("non-permutation act is rejected") {
    CHECK_THROWS_AS(build_transformation_groupoid(2, {0, 0}), std::invalid_argument);
  }
}

TEST_CASE("Deaconu validity search") {
  SUBCASE("swap: (0,1,1) valid with k=0") {
    auto g = build_deaconu_groupoid(2, {1, 0});
    CHECK(g.is_valid(Morphism::deaconu(0, 1, 1)));
  }
  SUBCASE("constant map: (1,0,2) valid with k=1") {
    auto g = build_deaconu_groupoid(3, {0, 0, 0});
    CHECK(g.is_valid(Morphism::deaconu(1, 0, 2)));
    CHECK(validate_axioms(g, 500).valid());
  }
  SUBCASE("empty domain leaves only units") {
    auto g = build_deaconu_groupoid(3, {-1, -1, -1});
    auto all = g.all_morphisms(4);
    REQUIRE(all.size() == 3);
    for (const auto& m : all) CHECK(g.is_unit(m));
  }
}

TEST_CASE("quotient by the kernel of a cocycle") {
  SUBCASE("degree cocycle on X x Z: class map is injective") {
    auto g = build_transformation_groupoid(3, {1, 2, 0});
    auto q = quotient_by_kernel(g, Cocycle::degree(), 4);
    auto all = g.all_morphisms(4);
    CHECK(q.classes.size() == all.size());
    for (const auto& m : all) CHECK(q.class_of(m) == std::make_pair(g.range(m), Rational(g.degree(m))));
  }
  SUBCASE("zero cocycle: classes are the unit space") {
    auto g = build_transformation_groupoid(2, {1, 0});
    auto q = quotient_by_kernel(g, Cocycle::zero(), 5);
    CHECK(static_cast<int>(q.classes.size()) == g.n_units());
  }
  SUBCASE("pair groupoid with injective potential: classes biject with morphisms") {
    auto g = build_pair_groupoid(3);
    auto c = Cocycle::potential({Rational(0), Rational(1), Rational(5)});
    auto q = quotient_by_kernel(g, c, 0);
    CHECK(q.classes.size() == g.all_morphisms(0).size());
  }
}

TEST_CASE("randomized sampling finds no violations on the shipped families") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);
    std::vector<int> act(n);
    for (int i = 0; i < n; ++i) act[i] = (i + 1) % n;
    CHECK(validate_axioms(build_transformation_groupoid(n, act), 300, rng()).valid());
  }
}
