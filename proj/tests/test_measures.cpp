#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "groupoidal/measures.hpp"

#include <random>

using namespace groupoidal;
using RC = RationalComplex;

TEST_CASE("modular function") {
  auto g = build_transformation_groupoid(2, {1, 0});
  SUBCASE("uniform measures are unimodular") {
    auto md = modular_function(g, UnitMeasure::uniform(2));
    for (const auto& m : g.all_morphisms(6)) CHECK(md.delta(m) == Rational(1));
  }
  SUBCASE("swap with mu = (1,2)") {
    auto md = modular_function(g, UnitMeasure({Rational(1), Rational(2)}));
    CHECK(md.delta(Morphism::trans(0, 1)) == Rational(1, 2));
    auto c = md.radon_nikodym_cocycle();
    CHECK(c.value(g, Morphism::trans(0, 1)) == doctest::Approx(-std::log(2.0)));
  }
  SUBCASE("Delta is multiplicative") {
    auto md = modular_function(g, UnitMeasure({Rational(2), Rational(5)}));
    for (const auto& a : g.all_morphisms(4))
      for (const auto& b : g.all_morphisms(4))
        if (auto ab = g.compose(a, b)) CHECK(md.delta(*ab) == md.delta(a) * md.delta(b));
  }
  SUBCASE("wrong weight count is rejected") {
    CHECK_THROWS_AS(modular_function(g, UnitMeasure({Rational(1)})), std::invalid_argument);
  }
}

TEST_CASE("tau functional") {
  auto g = build_transformation_groupoid(3, {1, 2, 0});
  UnitMeasure mu({Rational(1), Rational(2), Rational(4)});
  SUBCASE("tau(identity) is the total mass") {
    CHECK(tau_functional(identity_element<RC>(g), mu) == RC{Rational(7)});
  }
  SUBCASE("tau vanishes off the units") {
    CHECK(tau_functional(delta<RC>(g, Morphism::trans(0, 2)), mu) == RC{});
  }
  SUBCASE("tau(f^* f) >= 0, exactly") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
      auto f = detail::random_rational_element(g, rng, 5, 6);
      auto v = tau_functional(convolve(involute(f), f), mu);
      CHECK(v.im == Rational(0));
      CHECK(v.re >= Rational(0));
    }
  }
}

TEST_CASE("trace identity") {
  auto g = build_transformation_groupoid(2, {1, 0});
  SUBCASE("holds on the kernel of c_mu for any mu") {
    UnitMeasure mu({Rational(1), Rational(2)});
    Cocycle c_mu = Cocycle::log_modular(mu);
    auto rep = check_trace_unimodular(g, mu, 100, 7, &c_mu);
    CHECK(rep.ok);
  }
  SUBCASE("holds on the full algebra for uniform mu") {
    auto rep = check_trace_unimodular(g, UnitMeasure::uniform(2), 100);
    CHECK(rep.ok);
  }
  SUBCASE("non-unimodular full algebra is rejected with a witness") {
    auto rep = check_trace_unimodular(g, UnitMeasure({Rational(1), Rational(2)}), 100);
    CHECK_FALSE(rep.ok);
    CHECK(rep.failures[0].find("not unimodular") != std::string::npos);
    CHECK(rep.failures[0].find("(0,") != std::string::npos);
  }
}

TEST_CASE("KMS condition at beta = -1") {
  SUBCASE("uniform measure reduces to the trace property") {
    auto g = build_transformation_groupoid(2, {1, 0});
    CHECK(check_kms(g, UnitMeasure::uniform(2), 100).ok);
  }
  SUBCASE("two-term hand enumeration on the swap groupoid") {
    auto g = build_transformation_groupoid(2, {1, 0});
    UnitMeasure mu({Rational(1), Rational(2)});
    auto f = delta<RC>(g, Morphism::trans(0, 1));
    auto h = delta<RC>(g, Morphism::trans(1, -1));
    // f * u_{-i}(h) = Delta(1,-1) f*h = 2 delta_{unit 0}; tau = 2 mu(0) = 2.
    auto lhs = tau_functional(convolve(f, modular_scale(h, mu)), mu);
    // h * f = unit at 1; tau = mu(1) = 2.
    auto rhs = tau_functional(convolve(h, f), mu);
    CHECK(lhs == RC{Rational(2)});
    CHECK(rhs == RC{Rational(2)});
  }
  SUBCASE("200 random pairs on the 3-cycle with random rational measures") {
    auto g = build_transformation_groupoid(3, {1, 2, 0});
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<long long> num(1, 9), den(1, 5);
    for (int trial = 0; trial < 4; ++trial) {
      UnitMeasure mu({Rational(num(rng), den(rng)), Rational(num(rng), den(rng)),
                      Rational(num(rng), den(rng))});
      CHECK(check_kms(g, mu, 50, static_cast<unsigned>(rng())).ok);
    }
  }
}
