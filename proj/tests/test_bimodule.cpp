#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "groupoidal/bimodule.hpp"
#include "groupoidal/measures.hpp"

#include <random>

using namespace groupoidal;
using C = std::complex<double>;
using RC = RationalComplex;

namespace {

/// The paper's z-dependent form of the kernel-valued inner product: the sum
/// over the r-fiber at r(z) of conj(Phi(xi^{-1} z)) Psi(xi^{-1} z chi). Used
/// as an oracle for choice-independence.
C inner_oracle_at_z(const AlgebraElement<C>& phi, const AlgebraElement<C>& psi,
                    const Morphism& chi, const Morphism& z, std::int64_t window) {
  const Groupoid& g = *phi.parent;
  C out = 0;
  for (const auto& xi_inv : g.fiber_source(g.range(z), window)) {
    // xi runs over the r-fiber at r(z); xi_inv = xi^{-1} runs over the d-fiber.
    auto xz = g.compose(xi_inv, z);
    if (!xz) continue;
    auto xzc = g.compose(*xz, chi);
    if (!xzc) continue;
    out += std::conj(phi.at(*xz)) * psi.at(*xzc);
  }
  return out;
}

}  // namespace

TEST_CASE("module actions") {
  auto g = build_transformation_groupoid(3, {1, 2, 0});
  auto c = Cocycle::degree();
  std::mt19937_64 rng(21);
  SUBCASE("identity acts trivially on the left") {
    auto phi = detail::random_rational_element(g, rng, 5, 6);
    CHECK(act_left(identity_element<RC>(g), phi) == phi);
  }
  SUBCASE("left action is associative") {
    for (int i = 0; i < 30; ++i) {
      auto f = detail::random_rational_element(g, rng, 4, 6);
      auto h = detail::random_rational_element(g, rng, 4, 6);
      auto phi = detail::random_rational_element(g, rng, 4, 6);
      CHECK(act_left(convolve(f, h), phi) == act_left(f, act_left(h, phi)));
    }
  }
  SUBCASE("deltas compose or annihilate") {
    auto a = Morphism::trans(0, 2), b = Morphism::trans(2, 1);
    CHECK(act_left(delta<RC>(g, a), delta<RC>(g, b)) ==
          delta<RC>(g, *g.compose(a, b)));
    CHECK(act_left(delta<RC>(g, a), delta<RC>(g, a)).empty());
  }
  SUBCASE("kernel unit sum acts trivially on the right") {
    // For the degree cocycle ker c is the unit space, so the unit sum is the
    // identity of C_c(H).
    auto phi = detail::random_rational_element(g, rng, 5, 6);
    CHECK(act_right(phi, identity_element<RC>(g), c) == phi);
  }
  SUBCASE("actions commute") {
    Cocycle zero = Cocycle::zero();
    for (int i = 0; i < 30; ++i) {
      auto f = detail::random_rational_element(g, rng, 4, 6);
      auto phi = detail::random_rational_element(g, rng, 4, 6);
      auto h = detail::random_rational_element(g, rng, 4, 6);
      CHECK(act_right(act_left(f, phi), h, zero) == act_left(f, act_right(phi, h, zero)));
    }
  }
  SUBCASE("right action by unit functions is pointwise scaling by h(d(.))") {
    AlgebraElement<RC> h(g);
    for (int x = 0; x < 3; ++x) h.set(g.unit(x), RC{Rational(x + 1)});
    auto phi = detail::random_rational_element(g, rng, 5, 6);
    auto out = act_right(phi, h, c);
    for (const auto& [m, v] : phi.coef)
      CHECK(out.at(m) == RC{Rational(g.source(m) + 1)} * v);
  }
  SUBCASE("support outside the kernel is rejected") {
    auto h = delta<RC>(g, Morphism::trans(0, 1));
    auto phi = detail::random_rational_element(g, rng, 3, 6);
    CHECK_THROWS_AS(act_right(phi, h, c), std::invalid_argument);
  }
}

TEST_CASE("kernel-valued inner product") {
  auto g = build_transformation_groupoid(3, {1, 2, 0});
  auto c = Cocycle::degree();
  std::mt19937_64 rng(22);
  SUBCASE("<delta_xi, delta_xi> is the unit at d(xi)") {
    auto xi = Morphism::trans(1, 2);
    CHECK(inner_product_kernel(delta<RC>(g, xi), delta<RC>(g, xi), c) ==
          delta<RC>(g, g.unit(g.source(xi))));
  }
  SUBCASE("<Phi, Phi> is positive semidefinite") {
    for (int i = 0; i < 20; ++i) {
      auto phi = to_complex_element(detail::random_rational_element(g, rng, 4, 4));
      auto ip = inner_product_kernel(phi, phi, c);
      for (int u = 0; u < g.n_units(); ++u) {
        auto mat = truncated_regular_rep(ip, u, Window{12});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat);
        if (mat.rows() > 0) CHECK(es.eigenvalues().minCoeff() > -1e-10);
      }
    }
  }
  SUBCASE("the paper's z-dependent formula is independent of the choice of z") {
    for (int i = 0; i < 10; ++i) {
      auto phi = to_complex_element(detail::random_rational_element(g, rng, 4, 3));
      auto psi = to_complex_element(detail::random_rational_element(g, rng, 4, 3));
      auto ip = inner_product_kernel(phi, psi, c);
      for (int x = 0; x < g.n_units(); ++x) {
        Morphism chi = g.unit(x);  // ker(degree) = units
        std::vector<C> vals;
        for (std::int64_t n = -3; n <= 3; ++n) {
          // Any z with d(z) = r(chi) may be chosen.
          Morphism z = g.invert(Morphism::trans(x, n));
          vals.push_back(inner_oracle_at_z(phi, psi, chi, z, 16));
        }
        for (const auto& v : vals) {
          CHECK(std::abs(v - vals.front()) < 1e-12);
          CHECK(std::abs(v - ip.at(chi)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("parent-valued inner product (transitive case)") {
  auto g = build_pair_groupoid(3);
  Cocycle zero = Cocycle::zero();
  std::mt19937_64 rng(23);
  SUBCASE("<delta_xi, delta_xi> is the unit at r(xi)") {
    auto xi = Morphism::finite(1 * 3 + 2);
    CHECK(inner_product_parent(delta<RC>(g, xi), delta<RC>(g, xi), zero) ==
          delta<RC>(g, g.unit(g.range(xi))));
  }
  SUBCASE("zero module element gives zero") {
    AlgebraElement<RC> phi(g);
    CHECK(inner_product_parent(phi, phi, zero).empty());
  }
  SUBCASE("compatibility <Phi,Psi>_G . Theta = Phi . <Psi,Theta>_H") {
    for (int i = 0; i < 50; ++i) {
      auto phi = detail::random_rational_element(g, rng, 4, 0);
      auto psi = detail::random_rational_element(g, rng, 4, 0);
      auto theta = detail::random_rational_element(g, rng, 4, 0);
      auto lhs = act_left(inner_product_parent(phi, psi, zero), theta);
      auto rhs = convolve(phi, inner_product_kernel(psi, theta, zero));
      CHECK(lhs == rhs);
    }
  }
  SUBCASE("undefined when the kernel action is not transitive") {
    auto z = build_transformation_groupoid(1, {0});
    auto phi = delta<RC>(z, Morphism::trans(0, 1));
    CHECK_THROWS_AS(inner_product_parent(phi, phi, Cocycle::degree()), std::invalid_argument);
  }
}

TEST_CASE("the operator D") {
  auto z = build_transformation_groupoid(1, {0});
  auto c = Cocycle::degree();
  SUBCASE("on Z with c = id, D is multiplication by n") {
    for (std::int64_t n = -6; n <= 6; ++n)
      CHECK(apply_D(delta<RC>(z, Morphism::trans(0, n)), c) ==
            delta<RC>(z, Morphism::trans(0, n), RC{Rational(n)}));
  }
  SUBCASE("D kills unit-supported elements") {
    auto g = build_transformation_groupoid(3, {1, 2, 0});
    CHECK(apply_D(identity_element<RC>(g), c).empty());
  }
  SUBCASE("derivation identity, exact") {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 100; ++i) {
      auto f = detail::random_rational_element(z, rng, 4, 6);
      auto phi = detail::random_rational_element(z, rng, 4, 6);
      CHECK(apply_D(convolve(f, phi), c) ==
            convolve(apply_D(f, c), phi) + convolve(f, apply_D(phi, c)));
    }
  }
  SUBCASE("D is symmetric for the kernel-valued inner product, exact") {
    std::mt19937_64 rng(25);
    for (int i = 0; i < 100; ++i) {
      auto phi = detail::random_rational_element(z, rng, 4, 6);
      auto psi = detail::random_rational_element(z, rng, 4, 6);
      CHECK(inner_product_kernel(apply_D(phi, c), psi, c) ==
            inner_product_kernel(phi, apply_D(psi, c), c));
    }
  }
}

TEST_CASE("transforms of D") {
  auto z = build_transformation_groupoid(1, {0});
  auto c = Cocycle::degree();
  std::mt19937_64 rng(26);
  SUBCASE("on the kernel: resolvent = 1, bounded = 0, cayley = -1") {
    auto phi = delta<C>(z, z.unit(0), {2, -1});
    CHECK(max_abs_diff(transform_D(phi, c, TransformKind::Resolvent), phi) < 1e-15);
    CHECK(transform_D(phi, c, TransformKind::Bounded).empty());
    CHECK(max_abs_diff(transform_D(phi, c, TransformKind::Cayley), C{-1, 0} * phi) < 1e-15);
  }
  SUBCASE("Cayley transform preserves the inner product") {
    for (int i = 0; i < 100; ++i) {
      auto phi = to_complex_element(detail::random_rational_element(z, rng, 4, 6));
      auto psi = to_complex_element(detail::random_rational_element(z, rng, 4, 6));
      auto lhs = inner_product_kernel(transform_D(phi, c, TransformKind::Cayley),
                                      transform_D(psi, c, TransformKind::Cayley), c);
      CHECK(max_abs_diff(lhs, inner_product_kernel(phi, psi, c)) < 1e-12);
    }
  }
  SUBCASE("b(D)^2 + r(D)^2 = identity") {
    for (int i = 0; i < 30; ++i) {
      auto phi = to_complex_element(detail::random_rational_element(z, rng, 4, 6));
      auto b2 = transform_D(transform_D(phi, c, TransformKind::Bounded), c,
                            TransformKind::Bounded);
      auto r2 = transform_D(transform_D(phi, c, TransformKind::Resolvent), c,
                            TransformKind::Resolvent);
      CHECK(max_abs_diff(b2 + r2, phi) < 1e-12);
    }
  }
  SUBCASE("resolvent_squared agrees with the double resolvent, exactly") {
    std::mt19937_64 rng2(27);
    auto phi = detail::random_rational_element(z, rng2, 6, 6);
    auto exact = resolvent_squared(phi, c);
    auto dbl = transform_D(transform_D(to_complex_element(phi), c, TransformKind::Resolvent),
                           c, TransformKind::Resolvent);
    CHECK(max_abs_diff(to_complex_element(exact), dbl) < 1e-12);
  }
}

TEST_CASE("cutoff approximants") {
  auto z = build_transformation_groupoid(1, {0});
  auto c = Cocycle::degree();
  std::mt19937_64 rng(28);
  SUBCASE("apply equality when the cutoff covers the reachable classes") {
    for (int i = 0; i < 20; ++i) {
      auto f = detail::random_rational_element(z, rng, 3, 3);
      auto psi = detail::random_rational_element(z, rng, 3, 3);
      auto k = cutoff_approximant(f, c, 12);
      CHECK(k.apply(psi) == convolve(f, resolvent_squared(psi, c)));
    }
  }
  SUBCASE("m = 0 with unit-supported f acts only on the c = 0 class") {
    auto f = delta<RC>(z, z.unit(0), RC{Rational(3)});
    auto psi = delta<RC>(z, Morphism::trans(0, 2)) + delta<RC>(z, z.unit(0));
    auto k = cutoff_approximant(f, c, 0);
    CHECK(k.apply(psi) == convolve(f, spectral_projection_rho(0, psi, c)));
  }
  SUBCASE("Cauchy bound from the resolvent tail") {
    for (int i = 0; i < 5; ++i) {
      auto f = detail::random_rational_element(z, rng, 4, 4);
      if (f.empty()) continue;
      double fI = norms(f, Window{4}).i_norm;
      for (std::int64_t m = 1; m < 10; ++m)
        for (std::int64_t n = m + 1; n <= 10; ++n) {
          auto diff = cutoff_approximant(f, c, n, 24) - cutoff_approximant(f, c, m, 24);
          CHECK(diff.i_norm() <= fI / (1.0 + static_cast<double>(m * m)) + 1e-12);
        }
    }
  }
}

TEST_CASE("spectral projections rho_k") {
  auto g = build_transformation_groupoid(2, {1, 0});
  auto c = Cocycle::degree();
  std::mt19937_64 rng(29);
  SUBCASE("kernel-supported elements are rho_0 eigenvectors") {
    AlgebraElement<RC> phi(g);
    phi.set(g.unit(0), RC{Rational(2)});
    phi.set(g.unit(1), RC{Rational(-1), Rational(3)});
    CHECK(spectral_projection_rho(0, phi, c) == phi);
    CHECK(spectral_projection_rho(2, phi, c).empty());
  }
  SUBCASE("64-point trapezoid quadrature of the defining integral") {
    const int N = 64;
    for (int i = 0; i < 20; ++i) {
      auto phi = to_complex_element(detail::random_rational_element(g, rng, 5, 6));
      for (long long k = -2; k <= 2; ++k) {
        AlgebraElement<C> quad(g);
        for (int j = 0; j < N; ++j) {
          double t = 2.0 * M_PI * j / N;
          auto term = evolve(phi, c, {t, 0});
          for (const auto& [m, v] : term.coef)
            quad.add(m, v * std::exp(C{0, -1} * (static_cast<double>(k) * t)) / double(N));
        }
        auto direct = spectral_projection_rho(k, phi, c);
        CHECK(max_abs_diff(quad, direct) < 1e-12);
      }
    }
  }
  SUBCASE("rho_k(u_t Phi) = e^{ikt} rho_k Phi") {
    std::uniform_real_distribution<double> tdist(-3, 3);
    for (int i = 0; i < 20; ++i) {
      auto phi = to_complex_element(detail::random_rational_element(g, rng, 5, 6));
      double t = tdist(rng);
      for (long long k = -2; k <= 2; ++k) {
        auto lhs = spectral_projection_rho(k, evolve(phi, c, {t, 0}), c);
        auto rhs = std::exp(C{0, 1} * (static_cast<double>(k) * t)) *
                   spectral_projection_rho(k, phi, c);
        CHECK(max_abs_diff(lhs, rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("ssa witness kernels") {
  auto g = build_transformation_groupoid(2, {1, 0});
  auto c = Cocycle::degree();
  std::mt19937_64 rng(30);
  SUBCASE("apply equality f_k(Psi) = f * (rho_k Psi)") {
    std::uniform_int_distribution<long long> kdist(-4, 4);
    for (int i = 0; i < 100; ++i) {
      auto f = detail::random_rational_element(g, rng, 4, 4);
      auto psi = detail::random_rational_element(g, rng, 4, 4);
      long long k = kdist(rng);
      CHECK(ssa_witness(f, k, c).apply(psi) ==
            convolve(f, spectral_projection_rho(k, psi, c)));
    }
  }
  SUBCASE("kernel-supported f with k = 0 acts as f on the fixed eigenspace") {
    AlgebraElement<RC> f(g);
    f.set(g.unit(0), RC{Rational(1, 2)});
    f.set(g.unit(1), RC{Rational(5)});
    auto psi = detail::random_rational_element(g, rng, 5, 4);
    auto rho0 = spectral_projection_rho(0, psi, c);
    CHECK(ssa_witness(f, 0, c).apply(rho0) == convolve(f, rho0));
  }
  SUBCASE("k beyond the enumeration window gives the zero kernel") {
    auto f = delta<RC>(g, Morphism::trans(0, 1));
    auto k = ssa_witness(f, 40, c, 8);
    CHECK(k.entries.empty());
  }
}

TEST_CASE("covariance of the module evolution") {
  auto g = build_transformation_groupoid(3, {1, 2, 0});
  auto c = Cocycle::degree();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> tdist(-3, 3);
  for (int i = 0; i < 100; ++i) {
    auto f = to_complex_element(detail::random_rational_element(g, rng, 4, 5));
    auto phi = to_complex_element(detail::random_rational_element(g, rng, 4, 5));
    double t = tdist(rng);
    auto lhs = evolve_module(convolve(f, evolve_module(phi, c, {-t, 0})), c, {t, 0});
    CHECK(max_abs_diff(lhs, convolve(evolve(f, c, {t, 0}), phi)) < 1e-12);
  }
}
