#pragma once

#include "groupoidal/algebra.hpp"
#include "groupoidal/cocycle.hpp"
#include "groupoidal/norms.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace groupoidal {

// The (C*(G), C*(H))-bimodule on C_c(G), for H = ker c. Module elements share
// the AlgebraElement representation; the kernel enters through the cocycle.

/// Left action of C_c(G): plain convolution (the bibundle is G itself).
template <typename S>
AlgebraElement<S> act_left(const AlgebraElement<S>& g, const AlgebraElement<S>& phi) {
  return convolve(g, phi);
}

/// Right action of C_c(H); h must be supported in ker c.
template <typename S>
AlgebraElement<S> act_right(const AlgebraElement<S>& phi, const AlgebraElement<S>& h,
                            const Cocycle& c) {
  for (const auto& [m, v] : h.coef)
    if (!c.in_kernel(*h.parent, m))
      throw std::invalid_argument("right-action element supported outside ker c");
  return convolve(phi, h);
}

/// C_c(H)-valued inner product
///   <Phi,Psi>_H(chi) = sum_{eta : d(eta) = r(chi)} conj(Phi(eta)) Psi(eta chi).
/// This is the paper formula after substituting eta = xi^{-1} z; the choice of
/// z drops out.
template <typename S>
AlgebraElement<S> inner_product_kernel(const AlgebraElement<S>& phi,
                                       const AlgebraElement<S>& psi, const Cocycle& c) {
  detail::require_same_parent(phi, psi);
  const Groupoid& g = *phi.parent;
  AlgebraElement<S> out(g);
  for (const auto& [eta, pv] : phi.coef)
    for (const auto& [zeta, qv] : psi.coef) {
      if (g.range(eta) != g.range(zeta)) continue;
      auto chi = g.compose(g.invert(eta), zeta);
      if (chi && c.in_kernel(g, *chi)) out.add(*chi, conj_val(pv) * qv);
    }
  return out;
}

/// C_c(G)-valued inner product, defined when the right H-action is transitive
/// on the r-fibers; for real cocycles this forces c = 0 on the reachable
/// morphisms, which is what we check.
template <typename S>
AlgebraElement<S> inner_product_parent(const AlgebraElement<S>& phi,
                                       const AlgebraElement<S>& psi, const Cocycle& c,
                                       std::int64_t window = 8) {
  detail::require_same_parent(phi, psi);
  const Groupoid& g = *phi.parent;
  if (!c.is_trivial(g, window))
    throw std::invalid_argument(
        "kernel action is not transitive; the C_c(G)-valued inner product is undefined");
  AlgebraElement<S> out(g);
  // Oriented so that <Phi,Psi>_G . Theta = Phi . <Psi,Theta>_H: the product
  // collapses to Phi * Psi^* when H = G.
  for (const auto& [w, pv] : phi.coef)
    for (const auto& [zeta, qv] : psi.coef) {
      if (g.source(w) != g.source(zeta)) continue;
      auto eta = g.compose(w, g.invert(zeta));
      if (eta) out.add(*eta, pv * conj_val(qv));
    }
  return out;
}

/// The diagonal operator (D Phi)(xi) = c(xi) Phi(xi). Exact on rational
/// elements when the cocycle takes rational values.
template <typename S>
AlgebraElement<S> apply_D(const AlgebraElement<S>& phi, const Cocycle& c) {
  const Groupoid& g = *phi.parent;
  AlgebraElement<S> out(g);
  for (const auto& [m, v] : phi.coef) {
    if constexpr (std::is_same_v<S, RationalComplex>) {
      auto q = c.rational_value(g, m);
      if (!q) throw std::invalid_argument("exact D needs rational cocycle values");
      out.set(m, RationalComplex{*q} * v);
    } else {
      out.set(m, c.value(g, m) * v);
    }
  }
  return out;
}

/// (1 + D^2)^{-1}, the square of the resolvent; exact on rational data.
template <typename S>
AlgebraElement<S> resolvent_squared(const AlgebraElement<S>& phi, const Cocycle& c) {
  const Groupoid& g = *phi.parent;
  AlgebraElement<S> out(g);
  for (const auto& [m, v] : phi.coef) {
    if constexpr (std::is_same_v<S, RationalComplex>) {
      auto q = c.rational_value(g, m);
      if (!q) throw std::invalid_argument("exact resolvent needs rational cocycle values");
      out.set(m, RationalComplex{Rational(1) / (1 + *q * *q)} * v);
    } else {
      double t = c.value(g, m);
      out.set(m, v / (1.0 + t * t));
    }
  }
  return out;
}

enum class TransformKind { Resolvent, Bounded, Cayley };

/// Pointwise transforms of D: resolvent (1+c^2)^{-1/2}, bounded transform
/// c(1+c^2)^{-1/2}, and the Cayley transform (c-i)/(c+i). The Cayley
/// transform preserves <.,.>_H, witnessing selfadjointness of D.
inline AlgebraElement<std::complex<double>> transform_D(
    const AlgebraElement<std::complex<double>>& phi, const Cocycle& c, TransformKind kind) {
  const Groupoid& g = *phi.parent;
  const std::complex<double> i{0.0, 1.0};
  AlgebraElement<std::complex<double>> out(g);
  for (const auto& [m, v] : phi.coef) {
    double t = c.value(g, m);
    switch (kind) {
      case TransformKind::Resolvent:
        out.set(m, v / std::sqrt(1.0 + t * t));
        break;
      case TransformKind::Bounded:
        out.set(m, v * t / std::sqrt(1.0 + t * t));
        break;
      case TransformKind::Cayley:
        out.set(m, v * (t - i) / (t + i));
        break;
    }
  }
  return out;
}

/// Restriction to the c = k spectral subspace; realizes the projection
/// rho_k = (1/2pi) int e^{-ikt} u_t dt exactly for integral cocycles.
template <typename S>
AlgebraElement<S> spectral_projection_rho(long long k, const AlgebraElement<S>& phi,
                                          const Cocycle& c) {
  const Groupoid& g = *phi.parent;
  AlgebraElement<S> out(g);
  for (const auto& [m, v] : phi.coef) {
    auto n = c.integer_value(g, m);
    if (!n) throw std::invalid_argument("spectral projection needs an integral cocycle");
    if (*n == k) out.set(m, v);
  }
  return out;
}

/// Restriction to c >= 0; the positive spectral projection of D used by the
/// odd index pairing.
template <typename S>
AlgebraElement<S> positive_spectral_projection(const Cocycle& c, const AlgebraElement<S>& phi) {
  const Groupoid& g = *phi.parent;
  AlgebraElement<S> out(g);
  for (const auto& [m, v] : phi.coef)
    if (c.value(g, m) >= 0.0) out.set(m, v);
  return out;
}

/// A finitely supported kernel on the crossed product G x (G/H), acting on
/// module elements through
///   (k Psi)(eta) = sum_xi k(xi, [xi^{-1} eta]) Psi(xi^{-1} eta),
/// with classes [.] stored as (unit, cocycle value) pairs.
template <typename S>
struct PairKernel {
  using Class = std::pair<UnitId, Rational>;
  const Groupoid* parent{nullptr};
  Cocycle c;
  std::map<std::pair<Morphism, Class>, S> entries;

  AlgebraElement<S> apply(const AlgebraElement<S>& psi) const {
    const Groupoid& g = *parent;
    AlgebraElement<S> out(g);
    for (const auto& [key, kv] : entries) {
      const auto& [xi, cls] = key;
      for (const auto& [zeta, pv] : psi.coef) {
        if (g.range(zeta) != cls.first) continue;
        auto q = c.rational_value(g, zeta);
        if (!q || *q != cls.second) continue;
        if (auto eta = g.compose(xi, zeta)) out.add(*eta, kv * pv);
      }
    }
    return out;
  }

  /// I-norm of the kernel for the inherited Haar system: the nu-norm sums
  /// over the fiber of the class of xi.eta, the inverse norm over [eta].
  double i_norm() const {
    const Groupoid& g = *parent;
    std::map<Class, double> by_target, by_base;
    for (const auto& [key, kv] : entries) {
      const auto& [xi, cls] = key;
      auto q = c.rational_value(g, xi);
      Class target{g.range(xi), (q ? *q : Rational(0)) + cls.second};
      by_target[target] += abs_val(kv);
      by_base[cls] += abs_val(kv);
    }
    double nu = 0, nu_inv = 0;
    for (const auto& [cls, s] : by_target) nu = std::max(nu, s);
    for (const auto& [cls, s] : by_base) nu_inv = std::max(nu_inv, s);
    return std::max(nu, nu_inv);
  }

  friend PairKernel operator-(const PairKernel& a, const PairKernel& b) {
    PairKernel out = a;
    for (const auto& [key, v] : b.entries) {
      auto [it, inserted] = out.entries.try_emplace(key, S{} - v);
      if (!inserted) {
        it->second -= v;
        if (is_zero(it->second)) out.entries.erase(it);
      }
    }
    return out;
  }
};

namespace detail {
/// The classes (u, t) realized by morphisms with range u, found within an
/// enumeration window.
inline std::set<std::pair<UnitId, Rational>> realized_classes(const Groupoid& g,
                                                              const Cocycle& c, UnitId u,
                                                              std::int64_t window) {
  std::set<std::pair<UnitId, Rational>> out;
  for (const auto& m : g.fiber_source(u, window)) {
    auto inv = g.invert(m);  // range(inv) = u
    auto q = c.rational_value(g, inv);
    if (q) out.insert({u, *q});
  }
  // fiber_source(u) lists d-fibers; ranges of their inverses cover r^{-1}(u).
  return out;
}
}  // namespace detail

/// The cutoff approximant k_f^m of f(1+D^2)^{-1}: the kernel
/// (1+c(eta)^2)^{-1} f(xi) sharply cut off at |c(eta)| <= m. Sharp indicator
/// cutoffs are continuous on the discrete class space, which makes the Cauchy
/// estimate |k_f^n - k_f^m|_I <= |f|_I / (1+m^2) exact.
template <typename S>
PairKernel<S> cutoff_approximant(const AlgebraElement<S>& f, const Cocycle& c, std::int64_t m,
                                 std::int64_t enumeration_window = -1) {
  const Groupoid& g = *f.parent;
  if (m < 0) throw std::invalid_argument("cutoff level must be nonnegative");
  if (enumeration_window < 0) enumeration_window = m + detail::degree_spread(f) + 8;
  PairKernel<S> k{&g, c, {}};
  for (const auto& [xi, fv] : f.coef) {
    auto q = c.rational_value(g, xi);
    if (!q) throw std::invalid_argument("cutoff approximant needs rational cocycle values");
    for (const auto& cls : detail::realized_classes(g, c, g.source(xi), enumeration_window)) {
      if (boost::abs(cls.second) > Rational(m)) continue;
      Rational weight = Rational(1) / (1 + cls.second * cls.second);
      k.entries[{xi, cls}] = scalar_from_rational<S>(weight) * fv;
    }
  }
  return k;
}

/// The SSA certificate of an integral cocycle: the kernel
/// f_k(xi, [eta]) = f(xi) 1_{c(eta) = k}, whose action equals
/// Psi |-> f * (rho_k Psi).
template <typename S>
PairKernel<S> ssa_witness(const AlgebraElement<S>& f, long long k, const Cocycle& c,
                          std::int64_t enumeration_window = -1) {
  const Groupoid& g = *f.parent;
  if (!c.is_integral(g)) throw std::invalid_argument("ssa witness needs an integral cocycle");
  if (enumeration_window < 0)
    enumeration_window = std::abs(k) + detail::degree_spread(f) + 8;
  PairKernel<S> kernel{&g, c, {}};
  for (const auto& [xi, fv] : f.coef) {
    auto classes = detail::realized_classes(g, c, g.source(xi), enumeration_window);
    if (classes.count({g.source(xi), Rational(k)}))
      kernel.entries[{xi, {g.source(xi), Rational(k)}}] = fv;
  }
  return kernel;
}

/// U_t on module elements (same formula as the algebra automorphism).
inline AlgebraElement<std::complex<double>> evolve_module(
    const AlgebraElement<std::complex<double>>& phi, const Cocycle& c, std::complex<double> z) {
  return evolve(phi, c, z);
}

}  // namespace groupoidal
