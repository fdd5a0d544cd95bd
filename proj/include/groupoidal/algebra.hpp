#pragma once

#include "groupoidal/groupoid.hpp"
#include "groupoidal/scalar.hpp"

#include <map>
#include <stdexcept>

namespace groupoidal {

/// A finitely supported function on the morphisms of a groupoid, i.e. an
/// element of C_c(G). Stored entries are nonzero (canonical form).
/// The scalar S is either std::complex<double> or RationalComplex.
template <typename S>
struct AlgebraElement {
  const Groupoid* parent{nullptr};
  std::map<Morphism, S> coef;

  AlgebraElement() = default;
  explicit AlgebraElement(const Groupoid& g) : parent(&g) {}

  S at(const Morphism& m) const {
    auto it = coef.find(m);
    return it == coef.end() ? S{} : it->second;
  }

  void add(const Morphism& m, const S& v) {
    if (is_zero(v)) return;
    auto [it, inserted] = coef.try_emplace(m, v);
    if (!inserted) {
      it->second += v;
      if (is_zero(it->second)) coef.erase(it);
    }
  }

  void set(const Morphism& m, const S& v) {
    if (is_zero(v))
      coef.erase(m);
    else
      coef[m] = v;
  }

  bool empty() const { return coef.empty(); }

  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    return a.parent == b.parent && a.coef == b.coef;
  }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    AlgebraElement out = a;
    for (const auto& [m, v] : b.coef) out.add(m, v);
    return out;
  }

  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    AlgebraElement out = a;
    for (const auto& [m, v] : b.coef) out.add(m, S{} - v);
    return out;
  }

  friend AlgebraElement operator*(const S& s, const AlgebraElement& a) {
    AlgebraElement out(*a.parent);
    for (const auto& [m, v] : a.coef) out.add(m, s * v);
    return out;
  }
};

template <typename S>
AlgebraElement<S> delta(const Groupoid& g, const Morphism& m, S value = S{1}) {
  if (!g.is_valid(m)) throw std::invalid_argument("delta at invalid morphism");
  AlgebraElement<S> f(g);
  f.set(m, value);
  return f;
}

/// The identity of the convolution algebra: the sum of unit deltas
/// (the unit space is finite, so this is an honest element).
template <typename S>
AlgebraElement<S> identity_element(const Groupoid& g) {
  AlgebraElement<S> f(g);
  for (int x = 0; x < g.n_units(); ++x) f.set(g.unit(x), S{1});
  return f;
}

namespace detail {
template <typename S>
void require_same_parent(const AlgebraElement<S>& f, const AlgebraElement<S>& g) {
  if (f.parent == nullptr || f.parent != g.parent)
    throw std::invalid_argument("elements live over different groupoids");
}
}  // namespace detail

/// Convolution (f*g)(eta) = sum_{xi eta' = eta} f(xi) g(eta'). Computed by
/// iterating over supp f x supp g, so the result is finitely supported.
template <typename S>
AlgebraElement<S> convolve(const AlgebraElement<S>& f, const AlgebraElement<S>& g) {
  detail::require_same_parent(f, g);
  const Groupoid& gpd = *f.parent;
  AlgebraElement<S> out(gpd);
  for (const auto& [xi, fv] : f.coef)
    for (const auto& [zeta, gv] : g.coef)
      if (auto eta = gpd.compose(xi, zeta)) out.add(*eta, fv * gv);
  return out;
}

/// Involution f^*(xi) = conj(f(xi^{-1})).
template <typename S>
AlgebraElement<S> involute(const AlgebraElement<S>& f) {
  AlgebraElement<S> out(*f.parent);
  for (const auto& [xi, v] : f.coef) out.set(f.parent->invert(xi), conj_val(v));
  return out;
}

template <typename S>
AlgebraElement<std::complex<double>> to_complex_element(const AlgebraElement<S>& f) {
  AlgebraElement<std::complex<double>> out(*f.parent);
  for (const auto& [m, v] : f.coef) out.set(m, to_complex(v));
  return out;
}

inline double max_abs_diff(const AlgebraElement<std::complex<double>>& a,
                           const AlgebraElement<std::complex<double>>& b) {
  double d = 0;
  for (const auto& [m, v] : a.coef) d = std::max(d, std::abs(v - b.at(m)));
  for (const auto& [m, v] : b.coef) d = std::max(d, std::abs(v - a.at(m)));
  return d;
}

}  // namespace groupoidal
