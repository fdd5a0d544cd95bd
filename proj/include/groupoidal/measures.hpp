#pragma once

#include "groupoidal/algebra.hpp"
#include "groupoidal/cocycle.hpp"
#include "groupoidal/measure.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace groupoidal {

/// Modular data of a quasi-invariant unit measure: with counting-measure Haar
/// systems the induced measure weights a morphism by mu(r(.)), its inverse by
/// mu(d(.)), so Delta(xi) = mu(r(xi)) / mu(d(xi)) exactly.
struct ModularData {
  const Groupoid* parent{nullptr};
  UnitMeasure mu;

  Rational delta(const Morphism& m) const {
    return mu(parent->range(m)) / mu(parent->source(m));
  }

  /// The Radon-Nikodym cocycle c_mu = ln Delta.
  Cocycle radon_nikodym_cocycle() const { return Cocycle::log_modular(mu); }
};

inline ModularData modular_function(const Groupoid& g, const UnitMeasure& mu) {
  if (static_cast<int>(mu.weights.size()) != g.n_units())
    throw std::invalid_argument("measure has wrong number of unit weights");
  return ModularData{&g, mu};
}

/// tau(f) = sum_x f(unit_x) mu(x); positive, and a trace on unimodular data.
template <typename S>
S tau_functional(const AlgebraElement<S>& f, const UnitMeasure& mu) {
  const Groupoid& g = *f.parent;
  S out{};
  for (int x = 0; x < g.n_units(); ++x) out += scalar_from_rational<S>(mu(x)) * f.at(g.unit(x));
  return out;
}

/// Pointwise multiplication by the modular function: Delta . g, i.e. the
/// analytic continuation u_{-i}(g) of the modular flow, computed exactly.
template <typename S>
AlgebraElement<S> modular_scale(const AlgebraElement<S>& f, const UnitMeasure& mu) {
  const Groupoid& g = *f.parent;
  ModularData md{&g, mu};
  AlgebraElement<S> out(g);
  for (const auto& [m, v] : f.coef) out.set(m, scalar_from_rational<S>(md.delta(m)) * v);
  return out;
}

struct CheckReport {
  bool ok{true};
  std::vector<std::string> failures;
  void fail(std::string w) {
    ok = false;
    failures.push_back(std::move(w));
  }
};

namespace detail {

inline AlgebraElement<RationalComplex> random_rational_element(
    const Groupoid& g, std::mt19937_64& rng, int n_terms, std::int64_t window,
    const Cocycle* restrict_to_kernel = nullptr) {
  auto all = g.all_morphisms(window);
  if (restrict_to_kernel) {
    std::vector<Morphism> ker;
    for (const auto& m : all)
      if (restrict_to_kernel->in_kernel(g, m)) ker.push_back(m);
    all = std::move(ker);
  }
  AlgebraElement<RationalComplex> f(g);
  if (all.empty()) return f;
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  std::uniform_int_distribution<long long> num(-5, 5), den(1, 4);
  for (int i = 0; i < n_terms; ++i)
    f.add(all[pick(rng)],
          RationalComplex{Rational(num(rng), den(rng)), Rational(num(rng), den(rng))});
  return f;
}

}  // namespace detail

/// Verifies tau(f*g) = tau(g*f) on random finitely supported elements of the
/// given (sub)groupoid; rejects up front, with a witness, unless Delta = 1 on
/// all sampled morphisms.
inline CheckReport check_trace_unimodular(const Groupoid& g, const UnitMeasure& mu,
                                          int sample_budget, unsigned seed = 99,
                                          const Cocycle* subgroupoid_of = nullptr,
                                          std::int64_t window = 8) {
  CheckReport rep;
  ModularData md{&g, mu};
  for (const auto& m : g.all_morphisms(window)) {
    if (subgroupoid_of && !subgroupoid_of->in_kernel(g, m)) continue;
    if (md.delta(m) != Rational(1)) {
      rep.fail("not unimodular: Delta != 1 at " + to_string(m));
      return rep;
    }
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < sample_budget; ++i) {
    auto f = detail::random_rational_element(g, rng, 4, window, subgroupoid_of);
    auto h = detail::random_rational_element(g, rng, 4, window, subgroupoid_of);
    if (tau_functional(convolve(f, h), mu) != tau_functional(convolve(h, f), mu)) {
      rep.fail("trace identity fails on sample " + std::to_string(i));
      return rep;
    }
  }
  return rep;
}

/// KMS condition at beta = -1 for the modular flow, in its exact boundary
/// form tau(f * Delta.g) = tau(g * f); for finitely supported elements the
/// interior function F is entire, so the boundary identity is the whole
/// condition. Also cross-checks F at sampled real times in floating point.
inline CheckReport check_kms(const Groupoid& g, const UnitMeasure& mu, int sample_budget,
                             unsigned seed = 4242, std::int64_t window = 8) {
  CheckReport rep;
  std::mt19937_64 rng(seed);
  Cocycle c_mu = Cocycle::log_modular(mu);
  std::uniform_real_distribution<double> tdist(-2.0, 2.0);
  for (int i = 0; i < sample_budget; ++i) {
    auto f = detail::random_rational_element(g, rng, 4, window);
    auto h = detail::random_rational_element(g, rng, 4, window);
    auto lhs = tau_functional(convolve(f, modular_scale(h, mu)), mu);
    auto rhs = tau_functional(convolve(h, f), mu);
    if (lhs != rhs) {
      rep.fail("KMS boundary identity fails on sample " + std::to_string(i));
      return rep;
    }
    // Interior continuation: F(t - i) = tau(u_t(h) * f) for F(z) = tau(f * u_z(h)).
    double t = tdist(rng);
    auto fc = to_complex_element(f), hc = to_complex_element(h);
    auto F_at = tau_functional(
        convolve(fc, evolve(hc, c_mu, std::complex<double>{t, -1.0})), mu);
    auto G_at = tau_functional(convolve(evolve(hc, c_mu, std::complex<double>{t, 0.0}), fc), mu);
    if (std::abs(to_complex(F_at) - to_complex(G_at)) > 1e-9)
      rep.fail("KMS strip continuation mismatch at t = " + std::to_string(t));
  }
  return rep;
}

}  // namespace groupoidal
