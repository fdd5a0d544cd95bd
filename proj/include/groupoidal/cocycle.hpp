#pragma once

#include "groupoidal/algebra.hpp"
#include "groupoidal/groupoid.hpp"
#include "groupoidal/measure.hpp"
#include "groupoidal/scalar.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <variant>
#include <vector>

namespace groupoidal {

/// A real-valued 1-cocycle c: G -> R, c(xi eta) = c(xi) + c(eta).
///   Degree:     the n-coordinate of Trans/Deaconu morphisms (0 on tables)
///   Potential:  coboundary c(xi) = f(r(xi)) - f(d(xi)) for rational f
///   Table:      explicit rational values per morphism, finite groupoids only
///   LogModular: c = ln Delta for the modular function of a unit measure
/// Degree, Potential and Table take exact rational values; LogModular is
/// evaluated in floating point but exp(c) = Delta stays rational.
class Cocycle {
 public:
  struct Degree {};
  struct Potential {
    std::vector<Rational> f;
  };
  struct Table {
    std::map<Morphism, Rational> values;
  };
  struct LogModular {
    UnitMeasure mu;
  };

  static Cocycle degree() { return Cocycle(Degree{}); }
  static Cocycle potential(std::vector<Rational> f) { return Cocycle(Potential{std::move(f)}); }
  static Cocycle table(std::map<Morphism, Rational> values) {
    return Cocycle(Table{std::move(values)});
  }
  static Cocycle log_modular(UnitMeasure mu) { return Cocycle(LogModular{std::move(mu)}); }
  static Cocycle zero() { return Cocycle(Potential{{}}); }

  bool is_degree() const { return std::holds_alternative<Degree>(v_); }
  bool is_log_modular() const { return std::holds_alternative<LogModular>(v_); }
  const UnitMeasure& modular_measure() const { return std::get<LogModular>(v_).mu; }

  std::optional<Rational> rational_value(const Groupoid& g, const Morphism& m) const {
    if (std::holds_alternative<Degree>(v_)) return Rational(g.degree(m));
    if (auto* p = std::get_if<Potential>(&v_)) {
      auto f = [&](int u) { return u < static_cast<int>(p->f.size()) ? p->f[u] : Rational(0); };
      return f(g.range(m)) - f(g.source(m));
    }
    if (auto* t = std::get_if<Table>(&v_)) {
      auto it = t->values.find(m);
      return it == t->values.end() ? Rational(0) : it->second;
    }
    return std::nullopt;  // LogModular: ln of a rational
  }

  /// exp(c(m)) when it is exactly rational, i.e. the modular function.
  std::optional<Rational> exp_rational(const Groupoid& g, const Morphism& m) const {
    if (auto* lm = std::get_if<LogModular>(&v_))
      return lm->mu(g.range(m)) / lm->mu(g.source(m));
    return std::nullopt;
  }

  double value(const Groupoid& g, const Morphism& m) const {
    if (auto q = rational_value(g, m)) return to_double(*q);
    auto d = exp_rational(g, m);
    return std::log(to_double(*d));
  }

  std::optional<long long> integer_value(const Groupoid& g, const Morphism& m) const {
    auto q = rational_value(g, m);
    if (!q || q->denominator() != 1) return std::nullopt;
    return q->numerator();
  }

  /// True when the range of c is contained in Z, checked exactly for Degree
  /// and on a windowed enumeration otherwise.
  bool is_integral(const Groupoid& g, std::int64_t window = 16) const {
    if (std::holds_alternative<Degree>(v_)) return true;
    if (std::holds_alternative<LogModular>(v_)) return is_trivial(g, window);
    for (const auto& m : g.all_morphisms(window))
      if (!integer_value(g, m)) return false;
    return true;
  }

  bool is_trivial(const Groupoid& g, std::int64_t window = 16) const {
    for (const auto& m : g.all_morphisms(window)) {
      if (auto q = rational_value(g, m)) {
        if (q->numerator() != 0) return false;
      } else if (*exp_rational(g, m) != Rational(1)) {
        return false;
      }
    }
    return true;
  }

  /// Exact kernel membership where the values are rational; tolerance 1e-12
  /// otherwise.
  bool in_kernel(const Groupoid& g, const Morphism& m, double tol = 1e-12) const {
    if (auto q = rational_value(g, m)) return q->numerator() == 0;
    if (auto d = exp_rational(g, m)) return *d == Rational(1);
    return std::abs(value(g, m)) <= tol;
  }

 private:
  using Variant = std::variant<Degree, Potential, Table, LogModular>;
  explicit Cocycle(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Additivity check: exhaustive over composable pairs for explicit tables,
/// randomized within a degree window otherwise.
inline ValidationReport verify_cocycle(const Groupoid& g, const Cocycle& c, int sample_budget,
                                       unsigned seed = 777, std::int64_t window = 8) {
  ValidationReport rep;
  auto check_pair = [&](const Morphism& a, const Morphism& b) {
    auto ab = g.compose(a, b);
    if (!ab) return;
    auto qa = c.rational_value(g, a);
    if (qa) {
      auto sum = *qa + *c.rational_value(g, b);
      if (*c.rational_value(g, *ab) != sum)
        rep.violations.push_back("additivity fails at " + to_string(a) + ", " + to_string(b));
    } else if (std::abs(c.value(g, *ab) - c.value(g, a) - c.value(g, b)) > 1e-12) {
      rep.violations.push_back("additivity fails at " + to_string(a) + ", " + to_string(b));
    }
  };
  auto check_one = [&](const Morphism& a) {
    if (g.is_unit(a) && !c.in_kernel(g, a))
      rep.violations.push_back("c(unit) != 0 at " + to_string(a));
    auto qa = c.rational_value(g, a);
    if (qa) {
      if (*c.rational_value(g, g.invert(a)) != -*qa)
        rep.violations.push_back("c(a^{-1}) != -c(a) at " + to_string(a));
    } else if (std::abs(c.value(g, g.invert(a)) + c.value(g, a)) > 1e-12) {
      rep.violations.push_back("c(a^{-1}) != -c(a) at " + to_string(a));
    }
  };
  if (g.is_finite_explicit()) {
    auto all = g.all_morphisms(0);
    for (const auto& a : all) {
      check_one(a);
      for (const auto& b : all) check_pair(a, b);
    }
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> unit_dist(0, g.n_units() - 1);
  for (int i = 0; i < sample_budget; ++i) {
    auto fib = g.fiber_source(unit_dist(rng), window);
    if (fib.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, fib.size() - 1);
    Morphism b = g.invert(fib[pick(rng)]);
    auto fib2 = g.fiber_source(g.range(b), window);
    Morphism a = g.invert(fib2[std::uniform_int_distribution<std::size_t>(
        0, fib2.size() - 1)(rng)]);
    check_one(a);
    check_pair(a, b);
  }
  return rep;
}

struct NotCoboundary {
  std::vector<Morphism> cycle;  // morphisms whose cocycle sum around a loop is nonzero
};

/// Decides membership in B^1 for explicit finite groupoids: builds a potential
/// along a spanning forest of the orbit graph (one unit per component pinned
/// to 0) and checks the remaining morphisms against it.
inline std::variant<std::vector<Rational>, NotCoboundary> solve_coboundary(const Groupoid& g,
                                                                           const Cocycle& c) {
  if (!g.is_finite_explicit())
    throw std::invalid_argument("solve_coboundary needs an explicit finite groupoid");
  const int n = g.n_units();
  std::vector<std::optional<Rational>> f(n);
  std::vector<std::vector<Morphism>> path(n);  // tree path from the component root
  auto all = g.all_morphisms(0);
  for (int root = 0; root < n; ++root) {
    if (f[root]) continue;
    f[root] = Rational(0);
    std::vector<int> queue{root};
    while (!queue.empty()) {
      int u = queue.back();
      queue.pop_back();
      for (const auto& m : all) {
        // c(m) = f(r(m)) - f(d(m))
        int rr = g.range(m), dd = g.source(m);
        auto q = c.rational_value(g, m);
        if (!q) throw std::invalid_argument("solve_coboundary needs rational cocycle values");
        if (dd == u && !f[rr]) {
          f[rr] = *f[dd] + *q;
          path[rr] = path[dd];
          path[rr].push_back(m);
          queue.push_back(rr);
        } else if (rr == u && !f[dd]) {
          f[dd] = *f[rr] - *q;
          path[dd] = path[rr];
          path[dd].push_back(g.invert(m));
          queue.push_back(dd);
        }
      }
    }
  }
  for (const auto& m : all) {
    auto q = *c.rational_value(g, m);
    if (*f[g.range(m)] - *f[g.source(m)] != q) {
      // Witness loop: tree path to d(m), then m, then tree path back from r(m).
      NotCoboundary bad;
      bad.cycle = path[g.source(m)];
      bad.cycle.push_back(m);
      for (auto it = path[g.range(m)].rbegin(); it != path[g.range(m)].rend(); ++it)
        bad.cycle.push_back(g.invert(*it));
      return bad;
    }
  }
  std::vector<Rational> out(n);
  for (int u = 0; u < n; ++u) out[u] = *f[u];
  return out;
}

/// ker c with its membership predicate. In the discrete setting the counting
/// Haar system restricts, so regularity can only fail through numerically
/// ambiguous kernel membership; values in (1e-12, 1e-6) flag the cocycle
/// non-regular.
struct KernelGroupoid {
  const Groupoid* parent{nullptr};
  Cocycle c;
  bool regular{true};

  bool contains(const Morphism& m) const { return c.in_kernel(*parent, m); }

  std::vector<Morphism> enumerate(std::int64_t window) const {
    std::vector<Morphism> out;
    for (const auto& m : parent->all_morphisms(window))
      if (contains(m)) out.push_back(m);
    return out;
  }
};

inline KernelGroupoid kernel_subgroupoid(const Groupoid& g, const Cocycle& c,
                                         std::int64_t window = 16) {
  KernelGroupoid k{&g, c, true};
  for (const auto& m : g.all_morphisms(window)) {
    double v = std::abs(c.value(g, m));
    if (v > 1e-12 && v < 1e-6) {
      k.regular = false;
      break;
    }
  }
  return k;
}

/// G/ker c represented through the class map xi |-> (r(xi), c(xi)).
struct QuotientModel {
  using Class = std::pair<UnitId, Rational>;
  const Groupoid* parent{nullptr};
  Cocycle c;
  std::vector<Class> classes;  // over the windowed morphism set

  Class class_of(const Morphism& m) const {
    auto q = c.rational_value(*parent, m);
    if (!q) throw std::invalid_argument("class map needs rational cocycle values");
    return {parent->range(m), *q};
  }
};

inline QuotientModel quotient_by_kernel(const Groupoid& g, const Cocycle& c,
                                        std::int64_t window = 8) {
  QuotientModel q{&g, c, {}};
  std::set<QuotientModel::Class> seen;
  for (const auto& m : g.all_morphisms(window)) seen.insert(q.class_of(m));
  q.classes.assign(seen.begin(), seen.end());
  return q;
}

struct ExactnessReport {
  enum class Status { Exact, Indeterminate } status{Status::Exact};
  std::string reason;
  // Constructive witness: per class (u, value), the windowed preimage of the
  // class map.
  std::map<std::pair<UnitId, Rational>, std::vector<Morphism>> class_preimages;
};

/// Integral cocycles on discrete models are exact; the witness exhibits the
/// decomposition of the window into class preimages. For rational-valued
/// cocycles on finite groupoids, injectivity of the class map is checked
/// exhaustively.
inline ExactnessReport check_exactness(const Groupoid& g, const Cocycle& c,
                                       std::int64_t window = 8) {
  ExactnessReport rep;
  auto k = kernel_subgroupoid(g, c, window);
  if (!k.regular) {
    rep.status = ExactnessReport::Status::Indeterminate;
    rep.reason = "kernel membership is numerically ambiguous (non-regular cocycle)";
    return rep;
  }
  for (const auto& m : g.all_morphisms(window)) {
    auto q = c.rational_value(g, m);
    if (!q) {
      rep.status = ExactnessReport::Status::Indeterminate;
      rep.reason = "cocycle values are not rational; no constructive certificate";
      return rep;
    }
    rep.class_preimages[{g.range(m), *q}].push_back(m);
  }
  // The class map is injective on cosets: morphisms in one preimage differ by
  // a right kernel factor. Verified constructively below.
  for (const auto& [cls, pre] : rep.class_preimages)
    for (const auto& a : pre)
      for (const auto& b : pre) {
        auto chi = g.compose(g.invert(a), b);
        if (!chi || !k.contains(*chi)) {
          rep.status = ExactnessReport::Status::Indeterminate;
          rep.reason = "class preimage not a single coset at " + to_string(a);
          return rep;
        }
      }
  return rep;
}

/// The one-parameter automorphism group (u_z f)(xi) = e^{i z c(xi)} f(xi),
/// with complex z giving the analytic extension.
inline AlgebraElement<std::complex<double>> evolve(
    const AlgebraElement<std::complex<double>>& f, const Cocycle& c, std::complex<double> z) {
  AlgebraElement<std::complex<double>> out(*f.parent);
  const std::complex<double> i{0.0, 1.0};
  for (const auto& [m, v] : f.coef)
    out.set(m, std::exp(i * z * c.value(*f.parent, m)) * v);
  return out;
}

}  // namespace groupoidal
