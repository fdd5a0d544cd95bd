#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace groupoidal {

using UnitId = int;

/// A morphism of one of the three discrete groupoid models.
///   Explicit:  a = morphism id in a finite table
///   Trans:     (x, n) in X x Z for a Z-action on X
///   Deaconu:   (x, n, y) in X x Z x X with sigma^{k+n}(x) = sigma^k(y)
struct Morphism {
  enum class Kind : std::uint8_t { Explicit, Trans, Deaconu };
  Kind kind{Kind::Explicit};
  std::int64_t a{0};
  std::int64_t n{0};
  std::int64_t b{0};

  static Morphism finite(std::int64_t id) { return {Kind::Explicit, id, 0, 0}; }
  static Morphism trans(UnitId x, std::int64_t deg) { return {Kind::Trans, x, deg, 0}; }
  static Morphism deaconu(UnitId x, std::int64_t deg, UnitId y) {
    return {Kind::Deaconu, x, deg, y};
  }

  friend auto operator<=>(const Morphism&, const Morphism&) = default;
};

inline std::string to_string(const Morphism& m) {
  switch (m.kind) {
    case Morphism::Kind::Explicit:
      return "#" + std::to_string(m.a);
    case Morphism::Kind::Trans:
      return "(" + std::to_string(m.a) + "," + std::to_string(m.n) + ")";
    default:
      return "(" + std::to_string(m.a) + "," + std::to_string(m.n) + "," +
             std::to_string(m.b) + ")";
  }
}

/// Finite groupoid given by an explicit composition table.
/// Morphism ids index into range/source/inverse; table holds the composites
/// of exactly the composable pairs.
struct FiniteGroupoidData {
  int n_units{0};
  std::vector<int> range;
  std::vector<int> source;
  std::vector<int> inverse;
  std::vector<int> unit_morph;  // unit_morph[x] = id of the identity at x
  std::map<std::pair<int, int>, int> table;
};

/// X x Z for a bijection acting on X.
struct TransformationData {
  std::vector<int> act;
  std::vector<int> act_inv;
};

/// Deaconu-Renault model for a partial map sigma on X.
struct DeaconuData {
  int n_units{0};
  std::vector<int> sigma;  // -1 where undefined
};

struct ValidationReport {
  std::vector<std::string> structural;  // malformed input, not axiom failures
  std::vector<std::string> violations;  // axiom failures with witnesses
  bool valid() const { return structural.empty() && violations.empty(); }
};

class Groupoid {
 public:
  explicit Groupoid(FiniteGroupoidData d) : model_(std::move(d)) {}
  explicit Groupoid(TransformationData d) : model_(std::move(d)) {}
  explicit Groupoid(DeaconuData d) : model_(std::move(d)) {}

  bool is_finite_explicit() const { return std::holds_alternative<FiniteGroupoidData>(model_); }
  bool is_transformation() const { return std::holds_alternative<TransformationData>(model_); }
  bool is_deaconu() const { return std::holds_alternative<DeaconuData>(model_); }

  const FiniteGroupoidData& finite_data() const { return std::get<FiniteGroupoidData>(model_); }

  int n_units() const {
    if (auto* f = std::get_if<FiniteGroupoidData>(&model_)) return f->n_units;
    if (auto* t = std::get_if<TransformationData>(&model_)) return static_cast<int>(t->act.size());
    return std::get<DeaconuData>(model_).n_units;
  }

  Morphism unit(UnitId x) const {
    check_unit(x);
    if (auto* f = std::get_if<FiniteGroupoidData>(&model_))
      return Morphism::finite(f->unit_morph[x]);
    if (is_transformation()) return Morphism::trans(x, 0);
    return Morphism::deaconu(x, 0, x);
  }

  bool is_unit(const Morphism& m) const {
    switch (m.kind) {
      case Morphism::Kind::Explicit: {
        const auto& f = finite_data();
        return m.a >= 0 && m.a < static_cast<std::int64_t>(f.range.size()) &&
               f.unit_morph[f.range[m.a]] == m.a;
      }
      case Morphism::Kind::Trans:
        return m.n == 0;
      default:
        return m.n == 0 && m.a == m.b;
    }
  }

  bool is_valid(const Morphism& m) const {
    switch (m.kind) {
      case Morphism::Kind::Explicit:
        return is_finite_explicit() && m.a >= 0 &&
               m.a < static_cast<std::int64_t>(finite_data().range.size());
      case Morphism::Kind::Trans:
        return is_transformation() && m.a >= 0 && m.a < n_units();
      default:
        return is_deaconu() && deaconu_valid(static_cast<int>(m.a), m.n, static_cast<int>(m.b));
    }
  }

  UnitId range(const Morphism& m) const {
    if (m.kind == Morphism::Kind::Explicit) return finite_data().range[check_id(m)];
    return static_cast<UnitId>(m.a);
  }

  UnitId source(const Morphism& m) const {
    switch (m.kind) {
      case Morphism::Kind::Explicit:
        return finite_data().source[check_id(m)];
      case Morphism::Kind::Trans:
        return act_pow(static_cast<int>(m.a), m.n);
      default:
        return static_cast<UnitId>(m.b);
    }
  }

  /// Composite ab when d(a) = r(b); nullopt otherwise (a normal outcome).
  std::optional<Morphism> compose(const Morphism& a, const Morphism& b) const {
    require_valid(a);
    require_valid(b);
    if (source(a) != range(b)) return std::nullopt;
    switch (a.kind) {
      case Morphism::Kind::Explicit: {
        const auto& f = finite_data();
        auto it = f.table.find({static_cast<int>(a.a), static_cast<int>(b.a)});
        if (it == f.table.end())
          throw std::runtime_error("composition table is missing a composable pair");
        return Morphism::finite(it->second);
      }
      case Morphism::Kind::Trans:
        return Morphism::trans(static_cast<UnitId>(a.a), a.n + b.n);
      default:
        return Morphism::deaconu(static_cast<UnitId>(a.a), a.n + b.n,
                                 static_cast<UnitId>(b.b));
    }
  }

  Morphism invert(const Morphism& m) const {
    require_valid(m);
    switch (m.kind) {
      case Morphism::Kind::Explicit:
        return Morphism::finite(finite_data().inverse[m.a]);
      case Morphism::Kind::Trans:
        return Morphism::trans(act_pow(static_cast<int>(m.a), m.n), -m.n);
      default:
        return Morphism::deaconu(static_cast<UnitId>(m.b), -m.n, static_cast<UnitId>(m.a));
    }
  }

  /// Degree coordinate used for windowed enumeration (0 on finite tables).
  std::int64_t degree(const Morphism& m) const {
    return m.kind == Morphism::Kind::Explicit ? 0 : m.n;
  }

  /// The d-fiber {xi : d(xi) = u}, restricted to |degree| <= window for the
  /// infinite-morphism models.
  std::vector<Morphism> fiber_source(UnitId u, std::int64_t window) const {
    check_unit(u);
    std::vector<Morphism> out;
    if (auto* f = std::get_if<FiniteGroupoidData>(&model_)) {
      for (int id = 0; id < static_cast<int>(f->source.size()); ++id)
        if (f->source[id] == u) out.push_back(Morphism::finite(id));
      return out;
    }
    if (is_transformation()) {
      // d(x, n) = act^n(x) = u  <=>  x = act^{-n}(u)
      for (std::int64_t n = -window; n <= window; ++n)
        out.push_back(Morphism::trans(act_pow(u, -n), n));
      return out;
    }
    for (std::int64_t n = -window; n <= window; ++n)
      for (int x = 0; x < n_units(); ++x)
        if (deaconu_valid(x, n, u)) out.push_back(Morphism::deaconu(x, n, u));
    return out;
  }

  std::vector<Morphism> all_morphisms(std::int64_t window) const {
    std::vector<Morphism> out;
    if (auto* f = std::get_if<FiniteGroupoidData>(&model_)) {
      for (int id = 0; id < static_cast<int>(f->range.size()); ++id)
        out.push_back(Morphism::finite(id));
      return out;
    }
    if (is_transformation()) {
      for (int x = 0; x < n_units(); ++x)
        for (std::int64_t n = -window; n <= window; ++n) out.push_back(Morphism::trans(x, n));
      return out;
    }
    for (std::int64_t n = -window; n <= window; ++n)
      for (int x = 0; x < n_units(); ++x)
        for (int y = 0; y < n_units(); ++y)
          if (deaconu_valid(x, n, y)) out.push_back(Morphism::deaconu(x, n, y));
    return out;
  }

  UnitId act_pow(UnitId x, std::int64_t n) const {
    const auto& t = std::get<TransformationData>(model_);
    const auto& step = n >= 0 ? t.act : t.act_inv;
    UnitId y = x;
    for (std::int64_t i = 0; i < std::abs(n); ++i) y = step[y];
    return y;
  }

  /// Deaconu validity: exists k >= max(0, -n) with sigma^{k+n}(x) = sigma^k(y),
  /// both defined. Orbits on a finite set are eventually periodic, so
  /// searching k <= 2|X| + |n| + 1 is conclusive.
  bool deaconu_valid(int x, std::int64_t n, int y) const {
    const auto& d = std::get<DeaconuData>(model_);
    if (x < 0 || x >= d.n_units || y < 0 || y >= d.n_units) return false;
    const std::int64_t bound = 2 * d.n_units + std::abs(n) + 1;
    for (std::int64_t k = std::max<std::int64_t>(0, -n); k <= bound; ++k) {
      auto xi = sigma_pow(x, k + n);
      auto yi = sigma_pow(y, k);
      if (xi && yi && *xi == *yi) return true;
    }
    return false;
  }

  std::optional<int> sigma_pow(int x, std::int64_t k) const {
    const auto& d = std::get<DeaconuData>(model_);
    int y = x;
    for (std::int64_t i = 0; i < k; ++i) {
      if (d.sigma[y] < 0) return std::nullopt;
      y = d.sigma[y];
    }
    return y;
  }

 private:
  void check_unit(UnitId x) const {
    if (x < 0 || x >= n_units()) throw std::out_of_range("unit id out of range");
  }
  std::int64_t check_id(const Morphism& m) const {
    if (!is_valid(m)) throw std::invalid_argument("invalid morphism encoding: " + to_string(m));
    return m.a;
  }
  void require_valid(const Morphism& m) const {
    if (!is_valid(m)) throw std::invalid_argument("invalid morphism encoding: " + to_string(m));
  }

  std::variant<FiniteGroupoidData, TransformationData, DeaconuData> model_;
};

inline Groupoid build_transformation_groupoid(int x_size, std::vector<int> act) {
  if (static_cast<int>(act.size()) != x_size)
    throw std::invalid_argument("act must have one entry per unit");
  std::vector<int> inv(x_size, -1);
  for (int x = 0; x < x_size; ++x) {
    if (act[x] < 0 || act[x] >= x_size || inv[act[x]] != -1)
      throw std::invalid_argument("act is not a bijection");
    inv[act[x]] = x;
  }
  return Groupoid(TransformationData{std::move(act), std::move(inv)});
}

inline Groupoid build_deaconu_groupoid(int x_size, const std::vector<int>& sigma) {
  if (static_cast<int>(sigma.size()) != x_size)
    throw std::invalid_argument("sigma must have one entry per unit (-1 where undefined)");
  for (int v : sigma)
    if (v < -1 || v >= x_size) throw std::invalid_argument("sigma image outside the unit range");
  return Groupoid(DeaconuData{x_size, sigma});
}

/// The pair groupoid on n units: morphisms (i, j), id = i*n + j.
inline Groupoid build_pair_groupoid(int n) {
  FiniteGroupoidData f;
  f.n_units = n;
  f.range.resize(n * n);
  f.source.resize(n * n);
  f.inverse.resize(n * n);
  f.unit_morph.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int id = i * n + j;
      f.range[id] = i;
      f.source[id] = j;
      f.inverse[id] = j * n + i;
      if (i == j) f.unit_morph[i] = id;
      for (int k = 0; k < n; ++k) f.table[{id, j * n + k}] = i * n + k;
    }
  return Groupoid(std::move(f));
}

/// Z/k as a groupoid with a single unit; morphism id = group element.
inline Groupoid build_cyclic_group_groupoid(int k) {
  FiniteGroupoidData f;
  f.n_units = 1;
  f.range.assign(k, 0);
  f.source.assign(k, 0);
  f.inverse.resize(k);
  f.unit_morph = {0};
  for (int i = 0; i < k; ++i) {
    f.inverse[i] = (k - i) % k;
    for (int j = 0; j < k; ++j) f.table[{i, j}] = (i + j) % k;
  }
  return Groupoid(std::move(f));
}

namespace detail {

inline void validate_finite(const FiniteGroupoidData& f, ValidationReport& rep) {
  const int m = static_cast<int>(f.range.size());
  if (static_cast<int>(f.source.size()) != m || static_cast<int>(f.inverse.size()) != m ||
      static_cast<int>(f.unit_morph.size()) != f.n_units) {
    rep.structural.push_back("inconsistent table sizes");
    return;
  }
  for (int i = 0; i < m; ++i) {
    if (f.range[i] < 0 || f.range[i] >= f.n_units || f.source[i] < 0 ||
        f.source[i] >= f.n_units)
      rep.structural.push_back("range/source index out of bounds at morphism " +
                               std::to_string(i));
    if (f.inverse[i] < 0 || f.inverse[i] >= m)
      rep.structural.push_back("inverse index out of bounds at morphism " + std::to_string(i));
  }
  for (int x = 0; x < f.n_units; ++x) {
    int u = f.unit_morph[x];
    if (u < 0 || u >= m || f.range[u] != x || f.source[u] != x)
      rep.structural.push_back("unit morphism of unit " + std::to_string(x) + " is malformed");
  }
  for (const auto& [pair, c] : f.table)
    if (pair.first < 0 || pair.first >= m || pair.second < 0 || pair.second >= m || c < 0 ||
        c >= m)
      rep.structural.push_back("composition table index out of bounds");
  if (!rep.structural.empty()) return;

  auto wit = [](int a, int b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
  };
  // Composability closure, range/source of composites.
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      auto it = f.table.find({a, b});
      if (f.source[a] == f.range[b]) {
        if (it == f.table.end()) {
          rep.violations.push_back("missing composite for composable pair " + wit(a, b));
          continue;
        }
        int c = it->second;
        if (f.range[c] != f.range[a])
          rep.violations.push_back("r(ab) != r(a) at " + wit(a, b));
        if (f.source[c] != f.source[b])
          rep.violations.push_back("d(ab) != d(b) at " + wit(a, b));
      } else if (it != f.table.end()) {
        rep.violations.push_back("composite defined for non-composable pair " + wit(a, b));
      }
    }
  // Units are identities.
  for (int a = 0; a < m; ++a) {
    auto l = f.table.find({f.unit_morph[f.range[a]], a});
    if (l == f.table.end() || l->second != a)
      rep.violations.push_back("unit at r(a) is not a left identity for a=" + std::to_string(a));
    auto r = f.table.find({a, f.unit_morph[f.source[a]]});
    if (r == f.table.end() || r->second != a)
      rep.violations.push_back("unit at d(a) is not a right identity for a=" + std::to_string(a));
  }
  // Inverses.
  for (int a = 0; a < m; ++a) {
    int ai = f.inverse[a];
    if (f.inverse[ai] != a)
      rep.violations.push_back("inverse is not involutive at a=" + std::to_string(a));
    if (f.range[ai] != f.source[a] || f.source[ai] != f.range[a]) {
      rep.violations.push_back("inverse swaps range/source incorrectly at a=" +
                               std::to_string(a));
      continue;
    }
    auto l = f.table.find({a, ai});
    if (l == f.table.end() || l->second != f.unit_morph[f.range[a]])
      rep.violations.push_back("a * a^{-1} != unit at r(a) for a=" + std::to_string(a));
    auto r = f.table.find({ai, a});
    if (r == f.table.end() || r->second != f.unit_morph[f.source[a]])
      rep.violations.push_back("a^{-1} * a != unit at d(a) for a=" + std::to_string(a));
  }
  // Associativity, all composable triples.
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (f.source[a] != f.range[b]) continue;
      auto ab = f.table.find({a, b});
      if (ab == f.table.end()) continue;
      for (int c = 0; c < m; ++c) {
        if (f.source[b] != f.range[c]) continue;
        auto bc = f.table.find({b, c});
        auto ab_c = f.table.find({ab->second, c});
        if (bc == f.table.end() || ab_c == f.table.end()) continue;
        auto a_bc = f.table.find({a, bc->second});
        if (a_bc == f.table.end() || a_bc->second != ab_c->second)
          rep.violations.push_back("associativity fails at (" + std::to_string(a) + "," +
                                   std::to_string(b) + "," + std::to_string(c) + ")");
      }
    }
}

}  // namespace detail

/// Exhaustive axiom check for explicit tables; randomized composable-triple
/// check (within a degree window) for the infinite-morphism models.
inline ValidationReport validate_axioms(const Groupoid& g, int sample_budget,
                                        unsigned seed = 12345) {
  ValidationReport rep;
  if (g.is_finite_explicit()) {
    detail::validate_finite(g.finite_data(), rep);
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> unit_dist(0, g.n_units() - 1);
  std::uniform_int_distribution<std::int64_t> deg_dist(-8, 8);
  auto random_from = [&](UnitId u) -> std::optional<Morphism> {
    auto fib = g.fiber_source(u, 8);  // morphisms with d = u
    if (fib.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, fib.size() - 1);
    return g.invert(fib[pick(rng)]);  // r = u
  };
  for (int i = 0; i < sample_budget; ++i) {
    UnitId u = unit_dist(rng);
    auto am = random_from(u);
    if (!am) continue;
    Morphism a = *am;
    auto bm = random_from(g.source(a));
    auto a_inv = g.invert(a);
    if (g.invert(a_inv) != a)
      rep.violations.push_back("double inverse fails at " + to_string(a));
    auto aai = g.compose(a, a_inv);
    if (!aai || *aai != g.unit(g.range(a)))
      rep.violations.push_back("a * a^{-1} != unit at " + to_string(a));
    if (!bm) continue;
    Morphism b = *bm;
    auto cm = random_from(g.source(b));
    if (!cm) continue;
    Morphism c = *cm;
    auto ab = g.compose(a, b);
    auto bc = g.compose(b, c);
    if (!ab || !bc) {
      rep.violations.push_back("composable pair rejected near " + to_string(a));
      continue;
    }
    if (g.range(*ab) != g.range(a) || g.source(*ab) != g.source(b))
      rep.violations.push_back("r/d of composite wrong at " + to_string(a) + to_string(b));
    if (!g.is_valid(*ab))
      rep.violations.push_back("composite invalid at " + to_string(a) + to_string(b));
    auto l = g.compose(*ab, c);
    auto r = g.compose(a, *bc);
    if (!l || !r || *l != *r)
      rep.violations.push_back("associativity fails at " + to_string(a) + to_string(b) +
                               to_string(c));
    if (auto idb = g.compose(g.unit(g.range(a)), a); !idb || *idb != a)
      rep.violations.push_back("left identity fails at " + to_string(a));
    (void)deg_dist;
  }
  return rep;
}

}  // namespace groupoidal
