#include "groupoidal/model.hpp"

#include "groupoidal/bimodule.hpp"
#include "groupoidal/index.hpp"
#include "groupoidal/measures.hpp"
#include "groupoidal/norms.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace groupoidal {

namespace {

using nlohmann::json;

constexpr const char* kArtifactVersion = "0.1.0";

// ---------------------------------------------------------------------------
// parsing

struct Parser {
  std::vector<std::string> errs;

  void err(const std::string& path, const std::string& msg) {
    errs.push_back(path + ": " + msg);
  }

  std::optional<Rational> rational(const json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
      long long den = j[1].get<long long>();
      if (den == 0) {
        err(path, "zero denominator");
        return std::nullopt;
      }
      return Rational(j[0].get<long long>(), den);
    }
    err(path, "expected an integer or a [num, den] pair");
    return std::nullopt;
  }

  /// A scalar entry: rational (integer or [num, den]) or a JSON float. The
  /// second member records the exact form when there is one.
  std::optional<std::pair<double, std::optional<Rational>>> scalar(const json& j,
                                                                   const std::string& path) {
    if (j.is_number_float()) return {{j.get<double>(), std::nullopt}};
    auto q = rational(j, path);
    if (!q) return std::nullopt;
    return {{to_double(*q), *q}};
  }

  std::optional<long long> integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
      err(path, "expected an integer");
      return std::nullopt;
    }
    return j.get<long long>();
  }

  std::optional<std::vector<int>> int_array(const json& j, const std::string& path) {
    if (!j.is_array()) {
      err(path, "expected an array of integers");
      return std::nullopt;
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto v = integer(j[i], path + "[" + std::to_string(i) + "]");
      if (!v) return std::nullopt;
      out.push_back(static_cast<int>(*v));
    }
    return out;
  }

  std::optional<Morphism> morphism(const json& j, const Groupoid& g, const std::string& path) {
    Morphism m;
    if (g.is_finite_explicit()) {
      auto id = integer(j, path);
      if (!id) return std::nullopt;
      m = Morphism::finite(*id);
    } else if (g.is_transformation()) {
      if (!j.is_array() || j.size() != 2) {
        err(path, "expected a [unit, degree] pair");
        return std::nullopt;
      }
      auto x = integer(j[0], path), n = integer(j[1], path);
      if (!x || !n) return std::nullopt;
      m = Morphism::trans(static_cast<UnitId>(*x), *n);
    } else {
      if (!j.is_array() || j.size() != 3) {
        err(path, "expected a [unit, degree, unit] triple");
        return std::nullopt;
      }
      auto x = integer(j[0], path), n = integer(j[1], path), y = integer(j[2], path);
      if (!x || !n || !y) return std::nullopt;
      m = Morphism::deaconu(static_cast<UnitId>(*x), *n, static_cast<UnitId>(*y));
    }
    if (!g.is_valid(m)) {
      err(path, "not a morphism of the declared groupoid: " + to_string(m));
      return std::nullopt;
    }
    return m;
  }

  std::unique_ptr<Groupoid> groupoid(const json& j, json& canon) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
      err("groupoid.kind", "missing or non-string groupoid kind");
      return nullptr;
    }
    const std::string kind = j["kind"].get<std::string>();
    canon["kind"] = kind;
    if (kind == "transformation") {
      auto size = integer(j.value("size", json()), "groupoid.size");
      auto act = int_array(j.value("act", json()), "groupoid.act");
      if (!size || !act) return nullptr;
      try {
        auto g = std::make_unique<Groupoid>(
            build_transformation_groupoid(static_cast<int>(*size), *act));
        canon["size"] = *size;
        canon["act"] = *act;
        return g;
      } catch (const std::exception& e) {
        err("groupoid.act", e.what());
        return nullptr;
      }
    }
    if (kind == "deaconu") {
      auto size = integer(j.value("size", json()), "groupoid.size");
      auto sigma = int_array(j.value("sigma", json()), "groupoid.sigma");
      if (!size || !sigma) return nullptr;
      try {
        auto g =
            std::make_unique<Groupoid>(build_deaconu_groupoid(static_cast<int>(*size), *sigma));
        canon["size"] = *size;
        canon["sigma"] = *sigma;
        return g;
      } catch (const std::exception& e) {
        err("groupoid.sigma", e.what());
        return nullptr;
      }
    }
    if (kind == "pair") {
      auto size = integer(j.value("size", json()), "groupoid.size");
      if (!size) return nullptr;
      if (*size <= 0) {
        err("groupoid.size", "size must be positive");
        return nullptr;
      }
      canon["size"] = *size;
      return std::make_unique<Groupoid>(build_pair_groupoid(static_cast<int>(*size)));
    }
    if (kind == "cyclic") {
      auto order = integer(j.value("order", json()), "groupoid.order");
      if (!order) return nullptr;
      if (*order <= 0) {
        err("groupoid.order", "order must be positive");
        return nullptr;
      }
      canon["order"] = *order;
      return std::make_unique<Groupoid>(build_cyclic_group_groupoid(static_cast<int>(*order)));
    }
    if (kind == "finite") {
      FiniteGroupoidData f;
      auto n = integer(j.value("units", json()), "groupoid.units");
      auto range = int_array(j.value("range", json()), "groupoid.range");
      auto source = int_array(j.value("source", json()), "groupoid.source");
      auto inverse = int_array(j.value("inverse", json()), "groupoid.inverse");
      auto identities = int_array(j.value("identities", json()), "groupoid.identities");
      if (!n || !range || !source || !inverse || !identities) return nullptr;
      f.n_units = static_cast<int>(*n);
      f.range = *range;
      f.source = *source;
      f.inverse = *inverse;
      f.unit_morph = *identities;
      const json& table = j.value("table", json());
      if (!table.is_array()) {
        err("groupoid.table", "expected an array of [a, b, ab] triples");
        return nullptr;
      }
      json ctable = json::array();
      for (std::size_t i = 0; i < table.size(); ++i) {
        auto row = int_array(table[i], "groupoid.table[" + std::to_string(i) + "]");
        if (!row || row->size() != 3) {
          err("groupoid.table[" + std::to_string(i) + "]", "expected a [a, b, ab] triple");
          return nullptr;
        }
        f.table[{(*row)[0], (*row)[1]}] = (*row)[2];
      }
      auto g = std::make_unique<Groupoid>(std::move(f));
      ValidationReport structural;
      detail::validate_finite(g->finite_data(), structural);
      for (const auto& s : structural.structural) err("groupoid", s);
      if (!structural.structural.empty()) return nullptr;
      // Canonical table order: sorted by (a, b), which the map already gives.
      for (const auto& [key, c] : g->finite_data().table)
        ctable.push_back(json::array({key.first, key.second, c}));
      canon["units"] = f.n_units = g->finite_data().n_units;
      canon["range"] = g->finite_data().range;
      canon["source"] = g->finite_data().source;
      canon["inverse"] = g->finite_data().inverse;
      canon["identities"] = g->finite_data().unit_morph;
      canon["table"] = ctable;
      return g;
    }
    err("groupoid.kind", "unknown groupoid kind \"" + kind + "\"");
    return nullptr;
  }
};

json rational_to_json(const Rational& q) {
  if (q.denominator() == 1) return json(q.numerator());
  return json::array({q.numerator(), q.denominator()});
}

json morphism_to_json(const Groupoid& g, const Morphism& m) {
  if (g.is_finite_explicit()) return json(m.a);
  if (g.is_transformation()) return json::array({m.a, m.n});
  return json::array({m.a, m.n, m.b});
}

const std::vector<std::string> kSuiteNames = {"axioms",   "algebra", "cocycle", "bimodule",
                                              "kms",      "index",   "all"};

}  // namespace

std::string digest_bytes(const std::string& bytes) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModelDocument parse_model(const std::string& bytes) {
  json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded()) throw SchemaError({"$: not valid JSON"});
  if (!j.is_object()) throw SchemaError({"$: expected a JSON object"});
  Parser p;
  ModelDocument doc;
  doc.digest = digest_bytes(bytes);
  json canon = json::object();

  if (!j.contains("groupoid")) {
    p.err("groupoid", "missing");
    throw SchemaError(std::move(p.errs));
  }
  canon["groupoid"] = json::object();
  doc.groupoid = p.groupoid(j["groupoid"], canon["groupoid"]);
  if (!doc.groupoid) throw SchemaError(std::move(p.errs));
  const Groupoid& g = *doc.groupoid;

  if (j.contains("measure")) {
    const json& mj = j["measure"];
    if (!mj.is_array() || static_cast<int>(mj.size()) != g.n_units()) {
      p.err("measure", "expected one weight per unit");
    } else {
      std::vector<Rational> w;
      bool ok = true;
      for (std::size_t i = 0; i < mj.size(); ++i) {
        auto q = p.rational(mj[i], "measure[" + std::to_string(i) + "]");
        if (!q) {
          ok = false;
        } else if (*q <= 0) {
          p.err("measure[" + std::to_string(i) + "]", "weights must be strictly positive");
          ok = false;
        } else {
          w.push_back(*q);
        }
      }
      if (ok) {
        doc.measure = UnitMeasure(std::move(w));
        json cm = json::array();
        for (const auto& q : doc.measure->weights) cm.push_back(rational_to_json(q));
        canon["measure"] = cm;
      }
    }
  }

  {
    json cj = j.value("cocycle", json{{"kind", "degree"}});
    json cc = json::object();
    std::string kind = "degree";
    if (!cj.is_object() || !cj.contains("kind") || !cj["kind"].is_string())
      p.err("cocycle.kind", "missing or non-string cocycle kind");
    else
      kind = cj["kind"].get<std::string>();
    cc["kind"] = kind;
    if (kind == "degree") {
      doc.cocycle = Cocycle::degree();
    } else if (kind == "zero") {
      doc.cocycle = Cocycle::zero();
    } else if (kind == "potential") {
      const json& fj = cj.value("f", json());
      if (!fj.is_array() || static_cast<int>(fj.size()) != g.n_units()) {
        p.err("cocycle.f", "expected one potential value per unit");
      } else {
        std::vector<Rational> f;
        json cf = json::array();
        bool ok = true;
        for (std::size_t i = 0; i < fj.size(); ++i) {
          auto q = p.rational(fj[i], "cocycle.f[" + std::to_string(i) + "]");
          if (!q) {
            ok = false;
            continue;
          }
          f.push_back(*q);
          cf.push_back(rational_to_json(*q));
        }
        if (ok) {
          doc.cocycle = Cocycle::potential(std::move(f));
          cc["f"] = cf;
        }
      }
    } else if (kind == "table") {
      if (!g.is_finite_explicit()) {
        p.err("cocycle", "table cocycles need an explicit finite groupoid");
      } else {
        const json& vj = cj.value("values", json());
        if (!vj.is_array()) {
          p.err("cocycle.values", "expected an array of [morphism, value] pairs");
        } else {
          std::map<Morphism, Rational> values;
          bool ok = true;
          for (std::size_t i = 0; i < vj.size(); ++i) {
            std::string path = "cocycle.values[" + std::to_string(i) + "]";
            if (!vj[i].is_array() || vj[i].size() != 2) {
              p.err(path, "expected a [morphism, value] pair");
              ok = false;
              continue;
            }
            auto m = p.morphism(vj[i][0], g, path);
            auto q = p.rational(vj[i][1], path);
            if (!m || !q) {
              ok = false;
              continue;
            }
            values[*m] = *q;
          }
          if (ok) {
            json cv = json::array();
            for (const auto& [m, q] : values)
              if (q.numerator() != 0) cv.push_back(json::array({morphism_to_json(g, m), rational_to_json(q)}));
            cc["values"] = cv;
            doc.cocycle = Cocycle::table(std::move(values));
          }
        }
      }
    } else if (kind == "log_modular") {
      if (!doc.measure)
        p.err("cocycle", "log_modular needs a measure field");
      else
        doc.cocycle = Cocycle::log_modular(*doc.measure);
    } else {
      p.err("cocycle.kind", "unknown cocycle kind \"" + kind + "\"");
    }
    canon["cocycle"] = cc;
  }

  if (j.contains("elements")) {
    const json& ej = j["elements"];
    if (!ej.is_object()) {
      p.err("elements", "expected an object of named elements");
    } else {
      json ce = json::object();
      for (const auto& [name, entries] : ej.items()) {
        std::string base = "elements." + name;
        if (!entries.is_array()) {
          p.err(base, "expected an array of [morphism, re, im] entries");
          continue;
        }
        NamedElement el;
        el.value = AlgebraElement<std::complex<double>>(g);
        AlgebraElement<RationalComplex> exact(g);
        bool all_rational = true, ok = true;
        for (std::size_t i = 0; i < entries.size(); ++i) {
          std::string path = base + "[" + std::to_string(i) + "]";
          if (!entries[i].is_array() || entries[i].size() != 3) {
            p.err(path, "expected a [morphism, re, im] entry");
            ok = false;
            continue;
          }
          auto m = p.morphism(entries[i][0], g, path);
          auto re = p.scalar(entries[i][1], path + ".re");
          auto im = p.scalar(entries[i][2], path + ".im");
          if (!m || !re || !im) {
            ok = false;
            continue;
          }
          el.value.add(*m, {re->first, im->first});
          if (re->second && im->second)
            exact.add(*m, RationalComplex{*re->second, *im->second});
          else
            all_rational = false;
        }
        if (!ok) continue;
        if (all_rational) el.exact = std::move(exact);
        json centries = json::array();
        if (el.exact) {
          for (const auto& [m, v] : el.exact->coef)
            centries.push_back(json::array(
                {morphism_to_json(g, m), rational_to_json(v.re), rational_to_json(v.im)}));
        } else {
          for (const auto& [m, v] : el.value.coef)
            centries.push_back(json::array({morphism_to_json(g, m), v.real(), v.imag()}));
        }
        ce[name] = centries;
        doc.elements.emplace(name, std::move(el));
      }
      if (!ce.empty()) canon["elements"] = ce;
    }
  }

  if (j.contains("unitaries")) {
    const json& uj = j["unitaries"];
    if (!uj.is_array()) {
      p.err("unitaries", "expected an array of element names");
    } else {
      for (std::size_t i = 0; i < uj.size(); ++i) {
        if (!uj[i].is_string()) {
          p.err("unitaries[" + std::to_string(i) + "]", "expected an element name");
          continue;
        }
        std::string name = uj[i].get<std::string>();
        if (!doc.elements.count(name))
          p.err("unitaries[" + std::to_string(i) + "]", "undefined element \"" + name + "\"");
        else
          doc.unitaries.push_back(name);
      }
      if (!doc.unitaries.empty()) canon["unitaries"] = doc.unitaries;
    }
  }

  if (j.contains("window")) {
    auto w = p.integer(j["window"], "window");
    if (w) {
      if (*w < 1 || *w > 64)
        p.err("window", "window must lie in [1, 64]");
      else
        doc.window = *w;
    }
  }
  canon["window"] = doc.window;

  if (j.contains("tolerance")) {
    if (!j["tolerance"].is_number() || j["tolerance"].get<double>() <= 0)
      p.err("tolerance", "expected a positive number");
    else
      doc.tolerance = j["tolerance"].get<double>();
  }
  canon["tolerance"] = doc.tolerance;

  {
    json sj = j.value("suites", json::array({"all"}));
    if (!sj.is_array()) {
      p.err("suites", "expected an array of suite names");
    } else {
      for (std::size_t i = 0; i < sj.size(); ++i) {
        std::string path = "suites[" + std::to_string(i) + "]";
        if (!sj[i].is_string()) {
          p.err(path, "expected a suite name");
          continue;
        }
        std::string s = sj[i].get<std::string>();
        if (std::find(kSuiteNames.begin(), kSuiteNames.end(), s) == kSuiteNames.end())
          p.err(path, "unknown suite \"" + s + "\"");
        else
          doc.suites.push_back(s);
      }
    }
    if (doc.suites.empty()) doc.suites = {"all"};
    canon["suites"] = doc.suites;
  }

  if (!p.errs.empty()) throw SchemaError(std::move(p.errs));
  doc.canonical_bytes = canon.dump(2) + "\n";
  return doc;
}

std::string canonical_serialize(const ModelDocument& doc) { return doc.canonical_bytes; }

// ---------------------------------------------------------------------------
// suites

namespace {

struct SuiteRunner {
  const ModelDocument& doc;
  unsigned long long seed;
  SuiteReport rep;

  unsigned long long check_seed(const std::string& name) const {
    return seed ^ std::hash<std::string>{}(name);
  }

  /// Runs one check; the body returns (status, witness). Exceptions fail the
  /// check rather than the process.
  void check(const std::string& name,
             const std::function<std::pair<CheckStatus, std::string>()>& body) {
    CheckRecord rec;
    rec.name = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
      std::tie(rec.status, rec.witness) = body();
    } catch (const std::exception& e) {
      rec.status = CheckStatus::Fail;
      rec.witness = std::string("exception: ") + e.what();
    }
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                 .count();
    rep.checks.push_back(std::move(rec));
  }

  static std::pair<CheckStatus, std::string> pass(std::string w = "") {
    return {CheckStatus::Pass, std::move(w)};
  }
  static std::pair<CheckStatus, std::string> fail(std::string w) {
    return {CheckStatus::Fail, std::move(w)};
  }
  static std::pair<CheckStatus, std::string> indet(std::string w) {
    return {CheckStatus::Indeterminate, std::move(w)};
  }

  const Groupoid& g() const { return *doc.groupoid; }
  bool rational_cocycle() const { return !doc.cocycle.is_log_modular(); }
  UnitMeasure measure_or_uniform() const {
    return doc.measure ? *doc.measure : UnitMeasure::uniform(g().n_units());
  }

  AlgebraElement<RationalComplex> random_exact(std::mt19937_64& rng, int terms = 4) const {
    return detail::random_rational_element(g(), rng, terms, doc.window);
  }

  // ---- axioms ----
  void axioms() {
    check("axioms.groupoid", [&] {
      auto r = validate_axioms(g(), 2000, static_cast<unsigned>(check_seed("axioms.groupoid")));
      if (!r.valid()) return fail(r.violations.empty() ? r.structural[0] : r.violations[0]);
      return pass(g().is_finite_explicit() ? "exhaustive" : "2000 random composable samples");
    });
    check("axioms.cocycle", [&] {
      auto r = verify_cocycle(g(), doc.cocycle, 400,
                              static_cast<unsigned>(check_seed("axioms.cocycle")), doc.window);
      if (!r.valid()) return fail(r.violations[0]);
      return pass();
    });
  }

  // ---- algebra ----
  void algebra() {
    const Window w{doc.window};
    check("algebra.associativity", [&] {
      std::mt19937_64 rng(check_seed("algebra.associativity"));
      for (int i = 0; i < 50; ++i) {
        auto f = random_exact(rng), h = random_exact(rng), k = random_exact(rng);
        if (convolve(convolve(f, h), k) != convolve(f, convolve(h, k)))
          return fail("(f*g)*h != f*(g*h) on sample " + std::to_string(i));
      }
      return pass("50 exact rational triples");
    });
    check("algebra.involution", [&] {
      std::mt19937_64 rng(check_seed("algebra.involution"));
      for (int i = 0; i < 50; ++i) {
        auto f = random_exact(rng), h = random_exact(rng);
        if (involute(convolve(f, h)) != convolve(involute(h), involute(f)))
          return fail("(f*g)^* != g^* * f^* on sample " + std::to_string(i));
        if (involute(involute(f)) != f)
          return fail("f^** != f on sample " + std::to_string(i));
      }
      return pass("50 exact rational pairs");
    });
    check("algebra.identity", [&] {
      std::mt19937_64 rng(check_seed("algebra.identity"));
      auto id = identity_element<RationalComplex>(g());
      for (int i = 0; i < 20; ++i) {
        auto f = random_exact(rng);
        if (convolve(id, f) != f || convolve(f, id) != f)
          return fail("identity is not neutral on sample " + std::to_string(i));
      }
      return pass();
    });
    check("algebra.norm_bracket", [&] {
      std::mt19937_64 rng(check_seed("algebra.norm_bracket"));
      double worst = 0;
      for (int i = 0; i < 50; ++i) {
        auto f = random_exact(rng);
        auto r = norms(f, w);
        if (r.reduced_lower > r.i_norm + 1e-9)
          return fail("reduced lower bound exceeds I-norm on sample " + std::to_string(i));
        worst = std::max(worst, r.i_norm - r.reduced_lower);
      }
      std::ostringstream os;
      os << "max I-norm slack " << worst;
      return pass(os.str());
    });
    check("algebra.norm_submultiplicative", [&] {
      std::mt19937_64 rng(check_seed("algebra.norm_submultiplicative"));
      for (int i = 0; i < 30; ++i) {
        auto f = random_exact(rng), h = random_exact(rng);
        auto prod = convolve(f, h);
        Window pw{std::max(w.M, detail::degree_spread(prod))};
        if (norms(prod, pw).i_norm > norms(f, w).i_norm * norms(h, w).i_norm + 1e-9)
          return fail("I-norm not submultiplicative on sample " + std::to_string(i));
      }
      return pass();
    });
  }

  // ---- cocycle ----
  void cocycle() {
    check("cocycle.kernel_closed", [&] {
      auto k = kernel_subgroupoid(g(), doc.cocycle, doc.window);
      if (!k.regular) return indet("kernel membership numerically ambiguous");
      auto ker = k.enumerate(doc.window);
      int tested = 0;
      for (const auto& a : ker)
        for (const auto& b : ker) {
          if (tested >= 4000) break;
          auto ab = g().compose(a, b);
          if (!ab) continue;
          ++tested;
          if (!k.contains(*ab))
            return fail("kernel not closed at " + to_string(a) + ", " + to_string(b));
          if (!k.contains(g().invert(a))) return fail("kernel not closed under inverse");
        }
      return pass(std::to_string(tested) + " composable kernel pairs");
    });
    check("cocycle.exactness", [&] {
      auto r = check_exactness(g(), doc.cocycle, doc.window);
      if (r.status == ExactnessReport::Status::Indeterminate) return indet(r.reason);
      return pass(std::to_string(r.class_preimages.size()) + " class preimages certified");
    });
    check("cocycle.evolution_group", [&] {
      std::mt19937_64 rng(check_seed("cocycle.evolution_group"));
      std::uniform_real_distribution<double> tdist(-3.0, 3.0);
      for (int i = 0; i < 25; ++i) {
        auto f = to_complex_element(random_exact(rng));
        double s = tdist(rng), t = tdist(rng);
        auto lhs = evolve(evolve(f, doc.cocycle, {s, 0}), doc.cocycle, {t, 0});
        auto rhs = evolve(f, doc.cocycle, {s + t, 0});
        if (max_abs_diff(lhs, rhs) > doc.tolerance)
          return fail("u_s u_t != u_{s+t} on sample " + std::to_string(i));
      }
      return pass("25 samples within " + std::to_string(doc.tolerance));
    });
    if (g().is_finite_explicit() && rational_cocycle()) {
      check("cocycle.coboundary", [&] {
        auto r = solve_coboundary(g(), doc.cocycle);
        if (auto* f = std::get_if<std::vector<Rational>>(&r)) {
          // Verify the potential reproduces the cocycle on every morphism.
          for (const auto& m : g().all_morphisms(0))
            if ((*f)[g().range(m)] - (*f)[g().source(m)] != *doc.cocycle.rational_value(g(), m))
              return fail("recovered potential does not reproduce the cocycle");
          return pass("coboundary; potential recovered on " + std::to_string(f->size()) +
                      " units");
        }
        auto& bad = std::get<NotCoboundary>(r);
        // Not in B^1: verify the witness loop really sums to a nonzero value.
        Rational s{0};
        for (const auto& m : bad.cycle) s += *doc.cocycle.rational_value(g(), m);
        if (s.numerator() == 0) return fail("witness loop sums to zero");
        return pass("not a coboundary; witness loop of length " +
                    std::to_string(bad.cycle.size()) + " sums to " + to_string(s));
      });
    }
  }

  // ---- bimodule ----
  void bimodule() {
    check("bimodule.derivation", [&] {
      std::mt19937_64 rng(check_seed("bimodule.derivation"));
      for (int i = 0; i < 50; ++i) {
        auto f = random_exact(rng), phi = random_exact(rng);
        if (rational_cocycle()) {
          auto lhs = apply_D(convolve(f, phi), doc.cocycle);
          auto rhs = convolve(apply_D(f, doc.cocycle), phi) + convolve(f, apply_D(phi, doc.cocycle));
          if (lhs != rhs) return fail("Leibniz identity fails on sample " + std::to_string(i));
        } else {
          auto fc = to_complex_element(f), pc = to_complex_element(phi);
          auto lhs = apply_D(convolve(fc, pc), doc.cocycle);
          auto rhs = convolve(apply_D(fc, doc.cocycle), pc) +
                     convolve(fc, apply_D(pc, doc.cocycle));
          if (max_abs_diff(lhs, rhs) > doc.tolerance)
            return fail("Leibniz identity fails on sample " + std::to_string(i));
        }
      }
      return pass(rational_cocycle() ? "50 exact rational pairs" : "50 pairs within tolerance");
    });
    check("bimodule.inner_hermitian", [&] {
      std::mt19937_64 rng(check_seed("bimodule.inner_hermitian"));
      for (int i = 0; i < 50; ++i) {
        auto phi = random_exact(rng), psi = random_exact(rng);
        if (involute(inner_product_kernel(phi, psi, doc.cocycle)) !=
            inner_product_kernel(psi, phi, doc.cocycle))
          return fail("<Phi,Psi>^* != <Psi,Phi> on sample " + std::to_string(i));
      }
      return pass();
    });
    check("bimodule.d_symmetric", [&] {
      std::mt19937_64 rng(check_seed("bimodule.d_symmetric"));
      for (int i = 0; i < 50; ++i) {
        auto phi = random_exact(rng), psi = random_exact(rng);
        if (rational_cocycle()) {
          if (inner_product_kernel(apply_D(phi, doc.cocycle), psi, doc.cocycle) !=
              inner_product_kernel(phi, apply_D(psi, doc.cocycle), doc.cocycle))
            return fail("<D Phi,Psi> != <Phi,D Psi> on sample " + std::to_string(i));
        } else {
          auto pc = to_complex_element(phi), qc = to_complex_element(psi);
          auto lhs = inner_product_kernel(apply_D(pc, doc.cocycle), qc, doc.cocycle);
          auto rhs = inner_product_kernel(pc, apply_D(qc, doc.cocycle), doc.cocycle);
          if (max_abs_diff(lhs, rhs) > doc.tolerance)
            return fail("<D Phi,Psi> != <Phi,D Psi> on sample " + std::to_string(i));
        }
      }
      return pass();
    });
    check("bimodule.cayley_isometry", [&] {
      std::mt19937_64 rng(check_seed("bimodule.cayley_isometry"));
      double worst = 0;
      for (int i = 0; i < 50; ++i) {
        auto phi = to_complex_element(random_exact(rng));
        auto psi = to_complex_element(random_exact(rng));
        auto lhs = inner_product_kernel(transform_D(phi, doc.cocycle, TransformKind::Cayley),
                                        transform_D(psi, doc.cocycle, TransformKind::Cayley),
                                        doc.cocycle);
        auto rhs = inner_product_kernel(phi, psi, doc.cocycle);
        worst = std::max(worst, max_abs_diff(lhs, rhs));
      }
      if (worst > doc.tolerance) {
        std::ostringstream os;
        os << "Cayley transform moves the inner product by " << worst;
        return fail(os.str());
      }
      std::ostringstream os;
      os << "max deviation " << worst;
      return pass(os.str());
    });
    check("bimodule.covariance", [&] {
      std::mt19937_64 rng(check_seed("bimodule.covariance"));
      std::uniform_real_distribution<double> tdist(-3.0, 3.0);
      for (int i = 0; i < 50; ++i) {
        auto f = to_complex_element(random_exact(rng));
        auto phi = to_complex_element(random_exact(rng));
        double t = tdist(rng);
        auto lhs = evolve_module(convolve(f, evolve_module(phi, doc.cocycle, {-t, 0})),
                                 doc.cocycle, {t, 0});
        auto rhs = convolve(evolve(f, doc.cocycle, {t, 0}), phi);
        if (max_abs_diff(lhs, rhs) > doc.tolerance)
          return fail("U_t(f U_{-t} Phi) != u_t(f) Phi on sample " + std::to_string(i));
      }
      return pass();
    });
    check("bimodule.cutoff_cauchy", [&] {
      if (!rational_cocycle()) return indet("cutoff kernels need rational cocycle values");
      std::mt19937_64 rng(check_seed("bimodule.cutoff_cauchy"));
      for (int i = 0; i < 5; ++i) {
        auto f = random_exact(rng);
        if (f.empty()) continue;
        double fI = norms(f, Window{doc.window}).i_norm;
        std::int64_t ew = 6 + detail::degree_spread(f) + 8;
        for (std::int64_t m = 1; m < 6; ++m)
          for (std::int64_t n = m + 1; n <= 6; ++n) {
            auto kn = cutoff_approximant(f, doc.cocycle, n, ew);
            auto km = cutoff_approximant(f, doc.cocycle, m, ew);
            double bound = fI / (1.0 + static_cast<double>(m * m));
            if ((kn - km).i_norm() > bound + 1e-12)
              return fail("Cauchy bound fails at m=" + std::to_string(m) +
                          ", n=" + std::to_string(n));
          }
      }
      return pass("all 1 <= m < n <= 6 on 5 random elements");
    });
    check("bimodule.ssa_witness", [&] {
      if (!doc.cocycle.is_integral(g(), doc.window))
        return indet("spectral subspaces need an integral cocycle");
      std::mt19937_64 rng(check_seed("bimodule.ssa_witness"));
      std::uniform_int_distribution<long long> kdist(-3, 3);
      for (int i = 0; i < 30; ++i) {
        auto f = random_exact(rng);
        auto psi = random_exact(rng);
        long long k = kdist(rng);
        auto kernel = ssa_witness(f, k, doc.cocycle);
        if (kernel.apply(psi) !=
            convolve(f, spectral_projection_rho(k, psi, doc.cocycle)))
          return fail("f_k(Psi) != f * (rho_k Psi) on sample " + std::to_string(i));
      }
      return pass("30 exact samples");
    });
  }

  // ---- kms ----
  void kms() {
    UnitMeasure mu = measure_or_uniform();
    std::string mu_note = doc.measure ? "" : " (uniform measure assumed)";
    check("kms.boundary", [&] {
      auto r = check_kms(g(), mu, 60, static_cast<unsigned>(check_seed("kms.boundary")),
                         doc.window);
      if (!r.ok) return fail(r.failures[0]);
      // Record one sample's both-sides values.
      std::mt19937_64 rng(check_seed("kms.boundary.sample"));
      auto f = detail::random_rational_element(g(), rng, 3, doc.window);
      auto h = detail::random_rational_element(g(), rng, 3, doc.window);
      auto lhs = tau_functional(convolve(f, modular_scale(h, mu)), mu);
      auto rhs = tau_functional(convolve(h, f), mu);
      return pass("60 exact pairs; sample tau(f u_{-i}(g)) = " + to_string(lhs.re) + "+" +
                  to_string(lhs.im) + "i = tau(g f) = " + to_string(rhs.re) + "+" +
                  to_string(rhs.im) + "i" + mu_note);
    });
    check("kms.kernel_trace", [&] {
      Cocycle c_mu = Cocycle::log_modular(mu);
      auto r = check_trace_unimodular(g(), mu, 60,
                                      static_cast<unsigned>(check_seed("kms.kernel_trace")),
                                      &c_mu, doc.window);
      if (!r.ok) return fail(r.failures[0]);
      return pass("tau is a trace on ker c_mu, 60 exact pairs" + mu_note);
    });
  }

  // ---- index ----
  void index() {
    if (doc.unitaries.empty()) {
      check("index.unitaries", [&] {
        return indet("no unitaries declared in the document");
      });
      return;
    }
    UnitMeasure mu = doc.measure ? *doc.measure
                                 : UnitMeasure::uniform(g().n_units()).normalized();
    std::vector<std::pair<std::string, UnitaryElement>> us;
    for (const auto& name : doc.unitaries) {
      UnitaryElement u(g(), 1);
      u.at(0, 0) = doc.elements.at(name).value;
      us.emplace_back(name, std::move(u));
    }
    std::map<std::string, std::complex<double>> values;
    for (const auto& [name, u] : us) {
      check("index." + name, [&, &name = name, &u = u] {
        Window w{std::max<std::int64_t>(doc.window, u.degree_spread() + 2)};
        auto r = index_mu(u, doc.cocycle, mu, w);
        if (r.indeterminate) return indet(r.note);
        values[name] = r.value;
        std::ostringstream os;
        os << "value " << r.value.real();
        if (std::abs(r.value.imag()) > 1e-12) os << "+" << r.value.imag() << "i";
        os << ", window " << w.M << ", stable=" << (r.stable ? "true" : "false")
           << ", compression and spectral flow agree";
        if (!r.stable) return fail(os.str());
        return pass(os.str());
      });
    }
    if (us.size() >= 1) {
      check("index.homomorphism", [&] {
        int tested = 0;
        for (const auto& [na, ua] : us)
          for (const auto& [nb, ub] : us) {
            if (tested >= 6) break;
            if (!values.count(na) || !values.count(nb))
              return indet("individual index values unavailable");
            auto uv = ua * ub;
            Window w{std::max<std::int64_t>(doc.window, uv.degree_spread() + 2)};
            auto r = index_mu(uv, doc.cocycle, mu, w);
            if (r.indeterminate) return indet(r.note);
            if (std::abs(r.value - values[na] - values[nb]) > 1e-9)
              return fail("index(" + na + "*" + nb + ") != index(" + na + ") + index(" + nb +
                          ")");
            ++tested;
          }
        return pass(std::to_string(tested) + " products checked");
      });
    }
  }

  void run(const std::string& suite) {
    if (suite == "axioms" || suite == "all") axioms();
    if (suite == "algebra" || suite == "all") algebra();
    if (suite == "cocycle" || suite == "all") cocycle();
    if (suite == "bimodule" || suite == "all") bimodule();
    if (suite == "kms" || suite == "all") kms();
    if (suite == "index" || suite == "all") index();
  }
};

}  // namespace

SuiteReport run_suite(const ModelDocument& doc, const std::string& suite,
                      unsigned long long seed) {
  if (std::find(kSuiteNames.begin(), kSuiteNames.end(), suite) == kSuiteNames.end())
    throw std::invalid_argument("unknown suite \"" + suite + "\"");
  SuiteRunner runner{doc, seed, {}};
  runner.rep.suite = suite;
  runner.rep.seed = seed;
  runner.rep.artifact_version = kArtifactVersion;
  runner.rep.input_digest = doc.digest;
  runner.run(suite);
  std::sort(runner.rep.checks.begin(), runner.rep.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  for (const auto& c : runner.rep.checks) {
    if (c.status == CheckStatus::Pass) ++runner.rep.n_pass;
    if (c.status == CheckStatus::Fail) ++runner.rep.n_fail;
    if (c.status == CheckStatus::Indeterminate) ++runner.rep.n_indeterminate;
  }
  return runner.rep;
}

namespace {
const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    default:
      return "indeterminate";
  }
}
}  // namespace

std::string report_to_json(const SuiteReport& rep) {
  json j;
  j["suite"] = rep.suite;
  j["seed"] = rep.seed;
  j["artifact_version"] = rep.artifact_version;
  j["input_digest"] = rep.input_digest;
  j["summary"] = {{"pass", rep.n_pass},
                  {"fail", rep.n_fail},
                  {"indeterminate", rep.n_indeterminate},
                  {"exit_code", rep.exit_code()}};
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"status", status_name(c.status)},
                      {"witness", c.witness},
                      {"ms", c.ms}});
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

std::string report_to_text(const SuiteReport& rep) {
  std::ostringstream os;
  os << "suite " << rep.suite << "  seed " << rep.seed << "  digest " << rep.input_digest
     << "  v" << rep.artifact_version << "\n";
  for (const auto& c : rep.checks) {
    std::string tag = c.status == CheckStatus::Pass
                          ? "PASS"
                          : (c.status == CheckStatus::Fail ? "FAIL" : "INDET");
    os << "[" << tag << "] " << c.name;
    if (!c.witness.empty()) os << "  " << c.witness;
    char buf[32];
    std::snprintf(buf, sizeof buf, "  (%.1f ms)", c.ms);
    os << buf << "\n";
  }
  os << rep.n_pass << " passed, " << rep.n_fail << " failed, " << rep.n_indeterminate
     << " indeterminate\n";
  return os.str();
}

}  // namespace groupoidal
