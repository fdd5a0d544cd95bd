#pragma once

#include "groupoidal/algebra.hpp"
#include "groupoidal/bimodule.hpp"
#include "groupoidal/cocycle.hpp"
#include "groupoidal/measure.hpp"
#include "groupoidal/measures.hpp"
#include "groupoidal/norms.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace groupoidal {

using ComplexElement = AlgebraElement<std::complex<double>>;

/// A matrix amplification of unitaries over C_c(G), representing a K_1 class.
struct UnitaryElement {
  const Groupoid* parent{nullptr};
  int size{0};
  std::vector<ComplexElement> entries;  // row-major, size x size

  UnitaryElement(const Groupoid& g, int k)
      : parent(&g), size(k), entries(k * k, ComplexElement(g)) {}

  ComplexElement& at(int i, int j) { return entries[i * size + j]; }
  const ComplexElement& at(int i, int j) const { return entries[i * size + j]; }

  static UnitaryElement identity(const Groupoid& g, int k = 1) {
    UnitaryElement u(g, k);
    for (int i = 0; i < k; ++i) u.at(i, i) = identity_element<std::complex<double>>(g);
    return u;
  }

  UnitaryElement adjoint() const {
    UnitaryElement out(*parent, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) out.at(i, j) = involute(at(j, i));
    return out;
  }

  friend UnitaryElement operator*(const UnitaryElement& a, const UnitaryElement& b) {
    if (a.size != b.size || a.parent != b.parent)
      throw std::invalid_argument("amplification size/parent mismatch");
    UnitaryElement out(*a.parent, a.size);
    for (int i = 0; i < a.size; ++i)
      for (int j = 0; j < a.size; ++j)
        for (int k = 0; k < a.size; ++k)
          out.at(i, j) = out.at(i, j) + convolve(a.at(i, k), b.at(k, j));
    return out;
  }

  /// Coefficientwise check of u*u = uu* = 1 amplified.
  bool is_unitary(double tol = 1e-10) const {
    auto check = [&](const UnitaryElement& p) {
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
          ComplexElement want(*parent);
          if (i == j) want = identity_element<std::complex<double>>(*parent);
          if (max_abs_diff(p.at(i, j), want) > tol) return false;
        }
      return true;
    };
    return check(adjoint() * *this) && check(*this * adjoint());
  }

  std::int64_t degree_spread() const {
    std::int64_t s = 0;
    for (const auto& e : entries) s = std::max(s, detail::degree_spread(e));
    return s;
  }

  std::int64_t cocycle_spread(const Cocycle& c) const {
    std::int64_t s = 0;
    for (const auto& e : entries)
      for (const auto& [m, v] : e.coef)
        s = std::max<std::int64_t>(s, std::abs(c.integer_value(*parent, m).value_or(0)));
    return s;
  }
};

enum class IndexMethod { Compression, SpectralFlow };

struct IndexReport {
  std::complex<double> value{0.0};
  Window window;
  bool stable{false};
  IndexMethod method{IndexMethod::Compression};
  bool indeterminate{false};
  std::string note;
};

namespace detail {

struct Fiber {
  std::vector<Morphism> basis;
  std::map<Morphism, int> pos;
};

inline Fiber fiber_with_cocycle_range(const Groupoid& g, const Cocycle& c, UnitId u,
                                      std::int64_t degree_window, long long c_min,
                                      long long c_max) {
  Fiber f;
  for (const auto& m : g.fiber_source(u, degree_window)) {
    auto v = c.integer_value(g, m);
    if (v && *v >= c_min && *v <= c_max) f.basis.push_back(m);
  }
  for (int i = 0; i < static_cast<int>(f.basis.size()); ++i) f.pos[f.basis[i]] = i;
  return f;
}

/// Block matrix of the amplified element from the domain fiber into the row
/// fiber. The row fiber is chosen wide enough that every nonzero image
/// coefficient of a domain basis vector is captured, so kernels computed on
/// the rectangle are kernels of the untruncated compression.
inline Eigen::MatrixXcd block_matrix(const UnitaryElement& u, const Fiber& domain,
                                     const Fiber& rows) {
  const Groupoid& g = *u.parent;
  const int bd = static_cast<int>(domain.basis.size());
  const int br = static_cast<int>(rows.basis.size());
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(u.size * br, u.size * bd);
  for (int i = 0; i < u.size; ++i)
    for (int j = 0; j < u.size; ++j)
      for (const auto& [zeta, v] : u.at(i, j).coef)
        for (int col = 0; col < bd; ++col)
          if (auto eta = g.compose(zeta, domain.basis[col])) {
            auto it = rows.pos.find(*eta);
            if (it != rows.pos.end()) mat(i * br + it->second, j * bd + col) += v;
          }
  return mat;
}

/// Kernel dimension by singular values, with the rank-gap assertion: zero
/// group below 1e-9, nonzero group above 1e-6.
inline std::optional<int> kernel_dimension(const Eigen::MatrixXcd& mat) {
  if (mat.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat);
  const auto& sv = svd.singularValues();
  int dim = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 && sv(i) < 1e-6) return std::nullopt;
    if (sv(i) <= 1e-9) ++dim;
  }
  dim += static_cast<int>(mat.cols() - sv.size());
  return dim;
}

inline std::optional<std::complex<double>> compression_value(const UnitaryElement& u,
                                                             const Cocycle& c,
                                                             const UnitMeasure& mu,
                                                             std::int64_t M) {
  const Groupoid& g = *u.parent;
  const std::int64_t sd = u.degree_spread();
  const std::int64_t sc = u.cocycle_spread(c);
  std::complex<double> value = 0;
  for (int x = 0; x < g.n_units(); ++x) {
    Fiber domain = fiber_with_cocycle_range(g, c, x, M + sd + 2, 0, M);
    Fiber rows = fiber_with_cocycle_range(g, c, x, M + 2 * sd + 2, 0, M + sc);
    auto ker = kernel_dimension(block_matrix(u, domain, rows));
    auto coker = kernel_dimension(block_matrix(u.adjoint(), domain, rows));
    if (!ker || !coker) return std::nullopt;
    value += to_double(mu(x)) * static_cast<double>(*ker - *coker);
  }
  return value;
}

}  // namespace detail

/// tau-weighted index of the Toeplitz-type compression P u P, where P is the
/// positive spectral projection of D: per unit fiber, dim ker - dim coker of
/// the compression on the half basis {xi : d(xi) = x, 0 <= c(xi) <= M},
/// weighted by mu.
inline IndexReport tau_index_compression(const UnitaryElement& u, const Cocycle& c,
                                         const UnitMeasure& mu, Window w) {
  const Groupoid& g = *u.parent;
  if (!c.is_integral(g)) throw std::invalid_argument("index pairing needs an integral cocycle");
  if (w.M < u.degree_spread() + 2)
    throw std::invalid_argument("window must exceed the degree support of u by 2");
  if (!u.is_unitary()) throw std::invalid_argument("element is not unitary");
  IndexReport rep;
  rep.window = w;
  rep.method = IndexMethod::Compression;
  auto v0 = detail::compression_value(u, c, mu, w.M);
  auto v1 = detail::compression_value(u, c, mu, w.M + 1);
  if (!v0 || !v1) {
    rep.indeterminate = true;
    rep.note = "singular value gap assertion failed";
    return rep;
  }
  rep.value = *v0;
  rep.stable = std::abs(*v0 - *v1) < 1e-9;
  return rep;
}

namespace detail {

struct FlowResult {
  double crossings{0};
  bool indeterminate{false};
};

/// Signed eigenvalue crossings of the level -eps along s |-> A(s), with
/// eigenvector-localization screening: a crossing whose eigenvector lives at
/// the truncation edge is an artifact of the window, not spectral flow.
struct FlowTracker {
  std::function<Eigen::MatrixXcd(double)> matrix;
  std::vector<bool> interior;  // per basis row, |c| within the trusted window
  double level{-0.5};  // midway between the integer eigenvalues of D
  int max_depth{12};

  FlowResult run(int steps) {
    FlowResult out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es0(matrix(0.0));
    auto prev = es0;
    double s_prev = 0.0;
    for (int i = 1; i <= steps; ++i) {
      double s = static_cast<double>(i) / steps;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix(s));
      segment(s_prev, prev, s, es, 0, out);
      if (out.indeterminate) return out;
      prev = es;
      s_prev = s;
    }
    return out;
  }

 private:
  static int below(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& es, double level) {
    int n = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) < level) ++n;
    return n;
  }

  double interior_mass(const Eigen::VectorXcd& v) const {
    double m = 0, tot = 0;
    for (int i = 0; i < v.size(); ++i) {
      double w2 = std::norm(v(i));
      tot += w2;
      if (interior[i % interior.size()]) m += w2;
    }
    return tot > 0 ? m / tot : 0.0;
  }

  void segment(double s0, const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& e0, double s1,
               const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& e1, int depth,
               FlowResult& out) {
    int n0 = below(e0, level), n1 = below(e1, level);
    int dn = n0 - n1;  // net upward crossings through the level
    if (dn == 0) return;
    if (std::abs(dn) > 1 && depth < max_depth) {
      double sm = (s0 + s1) / 2;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(matrix(sm));
      segment(s0, e0, sm, em, depth + 1, out);
      if (!out.indeterminate) segment(sm, em, s1, e1, depth + 1, out);
      return;
    }
    // Inspect each crossed eigenvector at the endpoint it just reached: after
    // upward crossings these sit just above the level at e1 (indices n1..n0-1,
    // ascending order), after downward ones just below it (indices n0..n1-1).
    const int size = static_cast<int>(e1.eigenvalues().size());
    const int lo = std::min(n0, n1), hi = std::min(std::max(n0, n1), size);
    const int sign = dn > 0 ? 1 : -1;
    for (int idx = lo; idx < hi; ++idx)
      if (interior_mass(e1.eigenvectors().col(idx)) >= 0.5) out.crossings += sign;
  }
};

}  // namespace detail

/// Index by spectral flow of the straight path (1-s) D + s uDu* on truncated
/// fibers, crossings weighted by the measure of the fiber's unit. Independent
/// of the compression route; the two must agree on honest inputs.
inline IndexReport spectral_flow(const UnitaryElement& u, const Cocycle& c,
                                 const UnitMeasure& mu, Window w, int steps = 64) {
  const Groupoid& g = *u.parent;
  if (!c.is_integral(g)) throw std::invalid_argument("index pairing needs an integral cocycle");
  if (steps < 2) throw std::invalid_argument("need at least 2 steps");
  if (w.M < u.degree_spread() + 2)
    throw std::invalid_argument("window must exceed the degree support of u by 2");
  if (!u.is_unitary()) throw std::invalid_argument("element is not unitary");
  IndexReport rep;
  rep.window = w;
  rep.method = IndexMethod::SpectralFlow;
  const std::int64_t sc = u.cocycle_spread(c);
  // Genuine crossings live within |c| <= sc of the origin, and the interior
  // screen trusts only |c| <= M - sc - 1, so the truncation must dominate
  // twice the spread regardless of the requested window.
  const std::int64_t M = std::max<std::int64_t>(w.M, 2 * sc + 4);
  std::complex<double> value = 0;
  for (int x = 0; x < g.n_units(); ++x) {
    auto fiber = detail::fiber_with_cocycle_range(g, c, x, M + u.degree_spread() + 2, -M, M);
    const int b = static_cast<int>(fiber.basis.size());
    if (b == 0) continue;
    Eigen::VectorXd diag(b);
    std::vector<bool> interior(b);
    for (int i = 0; i < b; ++i) {
      long long cv = *c.integer_value(g, fiber.basis[i]);
      diag(i) = static_cast<double>(cv);
      interior[i] = std::abs(cv) <= M - sc - 1;
    }
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(u.size * b, u.size * b);
    for (int i = 0; i < u.size; ++i)
      for (int k = 0; k < b; ++k) D(i * b + k, i * b + k) = diag(k);
    Eigen::MatrixXcd R = detail::block_matrix(u, fiber, fiber);
    Eigen::MatrixXcd conjugated = R * D * R.adjoint();
    detail::FlowTracker tracker;
    tracker.matrix = [&D, &conjugated](double s) -> Eigen::MatrixXcd {
      return (1.0 - s) * D + s * conjugated;
    };
    tracker.interior = interior;
    auto res = tracker.run(steps);
    if (res.indeterminate) {
      rep.indeterminate = true;
      rep.note = "eigenvalue crossing of multiplicity > 1 persisted under refinement";
      return rep;
    }
    value += to_double(mu(x)) * res.crossings;
  }
  rep.value = value;
  rep.stable = true;
  return rep;
}

/// Runs both realizations of Ind_mu and flags disagreement. Requires the
/// kernel of c to be unimodular for mu, so that tau is a trace there.
inline IndexReport index_mu(const UnitaryElement& u, const Cocycle& c, const UnitMeasure& mu,
                            Window w, int steps = 64) {
  const Groupoid& g = *u.parent;
  ModularData md{&g, mu};
  for (const auto& m : g.all_morphisms(w.M + 2))
    if (c.in_kernel(g, m) && md.delta(m) != Rational(1))
      throw std::invalid_argument("ker c is not unimodular for mu; tau is not a trace there");
  IndexReport comp = tau_index_compression(u, c, mu, w);
  IndexReport flow = spectral_flow(u, c, mu, w, steps);
  if (comp.indeterminate || flow.indeterminate) {
    comp.indeterminate = true;
    comp.note = "method indeterminate: " + comp.note + flow.note;
    return comp;
  }
  if (std::abs(comp.value - flow.value) > 1e-9) {
    comp.indeterminate = true;
    comp.note = "compression and spectral flow disagree";
  }
  return comp;
}

}  // namespace groupoidal
