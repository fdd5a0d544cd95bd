#pragma once

#include "groupoidal/algebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace groupoidal {

/// Truncation parameter: morphisms are enumerated with |degree| <= M.
struct Window {
  std::int64_t M{0};
};

struct NormReport {
  double nu{0};
  double nu_inv{0};
  double i_norm{0};
  double reduced_lower{0};
  Window window_used;
};

namespace detail {
template <typename S>
std::int64_t degree_spread(const AlgebraElement<S>& f) {
  std::int64_t s = 0;
  for (const auto& [m, v] : f.coef) s = std::max(s, std::abs(f.parent->degree(m)));
  return s;
}
}  // namespace detail

/// Matrix of left convolution by f on the truncated d-fiber basis
/// {xi : d(xi) = u, |degree| <= M}.
template <typename S>
Eigen::MatrixXcd truncated_regular_rep(const AlgebraElement<S>& f, UnitId u, Window w) {
  if (w.M < detail::degree_spread(f))
    throw std::invalid_argument("window does not cover the degree support of f");
  const Groupoid& g = *f.parent;
  auto basis = g.fiber_source(u, w.M);
  std::map<Morphism, int> row;
  for (int i = 0; i < static_cast<int>(basis.size()); ++i) row[basis[i]] = i;
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  for (int j = 0; j < static_cast<int>(basis.size()); ++j)
    for (const auto& [zeta, v] : f.coef)
      if (auto eta = g.compose(zeta, basis[j])) {
        auto it = row.find(*eta);
        if (it != row.end()) mat(it->second, j) += to_complex(v);
      }
  return mat;
}

/// The exact I-norm data together with a lower bound on the reduced norm from
/// the truncated regular representation. The lower bound is monotone
/// nondecreasing in the window.
template <typename S>
NormReport norms(const AlgebraElement<S>& f, Window w) {
  const Groupoid& g = *f.parent;
  NormReport rep;
  rep.window_used = w;
  std::vector<double> by_range(g.n_units(), 0.0), by_source(g.n_units(), 0.0);
  for (const auto& [m, v] : f.coef) {
    by_range[g.range(m)] += abs_val(v);
    by_source[g.source(m)] += abs_val(v);
  }
  for (int u = 0; u < g.n_units(); ++u) {
    rep.nu = std::max(rep.nu, by_range[u]);
    rep.nu_inv = std::max(rep.nu_inv, by_source[u]);
  }
  rep.i_norm = std::max(rep.nu, rep.nu_inv);
  for (int u = 0; u < g.n_units(); ++u) {
    auto mat = truncated_regular_rep(f, u, w);
    if (mat.rows() == 0) continue;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat);
    rep.reduced_lower = std::max(rep.reduced_lower, svd.singularValues()(0));
  }
  return rep;
}

}  // namespace groupoidal
