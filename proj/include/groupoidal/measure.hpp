#pragma once

#include "groupoidal/scalar.hpp"

#include <stdexcept>
#include <vector>

namespace groupoidal {

/// Strictly positive rational weights on the unit space. In the discrete
/// setting strict positivity is exactly quasi-invariance: the induced
/// measures nu^mu and nu_mu are then mutually absolutely continuous.
struct UnitMeasure {
  std::vector<Rational> weights;

  explicit UnitMeasure(std::vector<Rational> w) : weights(std::move(w)) {
    for (const auto& q : weights)
      if (q <= 0) throw std::invalid_argument("unit measure weights must be strictly positive");
  }

  static UnitMeasure uniform(int n_units, Rational w = Rational(1)) {
    return UnitMeasure(std::vector<Rational>(n_units, w));
  }

  const Rational& operator()(int unit) const { return weights.at(unit); }

  Rational total_mass() const {
    Rational t{0};
    for (const auto& q : weights) t += q;
    return t;
  }

  UnitMeasure normalized() const {
    Rational t = total_mass();
    auto w = weights;
    for (auto& q : w) q /= t;
    return UnitMeasure(w);
  }
};

}  // namespace groupoidal
