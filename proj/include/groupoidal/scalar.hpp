#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

namespace groupoidal {

using Rational = boost::rational<long long>;

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

/// Complex number with exact rational real and imaginary parts.
/// Used wherever the inputs are rational so that convolution-level
/// identities can be asserted without tolerances.
struct RationalComplex {
  Rational re{0};
  Rational im{0};

  RationalComplex() = default;
  RationalComplex(Rational r) : re(std::move(r)) {}
  RationalComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  RationalComplex(long long r) : re(r) {}

  friend RationalComplex operator+(const RationalComplex& a, const RationalComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend RationalComplex operator-(const RationalComplex& a, const RationalComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend RationalComplex operator*(const RationalComplex& a, const RationalComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  RationalComplex& operator+=(const RationalComplex& o) { return *this = *this + o; }
  RationalComplex& operator-=(const RationalComplex& o) { return *this = *this - o; }
  RationalComplex& operator*=(const RationalComplex& o) { return *this = *this * o; }
  friend bool operator==(const RationalComplex& a, const RationalComplex& b) = default;
};

// Scalar glue shared by the complex<double> and RationalComplex instantiations
// of the convolution algebra.

inline std::complex<double> conj_val(const std::complex<double>& z) { return std::conj(z); }
inline RationalComplex conj_val(const RationalComplex& z) { return {z.re, -z.im}; }

inline bool is_zero(const std::complex<double>& z) { return z == std::complex<double>{0.0, 0.0}; }
inline bool is_zero(const RationalComplex& z) {
  return z.re.numerator() == 0 && z.im.numerator() == 0;
}

inline std::complex<double> to_complex(const std::complex<double>& z) { return z; }
inline std::complex<double> to_complex(const RationalComplex& z) {
  return {to_double(z.re), to_double(z.im)};
}

inline double abs_val(const std::complex<double>& z) { return std::abs(z); }
inline double abs_val(const RationalComplex& z) { return std::abs(to_complex(z)); }

template <typename S>
S scalar_from_rational(const Rational& q) {
  if constexpr (std::is_same_v<S, RationalComplex>) {
    return RationalComplex{q};
  } else {
    return std::complex<double>{to_double(q), 0.0};
  }
}

inline std::string to_string(const Rational& q) {
  std::string s = std::to_string(q.numerator());
  if (q.denominator() != 1) s += "/" + std::to_string(q.denominator());
  return s;
}

}  // namespace groupoidal
