#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace epkit {

// Arbitrary-precision rational, always kept in lowest terms.
using Rational = boost::multiprecision::cpp_rational;

// Extended tier: x87 80-bit on x86-64.
using ext = long double;
using cdouble = std::complex<double>;
using cext = std::complex<ext>;

enum class Precision { Exact, Double, Extended };

std::string_view to_string(Precision p);
Precision precision_from_string(std::string_view s);

// Exact value of a finite double (every double is a dyadic rational).
Rational exact_from_double(double x);

// Exact complex rational, used for the boundary-controlled corners 2 - z.
struct QComplex {
  Rational re{0};
  Rational im{0};

  QComplex() = default;
  QComplex(Rational r) : re(std::move(r)) {}  // NOLINT: implicit by design of the field tower
  QComplex(int r) : re(r) {}                  // NOLINT
  QComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  QComplex& operator+=(const QComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  QComplex& operator-=(const QComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  QComplex& operator*=(const QComplex& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  QComplex& operator/=(const QComplex& o) {
    const Rational den = o.re * o.re + o.im * o.im;
    if (den == 0) throw std::domain_error("QComplex division by zero");
    Rational r = (re * o.re + im * o.im) / den;
    im = (im * o.re - re * o.im) / den;
    re = std::move(r);
    return *this;
  }
  friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
  friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
  friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
  friend QComplex operator/(QComplex a, const QComplex& b) { return a /= b; }
  friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
};

// ---- field helpers shared by the polynomial / determinant templates ----

template <class T>
struct is_exact : std::false_type {};
template <>
struct is_exact<Rational> : std::true_type {};
template <>
struct is_exact<QComplex> : std::true_type {};
template <class T>
inline constexpr bool is_exact_v = is_exact<T>::value;

inline bool is_zero(const Rational& q) { return q == 0; }
inline bool is_zero(const QComplex& q) { return q.re == 0 && q.im == 0; }
template <class R>
bool is_zero(const std::complex<R>& z) {
  return z == std::complex<R>(0);
}
inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(long double x) { return x == 0.0L; }

inline Rational conj_of(const Rational& q) { return q; }
inline QComplex conj_of(const QComplex& q) { return {q.re, -q.im}; }
template <class R>
std::complex<R> conj_of(const std::complex<R>& z) {
  return std::conj(z);
}

// One-directional exact -> float conversions.
inline cext to_cext(const Rational& q) { return {q.convert_to<ext>(), 0.0L}; }
inline cext to_cext(const QComplex& q) { return {q.re.convert_to<ext>(), q.im.convert_to<ext>()}; }
template <class R>
cext to_cext(const std::complex<R>& z) {
  return {static_cast<ext>(z.real()), static_cast<ext>(z.imag())};
}
inline cext to_cext(double x) { return {x, 0.0L}; }
inline cext to_cext(long double x) { return {x, 0.0L}; }

// Modulus used for pivoting and scale estimates.
template <class T>
ext magnitude(const T& x) {
  return std::abs(to_cext(x));
}

}  // namespace epkit
