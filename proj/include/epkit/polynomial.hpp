#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "epkit/rational.hpp"

namespace epkit {

// Dense univariate polynomial, coefficients in ascending degree.
// The coefficient vector never carries trailing zeros, so degree() is the
// index of the last stored coefficient (-1 for the zero polynomial).
template <class T>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

  static Polynomial constant(T v) { return Polynomial(std::vector<T>{std::move(v)}); }
  static Polynomial monomial(T v, int k) {
    std::vector<T> c(static_cast<std::size_t>(k) + 1, T(0));
    c.back() = std::move(v);
    return Polynomial(std::move(c));
  }
  // (x - root)
  static Polynomial linear_root(const T& root) { return Polynomial({-root, T(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<T>& coeffs() const { return c_; }
  T coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : T(0);
  }
  const T& leading() const {
    if (c_.empty()) throw std::domain_error("leading coefficient of the zero polynomial");
    return c_.back();
  }

  template <class U>
  U operator()(const U& x) const {
    U acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + U(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<int>(k));
    return Polynomial(std::move(d));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) { return a * T(-1); }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && epkit::is_zero(c_.back())) c_.pop_back();
  }
  std::vector<T> c_;
};

// Euclidean division a = q*b + r, deg r < deg b.  Over inexact fields this
// is plain long division without any zero-snapping of the remainder.
template <class T>
std::pair<Polynomial<T>, Polynomial<T>> divmod(const Polynomial<T>& a, const Polynomial<T>& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<T> r = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {Polynomial<T>{}, a};
  std::vector<T> q(static_cast<std::size_t>(a.degree() - db + 1), T(0));
  const T& lb = b.leading();
  for (int k = a.degree() - db; k >= 0; --k) {
    const T f = r[static_cast<std::size_t>(k + db)] / lb;
    q[static_cast<std::size_t>(k)] = f;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= f * b.coeff(j);
    r[static_cast<std::size_t>(k + db)] = T(0);
  }
  r.resize(static_cast<std::size_t>(db));
  return {Polynomial<T>(std::move(q)), Polynomial<T>(std::move(r))};
}

template <class T>
Polynomial<T> monic(const Polynomial<T>& p) {
  if (p.is_zero()) return p;
  return p * (T(1) / p.leading());
}

// Monic gcd; exact fields only (float remainders never vanish reliably).
template <class T>
Polynomial<T> gcd(Polynomial<T> a, Polynomial<T> b) {
  static_assert(is_exact_v<T>, "polynomial gcd needs exact arithmetic");
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

// Yun's square-free decomposition: p = lc * prod_k factors[k]^(k+1).
// factors[k] is monic and square-free; entries may be the constant 1.
template <class T>
std::vector<Polynomial<T>> squarefree_decomposition(const Polynomial<T>& p) {
  static_assert(is_exact_v<T>, "square-free decomposition needs exact arithmetic");
  std::vector<Polynomial<T>> out;
  if (p.degree() < 1) return out;
  const Polynomial<T> dp = p.derivative();
  Polynomial<T> a = gcd(p, dp);
  Polynomial<T> b = divmod(p, a).first;
  Polynomial<T> c = divmod(dp, a).first;
  Polynomial<T> d = c - b.derivative();
  while (b.degree() >= 1) {
    Polynomial<T> f = gcd(b, d);
    out.push_back(monic(f));
    b = divmod(b, f).first;
    c = divmod(d, f).first;
    d = c - b.derivative();
  }
  return out;
}

template <class U, class T, class F>
Polynomial<U> map_coeffs(const Polynomial<T>& p, F&& f) {
  std::vector<U> c;
  c.reserve(p.coeffs().size());
  for (const auto& v : p.coeffs()) c.push_back(f(v));
  return Polynomial<U>(std::move(c));
}

template <class T>
Polynomial<cext> to_cext_poly(const Polynomial<T>& p) {
  return map_coeffs<cext>(p, [](const T& v) { return to_cext(v); });
}

// Sum of |c_k| |x|^k, the natural scale for a residual |P(x)|.
template <class T>
ext evaluation_scale(const Polynomial<T>& p, ext absx) {
  ext acc = 0, pw = 1;
  for (const auto& v : p.coeffs()) {
    acc += magnitude(v) * pw;
    pw *= absx;
  }
  return acc;
}

}  // namespace epkit
