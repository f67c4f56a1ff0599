#pragma once

#include <string>
#include <vector>

#include "epkit/polynomial.hpp"

namespace epkit {

// Determinant of a square row-major matrix.  Exact fields use Bareiss
// fraction-free elimination; floating fields use partial pivoting.
template <class T>
T determinant(std::vector<std::vector<T>> a) {
  const std::size_t n = a.size();
  if (n == 0) return T(1);
  if constexpr (is_exact_v<T>) {
    T sign(1), prev(1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (is_zero(a[k][k])) {
        std::size_t piv = k + 1;
        while (piv < n && is_zero(a[piv][k])) ++piv;
        if (piv == n) return T(0);
        std::swap(a[k], a[piv]);
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        a[i][k] = T(0);
      }
      prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
  } else {
    T det(1);
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (magnitude(a[i][k]) > magnitude(a[piv][k])) piv = i;
      if (is_zero(a[piv][k])) return T(0);
      if (piv != k) {
        std::swap(a[k], a[piv]);
        det = -det;
      }
      det *= a[k][k];
      for (std::size_t i = k + 1; i < n; ++i) {
        const T f = a[i][k] / a[k][k];
        for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
      }
    }
    return det;
  }
}

// Sylvester matrix of P (degree m) and Q (degree n): n shifted rows of P's
// coefficients followed by m shifted rows of Q's, highest degree first.
template <class T>
std::vector<std::vector<T>> sylvester_matrix(const Polynomial<T>& p, const Polynomial<T>& q) {
  const int m = p.degree(), n = q.degree();
  const std::size_t size = static_cast<std::size_t>(m + n);
  std::vector<std::vector<T>> s(size, std::vector<T>(size, T(0)));
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + k)] = p.coeff(m - k);
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + k)] = q.coeff(n - k);
  return s;
}

// Res(P, Q) = lc(P)^deg(Q) * prod_i Q(alpha_i) over the roots alpha_i of P,
// i.e. the Sylvester determinant.  Vanishes iff P and Q share a root; in
// floating tiers "vanishes" means small relative to the product of the
// coefficient norms.
template <class T>
T resultant(const Polynomial<T>& p, const Polynomial<T>& q) {
  if (p.degree() < 1 || q.degree() < 1) throw std::domain_error("resultant: both degrees must be at least 1");
  return determinant(sylvester_matrix(p, q));
}

// disc(P) = Res(P, P') / lc(P); the sign factor (-1)^(n(n-1)/2) of some
// texts is deliberately not applied.
template <class T>
T discriminant(const Polynomial<T>& p) {
  if (p.degree() < 2) {
    if (p.degree() == 1) return T(1);
    throw std::domain_error("discriminant: degree must be at least 1");
  }
  return resultant(p, p.derivative()) / p.leading();
}

// P(E; p) = A(E) + p B(E) with deg B < deg A.
template <class T>
struct BivariateSecular {
  Polynomial<T> A;
  Polynomial<T> B;
  std::string parameter = "p";

  BivariateSecular() = default;
  BivariateSecular(Polynomial<T> a, Polynomial<T> b, std::string name = "p")
      : A(std::move(a)), B(std::move(b)), parameter(std::move(name)) {
    if (A.degree() < 1) throw std::invalid_argument("BivariateSecular: A must have degree >= 1");
    if (B.degree() >= A.degree()) throw std::invalid_argument("BivariateSecular: deg B must be below deg A");
  }

  Polynomial<T> at(const T& p) const { return A + B * p; }
};

// Newton interpolation through (x_k, y_k).
template <class T>
Polynomial<T> interpolate(const std::vector<T>& x, std::vector<T> y) {
  const std::size_t n = x.size();
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      y[i] = (y[i] - y[i - 1]) / (x[i] - x[i - j]);
      if (i == j) break;
    }
  Polynomial<T> acc = Polynomial<T>::constant(y[n - 1]);
  for (std::size_t k = n - 1; k-- > 0;) acc = acc * Polynomial<T>::linear_root(x[k]) + Polynomial<T>::constant(y[k]);
  return acc;
}

// D(p) = disc_E P(E; p).  The Sylvester matrix of P and dP/dE has size
// 2n-1 with entries at most linear in p, so D has degree <= 2n-1 and is
// recovered exactly from 2n evaluations at p = 0, 1, ..., 2n-1.
template <class T>
Polynomial<T> discriminant_in_E(const BivariateSecular<T>& s) {
  const int n = s.A.degree();
  std::vector<T> xs, ys;
  for (int k = 0; k < 2 * n; ++k) {
    const T pk(k);
    xs.push_back(pk);
    ys.push_back(discriminant(s.at(pk)));
  }
  return interpolate(xs, ys);
}

}  // namespace epkit
