#pragma once

// Independent reference computations used only by the test suites.

#include <functional>
#include <random>
#include <vector>

#include "epkit/polynomial.hpp"

namespace oracle {

using epkit::Polynomial;
using epkit::Rational;

// Laplace expansion along the first row; entries are polynomials in E.
inline Polynomial<Rational> cofactor_det(const std::vector<std::vector<Polynomial<Rational>>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  Polynomial<Rational> acc;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j].is_zero()) continue;
    std::vector<std::vector<Polynomial<Rational>>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Polynomial<Rational>> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(std::move(row));
    }
    Polynomial<Rational> term = a[0][j] * cofactor_det(minor);
    if (j % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

// det(M - E I) by cofactor expansion for an exact dense matrix.
inline Polynomial<Rational> cofactor_charpoly(const std::vector<std::vector<Rational>>& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<Polynomial<Rational>>> a(n, std::vector<Polynomial<Rational>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j)
        a[i][j] = Polynomial<Rational>({m[i][j], Rational(-1)});
      else
        a[i][j] = Polynomial<Rational>::constant(m[i][j]);
    }
  return cofactor_det(a);
}

// All sign-change roots of f on a uniform grid, refined by bisection.
inline std::vector<double> bisection_roots(const std::function<double(double)>& f, double lo, double hi, int grid) {
  std::vector<double> out;
  double a = lo, fa = f(lo);
  for (int k = 1; k <= grid; ++k) {
    const double b = lo + (hi - lo) * k / grid;
    const double fb = f(b);
    if (fa == 0) out.push_back(a);
    if (fa * fb < 0) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (x0 + x1);
        const double fm = f(m);
        if ((fm < 0) == (f0 < 0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      out.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return out;
}

inline Rational random_rational(std::mt19937_64& g, int range = 9, int den = 7) {
  std::uniform_int_distribution<int> num(-range, range), d(1, den);
  return Rational(num(g), d(g));
}

}  // namespace oracle
