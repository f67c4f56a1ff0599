#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "epkit/polynomial.hpp"
#include "epkit/tridiagonal.hpp"

namespace epkit {

template <class R>
using DenseMatrixT = Eigen::Matrix<std::complex<R>, Eigen::Dynamic, Eigen::Dynamic>;
template <class R>
using DenseVectorT = Eigen::Matrix<std::complex<R>, Eigen::Dynamic, 1>;

using DenseMatrix = DenseMatrixT<double>;
using DenseMatrixExt = DenseMatrixT<ext>;
using DenseVector = DenseVectorT<double>;

template <class R>
DenseMatrixT<R> to_dense(const Tridiagonal<std::complex<R>>& t) {
  const int n = t.size();
  DenseMatrixT<R> m = DenseMatrixT<R>::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = t.diag[static_cast<std::size_t>(k)];
  for (int k = 0; k + 1 < n; ++k) {
    m(k, k + 1) = t.sup[static_cast<std::size_t>(k)];
    m(k + 1, k) = t.sub[static_cast<std::size_t>(k)];
  }
  return m;
}

template <class To, class From>
DenseMatrixT<To> widen(const DenseMatrixT<From>& m) {
  return m.template cast<std::complex<To>>();
}

// det(M - E I) for a general dense matrix: Householder reduction to upper
// Hessenberg form followed by the Hessenberg minor recurrence.
template <class R>
Polynomial<std::complex<R>> charpoly_dense(const DenseMatrixT<R>& m);

extern template Polynomial<std::complex<double>> charpoly_dense<double>(const DenseMatrix&);
extern template Polynomial<cext> charpoly_dense<ext>(const DenseMatrixExt&);

// Small exact matrix, used for rank computations that must not round.
class RationalMatrix {
 public:
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols)) {}
  static RationalMatrix identity(int n);
  // Realisation with unit superdiagonal and sub = coupling; similar to any
  // tridiagonal with these couplings when they are all nonzero.
  static RationalMatrix from_reduced(const ReducedTridiagonal<Rational>& t);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  RationalMatrix shifted(const Rational& s) const;  // this - s I

  int rank() const;
  Rational determinant() const;

 private:
  int rows_, cols_;
  std::vector<Rational> a_;
};

template <class R>
R frobenius_norm(const DenseMatrixT<R>& m) {
  return m.norm();
}

}  // namespace epkit
