#include "epkit/dense.hpp"

#include <Eigen/Eigenvalues>

namespace epkit {

template <class R>
Polynomial<std::complex<R>> charpoly_dense(const DenseMatrixT<R>& m) {
  using C = std::complex<R>;
  using P = Polynomial<C>;
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.cols() != m.rows()) throw std::invalid_argument("charpoly_dense: matrix must be square and nonempty");
  DenseMatrixT<R> h;
  if (n <= 2) {
    h = m;
  } else {
    Eigen::HessenbergDecomposition<DenseMatrixT<R>> hd(m);
    h = hd.matrixH();
  }
  auto H = [&](int i1, int j1) { return h(i1 - 1, j1 - 1); };  // 1-based access
  std::vector<P> p;
  p.reserve(static_cast<std::size_t>(n) + 1);
  p.push_back(P::constant(C(1)));
  for (int k = 1; k <= n; ++k) {
    P cur = P({H(k, k), C(-1)}) * p[static_cast<std::size_t>(k - 1)];
    C prod(1);
    for (int i = k - 1; i >= 1; --i) {
      prod *= H(i + 1, i);
      cur -= p[static_cast<std::size_t>(i - 1)] * (H(i, k) * prod);
    }
    p.push_back(std::move(cur));
  }
  return p.back();
}

template Polynomial<std::complex<double>> charpoly_dense<double>(const DenseMatrix&);
template Polynomial<cext> charpoly_dense<ext>(const DenseMatrixExt&);

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::from_reduced(const ReducedTridiagonal<Rational>& t) {
  const int n = t.size();
  RationalMatrix m(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = t.diag[static_cast<std::size_t>(k)];
  for (int k = 0; k + 1 < n; ++k) {
    const Rational& c = t.coupling[static_cast<std::size_t>(k)];
    // A zero coupling decouples the blocks; keep both off-diagonals zero.
    m(k, k + 1) = (c == 0) ? Rational(0) : Rational(1);
    m(k + 1, k) = c;
  }
  return m;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("RationalMatrix: shape mismatch");
  RationalMatrix r(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const Rational& aik = a(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

RationalMatrix RationalMatrix::shifted(const Rational& s) const {
  RationalMatrix r = *this;
  for (int i = 0; i < std::min(rows_, cols_); ++i) r(i, i) -= s;
  return r;
}

int RationalMatrix::rank() const {
  RationalMatrix w = *this;
  int rank = 0;
  for (int col = 0; col < cols_ && rank < rows_; ++col) {
    int piv = -1;
    for (int i = rank; i < rows_; ++i)
      if (w(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int j = 0; j < cols_; ++j) std::swap(w(piv, j), w(rank, j));
    for (int i = rank + 1; i < rows_; ++i) {
      if (w(i, col) == 0) continue;
      const Rational f = w(i, col) / w(rank, col);
      for (int j = col; j < cols_; ++j) w(i, j) -= f * w(rank, j);
    }
    ++rank;
  }
  return rank;
}

Rational RationalMatrix::determinant() const {
  if (rows_ != cols_) throw std::invalid_argument("RationalMatrix: determinant of non-square matrix");
  RationalMatrix w = *this;
  Rational det = 1;
  for (int col = 0; col < cols_; ++col) {
    int piv = -1;
    for (int i = col; i < rows_; ++i)
      if (w(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      for (int j = 0; j < cols_; ++j) std::swap(w(piv, j), w(col, j));
      det = -det;
    }
    det *= w(col, col);
    for (int i = col + 1; i < rows_; ++i) {
      if (w(i, col) == 0) continue;
      const Rational f = w(i, col) / w(col, col);
      for (int j = col; j < cols_; ++j) w(i, j) -= f * w(col, j);
    }
  }
  return det;
}

}  // namespace epkit
