#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "epkit/polynomial.hpp"

namespace epkit {

// Complex (or exact) tridiagonal matrix: diag[0..n), sup[k] = M(k, k+1),
// sub[k] = M(k+1, k).
template <class T>
struct Tridiagonal {
  std::vector<T> diag;
  std::vector<T> sup;
  std::vector<T> sub;

  Tridiagonal() = default;
  Tridiagonal(std::vector<T> d, std::vector<T> up, std::vector<T> lo)
      : diag(std::move(d)), sup(std::move(up)), sub(std::move(lo)) {
    if (diag.empty()) throw std::invalid_argument("Tridiagonal: dimension must be positive");
    if (sup.size() + 1 != diag.size() || sub.size() + 1 != diag.size())
      throw std::invalid_argument("Tridiagonal: off-diagonal lengths must be n-1");
  }

  int size() const { return static_cast<int>(diag.size()); }

  // Exact predicate: diagonal real and sup[k] == conj(sub[k]).
  bool is_hermitian() const {
    for (const auto& d : diag)
      if (!(conj_of(d) == d)) return false;
    for (std::size_t k = 0; k < sup.size(); ++k)
      if (!(sup[k] == conj_of(sub[k]))) return false;
    return true;
  }
};

// Similarity-invariant content of a tridiagonal matrix: the diagonal and the
// products coupling[k] = sup[k]*sub[k].  The characteristic polynomial and
// the Jordan structure (when every coupling is nonzero) depend only on these,
// which lets models whose off-diagonals are square roots stay exact.
template <class T>
struct ReducedTridiagonal {
  std::vector<T> diag;
  std::vector<T> coupling;

  int size() const { return static_cast<int>(diag.size()); }
};

template <class T>
ReducedTridiagonal<T> reduce(const Tridiagonal<T>& m) {
  ReducedTridiagonal<T> r;
  r.diag = m.diag;
  r.coupling.reserve(m.sup.size());
  for (std::size_t k = 0; k < m.sup.size(); ++k) r.coupling.push_back(m.sup[k] * m.sub[k]);
  return r;
}

// det(T - E I) through the leading-minor recurrence
//   D_k = (d_k - E) D_{k-1} - c_{k-1} D_{k-2},  D_0 = 1, D_{-1} = 0.
// Exact whenever T is exact; the leading coefficient is (-1)^n.
template <class T>
Polynomial<T> charpoly_tridiag(const ReducedTridiagonal<T>& m) {
  if (m.diag.empty()) throw std::invalid_argument("charpoly_tridiag: empty matrix");
  if (m.coupling.size() + 1 != m.diag.size())
    throw std::invalid_argument("charpoly_tridiag: coupling length must be n-1");
  Polynomial<T> prev2;                               // D_{-1}
  Polynomial<T> prev1 = Polynomial<T>::constant(T(1));  // D_0
  for (std::size_t k = 0; k < m.diag.size(); ++k) {
    Polynomial<T> lin({m.diag[k], T(-1)});
    Polynomial<T> cur = lin * prev1;
    if (k > 0) cur -= prev2 * m.coupling[k - 1];
    prev2 = std::move(prev1);
    prev1 = std::move(cur);
  }
  return prev1;
}

template <class T>
Polynomial<T> charpoly_tridiag(const Tridiagonal<T>& m) {
  return charpoly_tridiag(reduce(m));
}

}  // namespace epkit
