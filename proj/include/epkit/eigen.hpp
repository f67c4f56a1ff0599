#pragma once

#include <vector>

#include "epkit/dense.hpp"
#include "epkit/errors.hpp"

namespace epkit {

// Right and left eigenvectors paired by eigenvalue.  Right vectors have unit
// 2-norm; left vectors are scaled so that y_k^H x_k = 1 whenever that overlap
// is not numerically zero.  condition[k] = 1 / |y_k^H x_k| for unit y_k, x_k
// (the eigenvalue condition number); it diverges at an exceptional point.
template <class R>
struct EigenDecomposition {
  std::vector<std::complex<R>> values;
  DenseMatrixT<R> right;
  DenseMatrixT<R> left;
  std::vector<R> condition;
  std::vector<bool> low_confidence;
  R residual_right = 0;  // max_k ||M x_k - l_k x_k|| / ||M||
  R residual_left = 0;   // max_k ||M^H y_k - conj(l_k) y_k|| / (||M|| ||y_k||)
};

template <class R>
EigenDecomposition<R> eig_dense(const DenseMatrixT<R>& m);

template <class R>
std::vector<std::complex<R>> eigenvalues(const DenseMatrixT<R>& m);

// Runtime-selected tier; results are always returned in extended storage.
EigenDecomposition<ext> eig_dense(const DenseMatrix& m, Precision tier);

extern template EigenDecomposition<double> eig_dense<double>(const DenseMatrix&);
extern template EigenDecomposition<ext> eig_dense<ext>(const DenseMatrixExt&);
extern template std::vector<cdouble> eigenvalues<double>(const DenseMatrix&);
extern template std::vector<cext> eigenvalues<ext>(const DenseMatrixExt&);

// Largest |Im l| / max(1, max |l|); zero for a real spectrum.
template <class R>
R imag_fraction(const std::vector<std::complex<R>>& values) {
  R scale = 1, worst = 0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  for (const auto& v : values) worst = std::max(worst, std::abs(v.imag()));
  return worst / scale;
}

// Minimal-total-displacement assignment (Hungarian algorithm).  Returns
// perm with perm[i] = column matched to row i.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace epkit
