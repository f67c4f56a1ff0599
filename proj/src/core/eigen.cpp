#include "epkit/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace epkit {

std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  // O(n^3) shortest augmenting path formulation, 1-based potentials.
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0), v(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> perm(static_cast<std::size_t>(n), 0);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0) perm[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return perm;
}

template <class R>
std::vector<std::complex<R>> eigenvalues(const DenseMatrixT<R>& m) {
  Eigen::ComplexEigenSolver<DenseMatrixT<R>> es(m, false);
  if (es.info() != Eigen::Success) throw NonConvergenceError("eigenvalues: QR iteration did not converge");
  std::vector<std::complex<R>> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

template <class R>
EigenDecomposition<R> eig_dense(const DenseMatrixT<R>& m) {
  using C = std::complex<R>;
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.rows() != m.cols()) throw std::invalid_argument("eig_dense: matrix must be square and nonempty");
  if (!m.allFinite()) throw std::invalid_argument("eig_dense: non-finite entries");

  Eigen::ComplexEigenSolver<DenseMatrixT<R>> rs(m, true);
  Eigen::ComplexEigenSolver<DenseMatrixT<R>> ls(m.adjoint(), true);
  if (rs.info() != Eigen::Success || ls.info() != Eigen::Success)
    throw NonConvergenceError("eig_dense: QR iteration did not converge");

  EigenDecomposition<R> d;
  d.values.assign(rs.eigenvalues().data(), rs.eigenvalues().data() + n);
  d.right = rs.eigenvectors();
  for (int k = 0; k < n; ++k) d.right.col(k).normalize();

  // Pair left vectors (eigenvectors of M^H at conj(l)) with right ones.
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          static_cast<double>(std::abs(d.values[static_cast<std::size_t>(i)] - std::conj(ls.eigenvalues()(j))));
  const auto perm = min_cost_assignment(cost);

  const R mnorm = std::max(m.norm(), std::numeric_limits<R>::min());
  const R eps = std::numeric_limits<R>::epsilon();
  d.left.resize(n, n);
  d.condition.assign(static_cast<std::size_t>(n), R(0));
  d.low_confidence.assign(static_cast<std::size_t>(n), false);
  for (int k = 0; k < n; ++k) {
    DenseVectorT<R> y = ls.eigenvectors().col(perm[static_cast<std::size_t>(k)]);
    y.normalize();
    const C overlap = y.dot(d.right.col(k));  // y^H x
    const R ov = std::abs(overlap);
    d.condition[static_cast<std::size_t>(k)] = ov > 0 ? R(1) / ov : std::numeric_limits<R>::infinity();
    if (ov > std::sqrt(eps)) {
      y /= std::conj(overlap);
    } else {
      d.low_confidence[static_cast<std::size_t>(k)] = true;
    }
    d.left.col(k) = y;
  }
  for (int k = 0; k < n; ++k) {
    const C lam = d.values[static_cast<std::size_t>(k)];
    const R rr = (m * d.right.col(k) - lam * d.right.col(k)).norm() / mnorm;
    const R rl = (m.adjoint() * d.left.col(k) - std::conj(lam) * d.left.col(k)).norm() /
                 (mnorm * std::max(d.left.col(k).norm(), std::numeric_limits<R>::min()));
    d.residual_right = std::max(d.residual_right, rr);
    d.residual_left = std::max(d.residual_left, rl);
    if (d.condition[static_cast<std::size_t>(k)] > R(1e8) || rr > R(1e3) * R(n) * eps) d.low_confidence[static_cast<std::size_t>(k)] = true;
  }
  return d;
}

EigenDecomposition<ext> eig_dense(const DenseMatrix& m, Precision tier) {
  if (tier == Precision::Extended) return eig_dense<ext>(widen<ext, double>(m));
  const auto d = eig_dense<double>(m);
  EigenDecomposition<ext> out;
  for (const auto& v : d.values) out.values.push_back(to_cext(v));
  out.right = widen<ext, double>(d.right);
  out.left = widen<ext, double>(d.left);
  for (double c : d.condition) out.condition.push_back(c);
  out.low_confidence = d.low_confidence;
  out.residual_right = d.residual_right;
  out.residual_left = d.residual_left;
  return out;
}

template EigenDecomposition<double> eig_dense<double>(const DenseMatrix&);
template EigenDecomposition<ext> eig_dense<ext>(const DenseMatrixExt&);
template std::vector<cdouble> eigenvalues<double>(const DenseMatrix&);
template std::vector<cext> eigenvalues<ext>(const DenseMatrixExt&);

}  // namespace epkit
