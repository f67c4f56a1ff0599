#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "epkit/dense.hpp"
#include "epkit/tridiagonal.hpp"

namespace epkit::models {

// ---- boundary couplings z ----

// z = 1 / (1 - beta h - i alpha h); h is an inessential scale, default 1.
struct Robin {
  double alpha = 0;
  double beta = 0;
  double h = 1;
};
// z = i sqrt(1 - r^2)
struct Circle {
  double r = 0;
};
// z = y + i sqrt(1 - r^2)
struct ShiftedCircle {
  double y = 0;
  double r = 0;
};
struct Explicit {
  cdouble z;
};
using ZParam = std::variant<Robin, Circle, ShiftedCircle, Explicit>;

// Principal complex square root: |r| > 1 yields a real shift of z.
cdouble z_value(const ZParam& p);
cext z_value_ext(const ZParam& p);
// |r| <= 1 for the circle forms (sqrt(1 - r^2) real); Robin/Explicit always.
bool in_model(const ZParam& p);
// Replaces r in the circle forms; Robin/Explicit are returned unchanged.
ZParam with_r(const ZParam& p, double r);

// ---- model families ----

struct HermitianDemo {
  int n = 4;
  std::uint64_t seed = 1;
};
struct Epn {
  int n = 6;
};
struct BoundaryControlled {
  int n = 6;
  ZParam coupling = ShiftedCircle{};
};
using ModelSpec = std::variant<HermitianDemo, Epn, BoundaryControlled>;

int dimension(const ModelSpec& m);
std::string describe(const ModelSpec& m);

// sigma(t) = 8 sqrt(1 - tau^2), tau(t) = 1 - t; principal root outside [0, 2].
template <class R>
std::complex<R> epn_sigma(R t) {
  const R tau = R(1) - t;
  return R(8) * std::sqrt(std::complex<R>(R(1) - tau * tau, R(0)));
}

// diag_k = (2k - n + 1) + sigma(t), sup_k = +sqrt((k+1)(n-k-1)) tau,
// sub_k = -sqrt((k+1)(n-k-1)) tau.
template <class R>
Tridiagonal<std::complex<R>> epn_matrix(int n, R t);
// Same similarity class with couplings -(k+1)(n-k-1) tau^2 formed directly,
// so they are exact integers times tau^2 rather than products of roots.
template <class R>
ReducedTridiagonal<std::complex<R>> epn_reduced(int n, R t);
// Exact form for rational tau and sigma (e.g. t = 0: tau = 1, sigma = 0).
ReducedTridiagonal<Rational> epn_reduced_exact(int n, const Rational& tau, const Rational& sigma);

// Discrete Laplacian 2 on the diagonal, -1 off it, corners 2 - z, 2 - conj(z).
template <class R>
Tridiagonal<std::complex<R>> bc_matrix(int n, std::complex<R> z);
Tridiagonal<QComplex> bc_matrix_exact(int n, const QComplex& z);

struct HermitianPencil {
  DenseMatrix a;
  DenseMatrix b;
};
// A, B Hermitised standard complex Gaussian draws from mt19937_64(seed).
HermitianPencil hermitian_pencil(int n, std::uint64_t seed);
// A + t B
DenseMatrix hermitian_demo(int n, double t, std::uint64_t seed);
// Dense standard complex Gaussian matrix (E|g|^2 = 1), same generator.
DenseMatrix gaussian_matrix(int n, std::uint64_t seed);

// Dense matrix at parameter value `param`: t for HermitianDemo and Epn, r for
// the circle couplings of BoundaryControlled.
DenseMatrix dense_at(const ModelSpec& m, double param);
// Tridiagonal realisation (Epn, BoundaryControlled only).
std::optional<Tridiagonal<cext>> tridiagonal_at(const ModelSpec& m, ext param);
std::optional<ReducedTridiagonal<cext>> reduced_at(const ModelSpec& m, ext param);

extern template Tridiagonal<cdouble> epn_matrix<double>(int, double);
extern template Tridiagonal<cext> epn_matrix<ext>(int, ext);
extern template ReducedTridiagonal<cdouble> epn_reduced<double>(int, double);
extern template ReducedTridiagonal<cext> epn_reduced<ext>(int, ext);
extern template Tridiagonal<cdouble> bc_matrix<double>(int, cdouble);
extern template Tridiagonal<cext> bc_matrix<ext>(int, cext);

}  // namespace epkit::models
