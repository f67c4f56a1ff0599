#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "epkit/eigen.hpp"
#include "epkit/errors.hpp"
#include "epkit/models.hpp"
#include "epkit/roots.hpp"
#include "oracles.hpp"

using namespace epkit;
using namespace epkit::models;

TEST_CASE("epn at t = 1 is diagonal") {
  const auto m = epn_matrix<double>(6, 1.0);
  for (int k = 0; k < 6; ++k) CHECK(m.diag[static_cast<std::size_t>(k)] == cdouble(3 + 2 * k, 0));
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(m.sup[k] == cdouble(0));
    CHECK(m.sub[k] == cdouble(0));
  }
}

TEST_CASE("epn n = 6 reproduces the hard-coded six-level matrix") {
  // Off-diagonal magnitudes sqrt5, 2sqrt2, 3, 2sqrt2, sqrt5 and diagonal
  // -5, -3, ..., 5 shifted by sigma.
  const double mags[5] = {std::sqrt(5.0), 2 * std::sqrt(2.0), 3.0, 2 * std::sqrt(2.0), std::sqrt(5.0)};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const double t = u(rng);
    const double tau = 1 - t;
    const cdouble sigma = 8.0 * std::sqrt(cdouble(1 - tau * tau, 0));
    const auto m = epn_matrix<double>(6, t);
    for (int k = 0; k < 6; ++k)
      CHECK(std::abs(m.diag[static_cast<std::size_t>(k)] - (cdouble(2 * k - 5, 0) + sigma)) <= 1e-14);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(std::abs(m.sup[k] - cdouble(mags[k] * tau, 0)) <= 1e-14);
      CHECK(std::abs(m.sub[k] + cdouble(mags[k] * tau, 0)) <= 1e-14);
    }
  }
}

TEST_CASE("epn coupling products are exact multiples of tau^2") {
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 10; ++n) {
    const Rational tau = oracle::random_rational(rng, 50);
    const auto r = epn_reduced_exact(n, tau, Rational(0));
    for (int k = 0; k + 1 < n; ++k)
      CHECK(r.coupling[static_cast<std::size_t>(k)] == -Rational((k + 1) * (n - k - 1)) * tau * tau);
    // The floating realisation agrees with the exact products.
    const double t = 1 - tau.convert_to<double>();
    const auto m = epn_matrix<double>(n, t);
    for (int k = 0; k + 1 < n; ++k) {
      const double want = r.coupling[static_cast<std::size_t>(k)].convert_to<double>();
      const cdouble got = m.sup[static_cast<std::size_t>(k)] * m.sub[static_cast<std::size_t>(k)];
      CHECK(std::abs(got - want) <= 1e-12 * (1 + std::abs(want)));
    }
  }
}

TEST_CASE("epn spectrum is real and positive for t in (0, 1] and non-real for t < 0") {
  for (int i = 1; i <= 40; ++i) {
    const double t = i / 40.0;
    const auto v = eigenvalues<double>(to_dense(epn_matrix<double>(6, t)));
    CHECK(imag_fraction(v) <= 1e-10);
    for (const auto& e : v) CHECK(e.real() > 0);
  }
  for (int i = 1; i <= 40; ++i) {
    const double t = -i / 40.0;
    const auto v = eigenvalues<double>(to_dense(epn_matrix<double>(6, t)));
    double scale = 1;
    for (const auto& e : v) scale = std::max(scale, std::abs(e));
    for (const auto& e : v) CHECK(std::abs(e.imag()) > 1e-10 * scale);
  }
}

TEST_CASE("bc matrix layout and small spectra") {
  const auto m = bc_matrix<double>(4, cdouble(0.25, 0.5));
  CHECK(m.diag[0] == cdouble(1.75, -0.5));
  CHECK(m.diag[3] == cdouble(1.75, 0.5));
  CHECK(m.diag[1] == cdouble(2, 0));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(m.sup[k] == cdouble(-1, 0));
    CHECK(m.sub[k] == cdouble(-1, 0));
  }

  auto v = eigenvalues<double>(to_dense(bc_matrix<double>(3, cdouble(0))));
  std::sort(v.begin(), v.end(), [](auto a, auto b) { return a.real() < b.real(); });
  const double want[3] = {2 - std::sqrt(2.0), 2, 2 + std::sqrt(2.0)};
  for (int k = 0; k < 3; ++k) CHECK(std::abs(v[static_cast<std::size_t>(k)] - want[k]) <= 1e-12);
}

TEST_CASE("bc n = 6 at z = i: double root 2 plus the quartic roots") {
  const auto rs = poly_roots(charpoly_tridiag(bc_matrix<ext>(6, cext(0, 1))));
  const auto& c2 = rs.nearest_cluster(cext(2, 0));
  CHECK(c2.size == 2);
  CHECK(std::abs(c2.centroid - cext(2, 0)) <= 1e-7L);
  const auto quartic = [](double e) { return (((e - 8) * e + 20) * e - 16) * e + 3; };
  const auto want = oracle::bisection_roots(quartic, -1, 5, 600);
  REQUIRE(want.size() == 4);
  for (double w : want) {
    const auto& c = rs.nearest_cluster(cext(w, 0));
    CHECK(c.size == 1);
    CHECK(std::abs(c.centroid - cext(w, 0)) <= 1e-10L);
  }
}

TEST_CASE("bc matrix is Hermitian iff z is real") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const double im = (trial % 2) ? u(rng) : 0.0;
    const cdouble z(u(rng), im);
    CHECK(bc_matrix<double>(5, z).is_hermitian() == (im == 0.0));
  }
  const auto up = eigenvalues<double>(to_dense(bc_matrix<double>(6, z_value(Circle{1.0}))));
  CHECK(imag_fraction(up) <= 1e-12);
}

TEST_CASE("z parameterisations") {
  CHECK(z_value(Robin{0, 0, 1}) == cdouble(1, 0));
  CHECK(std::abs(z_value(Robin{1, 0.5, 1}) - 1.0 / cdouble(0.5, -1)) <= 1e-15);
  CHECK_THROWS_AS(z_value(Robin{0, 1, 1}), DomainError);
  CHECK(z_value(Circle{0}) == cdouble(0, 1));
  CHECK(z_value(ShiftedCircle{-0.5, 1}) == cdouble(-0.5, 0));
  // |r| > 1: the principal root makes sqrt(1 - r^2) imaginary, so z is real.
  const cdouble outside = z_value(Circle{2});
  CHECK(std::abs(outside.imag()) <= 1e-15);
  CHECK(std::abs(std::abs(outside.real()) - std::sqrt(3.0)) <= 1e-14);
  CHECK(in_model(Circle{0.9}));
  CHECK_FALSE(in_model(ShiftedCircle{0, 1.5}));
  CHECK(in_model(Robin{3, 4, 1}));
}

TEST_CASE("hermitian demo is Hermitian, reproducible, and A at t = 0") {
  const auto p = hermitian_pencil(4, 1);
  CHECK((p.a - p.a.adjoint()).norm() == 0.0);
  CHECK((p.b - p.b.adjoint()).norm() == 0.0);
  CHECK(hermitian_demo(4, 0.0, 1) == p.a);
  const auto m1 = hermitian_demo(4, 0.37, 1);
  const auto m2 = hermitian_demo(4, 0.37, 1);
  CHECK(std::memcmp(m1.data(), m2.data(), sizeof(cdouble) * 16) == 0);
  CHECK(hermitian_demo(4, 0.37, 2) != m1);
  CHECK_THROWS(hermitian_demo(1, 0.0, 1));
}

TEST_CASE("hermitian demo stays real with a positive gap over t in [-1, 1]") {
  double min_gap = 1e300, worst_imag = 0;
  for (int i = 0; i < 2001; ++i) {
    const double t = -1 + 2.0 * i / 2000;
    auto v = eigenvalues<double>(hermitian_demo(4, t, 1));
    worst_imag = std::max(worst_imag, imag_fraction(v));
    std::sort(v.begin(), v.end(), [](auto a, auto b) { return a.real() < b.real(); });
    for (std::size_t k = 1; k < v.size(); ++k) min_gap = std::min(min_gap, v[k].real() - v[k - 1].real());
  }
  CHECK(worst_imag <= 1e-12);
  CHECK(min_gap > 0);
}

TEST_CASE("dense_at and the tridiagonal views agree") {
  const ModelSpec epn = Epn{6};
  const ModelSpec bc = BoundaryControlled{5, ShiftedCircle{-0.3, 0.4}};
  CHECK((dense_at(epn, 0.3) - to_dense(epn_matrix<double>(6, 0.3))).norm() == 0.0);
  const auto t = tridiagonal_at(bc, 0.4L);
  REQUIRE(t.has_value());
  CHECK((dense_at(bc, 0.4) - to_dense(*t).cast<cdouble>()).norm() <= 1e-15);
  CHECK_FALSE(tridiagonal_at(HermitianDemo{4, 1}, 0).has_value());
  CHECK(dimension(bc) == 5);
  CHECK(describe(epn) == "epn(n=6)");
  CHECK_THROWS(epn_matrix<double>(1, 0.5));
}
