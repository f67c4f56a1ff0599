#include <doctest.h>

#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <random>

#include "epkit/eigen.hpp"
#include "epkit/errors.hpp"
#include "epkit/metric.hpp"
#include "epkit/models.hpp"

using namespace epkit;
using namespace epkit::metric;

namespace {

DenseVector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  DenseVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cdouble(g(rng), g(rng));
  return v;
}

std::vector<double> random_kappa(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.1, 10);
  std::vector<double> k;
  for (int i = 0; i < n; ++i) k.push_back(u(rng));
  return k;
}

// Quasi-Hermitian by construction: S diag(real, well separated) S^{-1}.
DenseMatrix random_quasi_hermitian(std::mt19937_64& rng, int n) {
  const DenseMatrix s = models::gaussian_matrix(n, rng()) + 2.0 * DenseMatrix::Identity(n, n);
  DenseMatrix d = DenseMatrix::Zero(n, n);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (int i = 0; i < n; ++i) d(i, i) = i + jitter(rng);
  return s * d * s.inverse();
}

DenseMatrix random_model_matrix(std::mt19937_64& rng, int draw) {
  std::uniform_real_distribution<double> ut(0.05, 1);
  std::uniform_int_distribution<int> un(2, 7);
  switch (draw % 3) {
    case 0: return models::dense_at(models::Epn{un(rng)}, ut(rng));
    case 1: return models::hermitian_demo(un(rng), ut(rng), rng());
    default: return random_quasi_hermitian(rng, un(rng));
  }
}

}  // namespace

TEST_CASE("biorthogonal basis of a Hermitian matrix is unitary with Y = X") {
  const DenseMatrix h = models::hermitian_demo(5, 0.3, 4);
  const auto b = biorthogonal_basis(h);
  CHECK((b.right.adjoint() * b.right - DenseMatrix::Identity(5, 5)).norm() <= 1e-12);
  CHECK((b.left - b.right).norm() <= 1e-12);
  CHECK(b.cond == doctest::Approx(1).epsilon(1e-12));
  CHECK_FALSE(b.ill_conditioned);
}

TEST_CASE("biorthogonal basis of epn(6, 0.5) satisfies the eigen equations") {
  const DenseMatrix m = models::dense_at(models::Epn{6}, 0.5);
  const auto b = biorthogonal_basis(m);
  DenseMatrix lam = DenseMatrix::Zero(6, 6);
  for (int k = 0; k < 6; ++k) lam(k, k) = b.values[static_cast<std::size_t>(k)];
  CHECK((m * b.right - b.right * lam).norm() <= 1e-12 * m.norm());
  CHECK((m.adjoint() * b.left - b.left * lam.adjoint()).norm() <= 1e-10 * m.norm() * b.left.norm());
  CHECK(b.biorthogonality_error <= 1e-8);
  CHECK(std::isfinite(b.cond));
  CHECK(b.cond > 1);
  CHECK_FALSE(b.ill_conditioned);
}

TEST_CASE("biorthogonal basis near the EPN is flagged or refused") {
  const DenseMatrix m = models::dense_at(models::Epn{6}, 1e-6);
  bool flagged = false;
  try {
    flagged = biorthogonal_basis(m).ill_conditioned;
  } catch (const DegenerateBasisError& e) {
    flagged = std::string(e.what()).find("basis degenerate") != std::string::npos;
  }
  CHECK(flagged);

  // The condition number grows toward t = 0.
  double prev = 0;
  for (double t : {0.5, 0.2, 0.1, 0.05, 0.02}) {
    const double c = biorthogonal_basis(models::dense_at(models::Epn{6}, t)).cond;
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("planted double eigenvalue raises a degenerate-basis error naming it") {
  DenseMatrix d = DenseMatrix::Zero(3, 3);
  d(0, 0) = 1.5;
  d(1, 1) = 1.5;
  d(2, 2) = 3;
  try {
    biorthogonal_basis(d);
    FAIL("expected DegenerateBasisError");
  } catch (const DegenerateBasisError& e) {
    CHECK(std::string(e.what()).find("1.5") != std::string::npos);
  }
  CHECK_THROWS_AS(build_metric(d), DegenerateBasisError);
}

TEST_CASE("build_metric: trivial cases give the identity") {
  const DenseMatrix h = models::hermitian_demo(4, -0.2, 1);
  CHECK((build_metric(h).theta() - DenseMatrix::Identity(4, 4)).norm() <= 1e-12);
  const auto diag = build_metric(models::dense_at(models::Epn{6}, 1));
  CHECK((diag.theta() - DenseMatrix::Identity(6, 6)).norm() == 0.0);
  CHECK(diag.min_eig() == doctest::Approx(1));
  CHECK(diag.normalized_min_eig() == doctest::Approx(1 / std::sqrt(6.0)));
}

TEST_CASE("build_metric: epn(6, 0.5) satisfies the quasi-Hermiticity relation") {
  const DenseMatrix m = models::dense_at(models::Epn{6}, 0.5);
  const auto mo = build_metric(m);
  const DenseMatrix& th = mo.theta();
  // Both sides evaluated directly.
  const DenseMatrix lhs = m.adjoint() * th, rhs = th * m;
  CHECK((lhs - rhs).norm() <= 1e-10 * m.norm() * th.norm());
  CHECK(mo.relative_residual() <= 1e-10);
  CHECK(mo.min_eig() > 0);
  CHECK((th - th.adjoint()).norm() <= 1e-12 * th.norm());
  CHECK(mo.kappa() == std::vector<double>(6, 1.0));
}

TEST_CASE("build_metric refuses a complex spectrum and names the eigenvalues") {
  const DenseMatrix m = models::dense_at(models::Epn{6}, -0.2);
  try {
    build_metric(m);
    FAIL("expected DomainError");
  } catch (const DegenerateBasisError&) {
    FAIL("wrong error kind");
  } catch (const DomainError& e) {
    const std::string what = e.what();
    CHECK(what.find("complex") != std::string::npos);
    CHECK(what.find("i") != std::string::npos);
  }
  CHECK_THROWS_AS(build_metric(DenseMatrix::Identity(3, 3) * 2.0 + models::gaussian_matrix(3, 1)), DomainError);
}

TEST_CASE("build_metric validates kappa") {
  const DenseMatrix m = models::dense_at(models::Epn{4}, 0.5);
  CHECK_THROWS_AS(build_metric(m, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(build_metric(m, {1, 2, 0, 4}), std::invalid_argument);
  CHECK_THROWS_AS(build_metric(m, {1, 2, -3, 4}), std::invalid_argument);
  CHECK_NOTHROW(build_metric(m, {1, 2, 3, 4}));
}

TEST_CASE("metric family separation") {
  const DenseMatrix m = models::dense_at(models::Epn{6}, 0.5);
  const std::vector<double> ones(6, 1.0), twos(6, 2.0), ramp{1, 2, 3, 4, 5, 6};
  CHECK(metric_family_distinct(m, ramp, {2, 4, 6, 8, 10, 12}) <= 1e-12);
  CHECK(metric_family_distinct(m, ones, twos) <= 1e-12);
  CHECK(metric_family_distinct(m, ones, ramp) > 1e-3);
  const DenseMatrix h = models::hermitian_demo(4, 0.1, 2);
  CHECK(metric_family_distinct(h, std::vector<double>(4, 1.0), std::vector<double>(4, 3.0)) <= 1e-12);
}

TEST_CASE("conditioning sweep on Epn{6} decreases strictly toward the EP") {
  const std::vector<double> grid{0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
  const auto pts = metric_conditioning_sweep(models::Epn{6}, grid);
  REQUIRE(pts.size() == grid.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    REQUIRE(pts[i].ok);
    CHECK(pts[i].min_eig > 0);
    CHECK(pts[i].relative_residual <= 1e-10);
    if (i > 0) {
      CHECK(pts[i].min_eig < pts[i - 1].min_eig);
      CHECK(pts[i].cond > pts[i - 1].cond);
    }
  }
  const auto one = metric_conditioning_sweep(models::Epn{6}, {1.0});
  CHECK(one[0].min_eig == doctest::Approx(1 / std::sqrt(6.0)));
  CHECK(one[0].cond == doctest::Approx(1));
}

TEST_CASE("conditioning sweep records failures as gaps") {
  const auto pts = metric_conditioning_sweep(models::Epn{6}, {0.5, -0.2, 0.0, 0.3});
  CHECK(pts[0].ok);
  CHECK_FALSE(pts[1].ok);
  CHECK_FALSE(pts[1].error.empty());
  CHECK_FALSE(pts[2].ok);
  CHECK(pts[3].ok);
}

TEST_CASE("bc n = 5 at y = -0.19: metric conditioning grows toward the near-merger at r = 0") {
  const std::vector<double> grid{0.5, 0.3, 0.2, 0.1, 0.05, 0.02};
  const auto pts = metric_conditioning_sweep(models::BoundaryControlled{5, models::ShiftedCircle{-0.19, 0}}, grid);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    REQUIRE(pts[i].ok);
    if (i > 0) CHECK(pts[i].cond > pts[i - 1].cond);
  }
  CHECK(pts.back().cond > 20 * pts.front().cond);
}

TEST_CASE("physical inner product") {
  std::mt19937_64 rng(8);
  const auto psi = random_vector(rng, 4), phi = random_vector(rng, 4);
  CHECK(std::abs(physical_inner_product(DenseMatrix::Identity(4, 4), psi, phi) - psi.dot(phi)) <= 1e-14);
  CHECK_THROWS(physical_inner_product(DenseMatrix::Identity(4, 4), psi, random_vector(rng, 3)));

  const DenseMatrix m = models::dense_at(models::Epn{6}, 0.4);
  const auto mo = build_metric(m, {1, 3, 2, 5, 4, 6});
  const auto b = biorthogonal_basis(m);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const cdouble v = physical_inner_product(mo.theta(), b.right.col(i), b.right.col(j));
      if (i == j)
        CHECK(v.real() > 0);
      else
        CHECK(std::abs(v) <= 1e-10 * mo.theta().norm());
    }
}

TEST_CASE("property: positivity, residual, self-adjointness, sesquilinearity over 50 draws") {
  std::mt19937_64 rng(2024);
  for (int draw = 0; draw < 50; ++draw) {
    const DenseMatrix m = random_model_matrix(rng, draw);
    const int n = static_cast<int>(m.rows());
    const auto kappa = random_kappa(rng, n);
    const auto mo = build_metric(m, kappa);
    const DenseMatrix& th = mo.theta();
    CAPTURE(draw);
    CHECK(mo.min_eig() > 0);
    CHECK(mo.residual() <= 1e-10 * m.norm() * th.norm());
    CHECK((th - th.adjoint()).norm() <= 1e-12 * th.norm());

    const auto psi = random_vector(rng, n), phi = random_vector(rng, n);
    const double scale = th.norm() * m.norm() * psi.norm() * phi.norm();
    const cdouble a = physical_inner_product(th, psi, m * phi);
    const cdouble b = physical_inner_product(th, m * psi, phi);
    CHECK(std::abs(a - b) <= 1e-10 * scale);

    CHECK(physical_inner_product(th, psi, psi).real() > 0);
    CHECK(std::abs(physical_inner_product(th, psi, psi).imag()) <= 1e-12 * th.norm() * psi.squaredNorm());
    const cdouble c(0.3, -1.7);
    CHECK(std::abs(physical_inner_product(th, psi, c * phi) - c * physical_inner_product(th, psi, phi)) <=
          1e-12 * scale);
    CHECK(std::abs(physical_inner_product(th, c * psi, phi) - std::conj(c) * physical_inner_product(th, psi, phi)) <=
          1e-12 * scale);
  }
}

TEST_CASE("property: kappa scaling is linear") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uc(0.01, 100);
  for (int draw = 0; draw < 20; ++draw) {
    const DenseMatrix m = random_model_matrix(rng, draw);
    const auto kappa = random_kappa(rng, static_cast<int>(m.rows()));
    const double c = uc(rng);
    auto scaled = kappa;
    for (auto& k : scaled) k *= c;
    const auto a = build_metric(m, kappa), b = build_metric(m, scaled);
    CHECK((b.theta() - c * a.theta()).norm() <= 1e-12 * c * a.theta().norm());
    // Powers of two scale every rounding step exactly.
    auto doubled = kappa;
    for (auto& k : doubled) k *= 2;
    CHECK((build_metric(m, doubled).theta() - 2.0 * a.theta()).norm() == 0.0);
  }
}
