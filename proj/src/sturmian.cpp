#include "epkit/sturmian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epkit/eigen.hpp"
#include "epkit/models.hpp"
#include "epkit/parallel.hpp"
#include "epkit/roots.hpp"

namespace epkit::sturmian {

namespace {

Polynomial<Rational> real_part(const Polynomial<QComplex>& p) {
  std::vector<Rational> c;
  for (const auto& v : p.coeffs()) {
    if (v.im != 0) throw std::logic_error("secular polynomial has a non-real coefficient");
    c.push_back(v.re);
  }
  return Polynomial<Rational>(std::move(c));
}

Polynomial<Rational> exact_quotient(const Polynomial<Rational>& a, const Polynomial<Rational>& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw std::logic_error("inexact polynomial quotient");
  return q;
}

std::vector<RealRoot> roots_of(const Polynomial<Rational>& p, double lo, double hi) {
  if (p.degree() < 1) return {};
  return real_roots_in(p, lo, hi);
}

// Cauchy bound on the real roots of the secular polynomials.
double root_bound(const Polynomial<Rational>& p) {
  if (p.degree() < 1) return 1;
  Rational m = 0;
  for (int k = 0; k < p.degree(); ++k) m = std::max(m, Rational(boost::multiprecision::abs(p.coeff(k) / p.leading())));
  return 1 + m.convert_to<double>();
}

}  // namespace

const char* to_string(BranchPoint::Kind k) {
  switch (k) {
    case BranchPoint::Kind::ZeroOfR: return "zero-of-r";
    case BranchPoint::Kind::PoleOfR: return "pole-of-r";
    case BranchPoint::Kind::BranchMerge: return "branch-merge";
    case BranchPoint::Kind::Indeterminate: return "indeterminate";
  }
  return "?";
}

SturmianFunction bivariate_secular(int n, double y) {
  if (!std::isfinite(y)) throw std::invalid_argument("bivariate_secular: y must be finite");
  return bivariate_secular(n, exact_from_double(y));
}

SturmianFunction bivariate_secular(int n, const Rational& y) {
  if (n < 2) throw std::invalid_argument("model dimension must be at least 2");
  // z z* = y^2 + 1 - r^2 and the corners enter multilinearly, so two exact
  // evaluations fix A and B: r^2 = 0 (z = y + i) and r^2 = 1 (z = y).
  const auto p0 = real_part(charpoly_tridiag(models::bc_matrix_exact(n, QComplex(y, 1))));
  const auto p1 = real_part(charpoly_tridiag(models::bc_matrix_exact(n, QComplex(y, 0))));
  SturmianFunction s;
  s.n = n;
  s.y = y;
  s.secular = BivariateSecular<Rational>(p0, p1 - p0, "r^2");
  s.common = gcd(s.A(), s.B());
  return s;
}

R2Value sturmian_r2(const SturmianFunction& s, double E) {
  if (!std::isfinite(E)) throw std::invalid_argument("sturmian_r2: E must be finite");
  const Rational e = exact_from_double(E);
  const Rational a = s.A()(e), b = s.B()(e);
  if (b == 0) return {a == 0 ? R2Value::Kind::Indeterminate : R2Value::Kind::Pole, 0};
  return {R2Value::Kind::Finite, Rational(-a / b).convert_to<double>()};
}

std::vector<BranchPoint> sturmian_poles(const SturmianFunction& s) {
  std::vector<BranchPoint> out;
  if (s.B().degree() < 1) return out;
  const double bound = root_bound(s.B());
  const auto factors = squarefree_decomposition(s.B());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const auto& f = factors[k];
    if (f.degree() < 1) continue;
    const auto shared = gcd(f, s.common);
    const auto own = exact_quotient(f, shared);
    for (const auto& r : roots_of(shared, -bound, bound))
      out.push_back({static_cast<double>(r.value), BranchPoint::Kind::Indeterminate, static_cast<int>(k) + 1, 0});
    for (const auto& r : roots_of(own, -bound, bound))
      out.push_back({static_cast<double>(r.value), BranchPoint::Kind::PoleOfR, static_cast<int>(k) + 1, 0});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.E < b.E; });
  return out;
}

std::vector<BranchPoint> sturmian_features(const SturmianFunction& s, double lo, double hi) {
  std::vector<BranchPoint> out;
  for (const auto& p : sturmian_poles(s))
    if (p.E >= lo && p.E <= hi) out.push_back(p);

  const auto a = exact_quotient(s.A(), s.common);
  const auto b = exact_quotient(s.B(), s.common);
  for (const auto& r : roots_of(a, lo, hi))
    out.push_back({static_cast<double>(r.value), BranchPoint::Kind::ZeroOfR, r.multiplicity, 0});

  // Interior extrema of r^2 = -a/b: zeros of a'b - ab' away from zeros of a.
  const auto w = a.derivative() * b - a * b.derivative();
  for (const auto& r : roots_of(w, lo, hi)) {
    const Rational e = r.exact_zero ? r.exact_value : exact_from_double(static_cast<double>(r.value));
    const Rational av = a(e), bv = b(e);
    if (av == 0 || bv == 0) continue;
    const double r2 = Rational(-av / bv).convert_to<double>();
    if (r2 <= 0) continue;
    out.push_back({static_cast<double>(r.value), BranchPoint::Kind::BranchMerge, r.multiplicity, r2});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.E < y.E; });
  return out;
}

BranchTrace branch_trace(const SturmianFunction& s, double lo, double hi, int samples) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("branch_trace: bad E range");
  if (samples < 2) throw std::invalid_argument("branch_trace: samples must be at least 2");

  const double h = (hi - lo) / (samples - 1);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) grid.push_back(i + 1 == samples ? hi : lo + h * i);

  const auto features = sturmian_features(s, lo, hi);
  for (const auto& f : features) {
    double step = h;
    for (int level = 0; level < 3; ++level) {
      const double half = 5 * step;
      step /= 10;
      for (int j = -50; j <= 50; ++j) {
        const double e = f.E + j * step;
        if (std::abs(e - f.E) <= half && e >= lo && e <= hi) grid.push_back(e);
      }
    }
    if (f.kind == BranchPoint::Kind::ZeroOfR || f.kind == BranchPoint::Kind::BranchMerge) grid.push_back(f.E);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<R2Value> vals(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { vals[i] = sturmian_r2(s, grid[i]); });

  BranchTrace t;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (vals[i].kind != R2Value::Kind::Finite || vals[i].value < 0) continue;
    const double r = std::sqrt(vals[i].value);
    t.points.push_back({grid[i], vals[i].value, r, -r, vals[i].value <= 1});
  }
  for (const auto& r : roots_of(s.common, lo, hi)) t.vertical_lines.push_back(static_cast<double>(r.value));
  return t;
}

void sort_levels(std::vector<cdouble>& v) {
  std::sort(v.begin(), v.end(), [](const cdouble& a, const cdouble& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

Spectrum real_spectrum_at(int n, double y, double r) {
  const models::ShiftedCircle zc{y, r};
  auto vals = eigenvalues<double>(to_dense(models::bc_matrix<double>(n, models::z_value(zc))));
  sort_levels(vals);
  double scale = 1;
  for (const auto& v : vals) scale = std::max(scale, std::abs(v));
  Spectrum sp;
  sp.in_model = models::in_model(zc);
  for (const auto& v : vals) sp.levels.push_back({v, std::abs(v.imag()) <= 1e-10 * scale});
  return sp;
}

}  // namespace epkit::sturmian
