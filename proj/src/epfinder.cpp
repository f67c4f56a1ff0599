#include "epkit/epfinder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/SVD>

#include "epkit/errors.hpp"
#include "epkit/parallel.hpp"
#include "epkit/resultant.hpp"

namespace epkit::ep {

namespace {

constexpr long double kInf = std::numeric_limits<long double>::infinity();

Rational exact_from_ext(ext x) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite value");
  if (x == 0) return Rational(0);
  int e = 0;
  const ext m = std::frexp(std::fabs(x), &e);
  const auto mant = static_cast<unsigned long long>(std::ldexp(m, 64));
  boost::multiprecision::cpp_int num = mant;
  boost::multiprecision::cpp_int den = 1;
  e -= 64;
  if (e >= 0)
    num <<= e;
  else
    den <<= -e;
  Rational q(num, den);
  return x < 0 ? Rational(-q) : q;
}

Rational floor_of(const Rational& q) {
  using boost::multiprecision::cpp_int;
  const cpp_int n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
  cpp_int f = n / d;
  if (n < 0 && f * d != n) f -= 1;
  return Rational(f);
}

// Rational with the smallest denominator in [a, b].
Rational simplest_between(Rational a, Rational b, int depth = 0) {
  if (a > b) std::swap(a, b);
  if (a <= 0 && b >= 0) return Rational(0);
  if (b < 0) return -simplest_between(-b, -a, depth);
  const Rational fl = floor_of(a);
  if (fl == a) return a;
  if (fl + 1 <= b) return fl + 1;
  if (depth > 60) return a;
  return fl + 1 / simplest_between(1 / (b - fl), 1 / (a - fl), depth + 1);
}

bool small_denominator(const Rational& q, int limit) {
  return boost::multiprecision::denominator(q) <= limit;
}

// Monic discriminant from the roots: prod_{i<j} |r_i - r_j|^2.
ext root_discriminant(const std::vector<cext>& roots) {
  ext acc = 1;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const ext d = std::abs(roots[i] - roots[j]);
      acc *= d * d;
    }
  return acc;
}

// Discriminant polynomial D(q) of q -> charpoly(q), degree <= bound,
// recovered exactly by interpolation at q = 0..bound.
Polynomial<Rational> discriminant_polynomial(const std::function<Polynomial<Rational>(const Rational&)>& charpoly,
                                             int bound) {
  std::vector<Rational> xs, ys;
  for (int k = 0; k <= bound; ++k) {
    xs.emplace_back(k);
    ys.push_back(discriminant(charpoly(Rational(k))));
  }
  return interpolate(xs, ys);
}

std::vector<cdouble> sorted_desc(std::vector<cdouble> v) {
  sturmian::sort_levels(v);
  return v;
}

std::vector<cext> sorted_desc(std::vector<cext> v) {
  std::sort(v.begin(), v.end(), [](const cext& a, const cext& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return v;
}

cext bc_z(long double y, long double r) {
  return cext(y, 0) + cext(0, 1) * std::sqrt(cext(1 - r * r, 0));
}

std::vector<cext> bc_levels(int n, long double y, long double r, bool extended) {
  const cext z = bc_z(y, r);
  if (extended) return sorted_desc(eigenvalues<ext>(to_dense(models::bc_matrix<ext>(n, z))));
  const auto v = sorted_desc(eigenvalues<double>(to_dense(models::bc_matrix<double>(n, cdouble(z)))));
  std::vector<cext> out;
  for (const auto& e : v) out.push_back(to_cext(e));
  return out;
}

// Re (E_a - E_{a+1})^2 if the pair is real or mutually conjugate, else +inf.
long double pair_measure(const std::vector<cext>& lv, int a) {
  ext scale = 1;
  for (const auto& v : lv) scale = std::max(scale, std::abs(v));
  const cext ea = lv[static_cast<std::size_t>(a)], eb = lv[static_cast<std::size_t>(a) + 1];
  const ext tol = 1e-6L * scale;
  const bool both_real = std::abs(ea.imag()) <= tol && std::abs(eb.imag()) <= tol;
  const bool conjugate = std::abs(ea - std::conj(eb)) <= tol;
  if (!both_real && !conjugate) return kInf;
  const cext d = ea - eb;
  return (d * d).real();
}

// Golden-section minimum of f on [a, b].
std::pair<long double, long double> golden_min(const std::function<long double(long double)>& f, long double a,
                                               long double b, long double tol) {
  const long double g = (std::sqrt(5.0L) - 1) / 2;
  long double c = b - g * (b - a), d = a + g * (b - a);
  long double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const long double fa = f(a), fb = f(b);
  long double best = fc <= fd ? c : d, fbest = std::min(fc, fd);
  if (fa < fbest) {
    best = a;
    fbest = fa;
  }
  if (fb < fbest) {
    best = b;
    fbest = fb;
  }
  return {best, fbest};
}

// Inner minimisation of the pair measure over r in [0, 1] for one pair.
PairGap gap_for(int n, long double y, int a, int r_samples, bool extended) {
  std::vector<long double> vals(static_cast<std::size_t>(r_samples));
  for (int j = 0; j < r_samples; ++j) {
    const long double r = static_cast<long double>(j) / (r_samples - 1);
    vals[static_cast<std::size_t>(j)] = pair_measure(bc_levels(n, y, r, extended), a);
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  if (!std::isfinite(*it)) return {kInf, 0};
  const int j = static_cast<int>(it - vals.begin());
  const long double lo = static_cast<long double>(std::max(j - 1, 0)) / (r_samples - 1);
  const long double hi = static_cast<long double>(std::min(j + 1, r_samples - 1)) / (r_samples - 1);
  auto f = [&](long double r) { return pair_measure(bc_levels(n, y, r, extended), a); };
  const auto [r, v] = golden_min(f, lo, hi, extended ? 1e-12L : 1e-9L);
  if (v < *it) return {v, r};
  return {*it, static_cast<long double>(j) / (r_samples - 1)};
}

int sign_of(long double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Resultant in E of A(.; y) and B as an exact polynomial in y.  B does not
// depend on y and each coefficient of A is quadratic in y, so the degree is
// at most 2 deg B.
Polynomial<Rational> pole_resultant(int n) {
  const auto b = sturmian::bivariate_secular(n, Rational(0)).B();
  if (b.degree() < 1) return {};
  const int bound = 2 * b.degree();
  std::vector<Rational> xs, ys;
  for (int k = 0; k <= bound + 2; ++k) {
    const Rational y(k - (bound + 2) / 2);
    const auto s = sturmian::bivariate_secular(n, y);
    xs.push_back(y);
    ys.push_back(resultant(s.A(), s.B()));
  }
  return interpolate(xs, ys);
}

// Synthetic division of p by (E - beta).
Polynomial<cext> deflate(const Polynomial<cext>& p, cext beta) {
  const int d = p.degree();
  if (d < 1) return p;
  std::vector<cext> q(static_cast<std::size_t>(d));
  cext acc = 0;
  for (int k = d; k >= 1; --k) {
    acc = acc * beta + p.coeff(k);
    q[static_cast<std::size_t>(k - 1)] = acc;
  }
  return Polynomial<cext>(std::move(q));
}

CriticalPoint from_classification(const Classification& c) {
  CriticalPoint p;
  p.E = c.E;
  p.kind = c.kind;
  p.order = c.order();
  p.algebraic = c.algebraic;
  p.geometric = c.geometric;
  p.residuals = c.residuals;
  return p;
}

RootSet shifted(RootSet rs, cext by) {
  for (auto& r : rs.roots) r += by;
  for (auto& c : rs.clusters) c.centroid += by;
  return rs;
}

}  // namespace

const char* to_string(DegeneracyKind k) {
  switch (k) {
    case DegeneracyKind::Simple: return "simple";
    case DegeneracyKind::EP: return "EP";
    case DegeneracyKind::Diabolic: return "diabolic";
    case DegeneracyKind::SturmianPole: return "sturmian-pole";
    case DegeneracyKind::Indeterminate: return "indeterminate";
  }
  return "?";
}

double CriticalPoint::param(const std::string& name) const {
  for (const auto& [k, v] : params)
    if (k == name) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

// ---- classification ----

Classification classify_degeneracy(const DenseMatrixExt& m, cext E, const RootSet& spectrum) {
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.cols() != n) throw std::invalid_argument("classify_degeneracy: square matrix required");
  Classification c;
  const RootCluster& cl = spectrum.nearest_cluster(E);
  c.algebraic = cl.size;
  c.E = cdouble(cl.centroid);
  c.residuals.cluster_radius = static_cast<double>(cl.radius);
  c.residuals.discriminant = static_cast<double>(root_discriminant(spectrum.roots));

  Eigen::JacobiSVD<DenseMatrixExt> whole(m);
  const ext norm = std::max<ext>(whole.singularValues()(0), std::numeric_limits<ext>::min());
  const DenseMatrixExt shifted_m = m - E * DenseMatrixExt::Identity(n, n);
  Eigen::JacobiSVD<DenseMatrixExt> svd(shifted_m);
  const auto& sv = svd.singularValues();  // descending
  int below = 0;
  bool ambiguous = false;
  for (int k = 0; k < n; ++k) {
    const ext rel = sv(k) / norm;
    if (rel < 1e-8L) ++below;
    if (k < n - 1 && rel >= 1e-10L && rel <= 1e-6L) ambiguous = true;
  }
  c.geometric = std::max(1, below);
  c.residuals.rank_defect = c.geometric;
  c.residuals.sigma_ratio = static_cast<double>(n >= 2 ? sv(n - 2) / norm : sv(n - 1) / norm);

  // Coalescence angle among the eigenvectors of the `algebraic` eigenvalues
  // nearest E.
  c.residuals.coalescence_angle = M_PI / 2;
  if (c.algebraic >= 2) {
    const auto ed = eig_dense<ext>(m);
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::abs(ed.values[static_cast<std::size_t>(a)] - E) < std::abs(ed.values[static_cast<std::size_t>(b)] - E);
    });
    ext best = 0;
    const int take = std::min(c.algebraic, n);
    for (int i = 0; i < take; ++i)
      for (int j = i + 1; j < take; ++j) {
        const auto xi = ed.right.col(idx[static_cast<std::size_t>(i)]);
        const auto xj = ed.right.col(idx[static_cast<std::size_t>(j)]);
        best = std::max(best, std::abs(xi.dot(xj)) / (xi.norm() * xj.norm()));
      }
    c.residuals.coalescence_angle = static_cast<double>(std::acos(std::min<ext>(best, 1)));
  }

  if (ambiguous || c.geometric > c.algebraic)
    c.kind = DegeneracyKind::Indeterminate;
  else if (c.algebraic == 1)
    c.kind = DegeneracyKind::Simple;
  else if (c.geometric >= 2)
    c.kind = DegeneracyKind::Diabolic;
  else
    c.kind = DegeneracyKind::EP;
  return c;
}

Classification classify_degeneracy(const DenseMatrix& m, cdouble E) {
  const DenseMatrixExt me = widen<ext>(m);
  return classify_degeneracy(me, to_cext(E), poly_roots(charpoly_dense<ext>(me)));
}

Classification classify_degeneracy(const Tridiagonal<cext>& t, cext E) {
  return classify_degeneracy(t, reduce(t), E);
}

Classification classify_degeneracy(const Tridiagonal<cext>& t, const ReducedTridiagonal<cext>& reduced, cext E) {
  return classify_degeneracy(to_dense(t), E, poly_roots(charpoly_tridiag(reduced)));
}

std::vector<int> jordan_rank_chain(const ReducedTridiagonal<Rational>& t, const Rational& E) {
  const RationalMatrix a = RationalMatrix::from_reduced(t).shifted(E);
  std::vector<int> ranks;
  RationalMatrix p = a;
  for (int k = 1; k <= t.size(); ++k) {
    ranks.push_back(p.rank());
    if (k < t.size()) p = p * a;
  }
  return ranks;
}

// ---- sweeps ----

SweepResult continue_tracks(std::string param, std::vector<double> grid, std::vector<std::vector<cdouble>> spectra) {
  SweepResult res;
  res.param = std::move(param);
  res.grid = std::move(grid);
  if (res.grid.size() != spectra.size()) throw std::invalid_argument("continue_tracks: grid/spectra size mismatch");
  if (spectra.empty()) return res;
  const std::size_t n = spectra.front().size();

  auto by_real = [](const cdouble& a, const cdouble& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  auto min_gap = [](const std::vector<cdouble>& v) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) g = std::min(g, std::abs(v[i] - v[j]));
    return g;
  };
  auto scale_of = [](const std::vector<cdouble>& v) {
    double s = 1;
    for (const auto& e : v) s = std::max(s, std::abs(e));
    return s;
  };

  for (auto& s : spectra) {
    if (s.size() != n) throw std::invalid_argument("continue_tracks: spectra of unequal size");
    std::sort(s.begin(), s.end(), by_real);
  }

  res.values.push_back(spectra.front());
  res.ambiguous.push_back(min_gap(spectra.front()) <= 1e-7 * scale_of(spectra.front()));
  for (std::size_t i = 1; i < spectra.size(); ++i) {
    const auto& prev = res.values.back();
    const auto& cur = spectra[i];
    const double scale = scale_of(cur);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        cost[k][j] = std::abs(prev[k] - cur[j]) +
                     1e-13 * scale * std::abs(static_cast<double>(k) - static_cast<double>(j));
    const auto perm = min_cost_assignment(cost);
    std::vector<cdouble> next(n);
    double maxd = 0;
    for (std::size_t k = 0; k < n; ++k) {
      next[k] = cur[static_cast<std::size_t>(perm[k])];
      maxd = std::max(maxd, std::abs(next[k] - prev[k]));
    }
    const double gap = std::min(min_gap(prev), min_gap(cur));
    res.ambiguous.push_back(n > 1 && maxd >= 0.5 * gap);
    res.values.push_back(std::move(next));
  }
  for (const auto& v : res.values) {
    const double scale = scale_of(v);
    std::vector<bool> flags;
    for (const auto& e : v) flags.push_back(std::abs(e.imag()) <= 1e-10 * scale);
    res.real.push_back(std::move(flags));
  }
  return res;
}

SweepResult sweep(const models::ModelSpec& model, double lo, double hi, int samples, Precision tier) {
  if (samples < 2) throw std::invalid_argument("sweep: samples must be at least 2");
  if (tier == Precision::Exact) throw std::invalid_argument("sweep: no exact tier for eigenvalue tracks");
  if (!(lo <= hi)) throw std::invalid_argument("sweep: empty range");
  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    grid[static_cast<std::size_t>(i)] = (lo * (samples - 1 - i) + hi * i) / (samples - 1);
  std::vector<std::vector<cdouble>> spectra(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const DenseMatrix m = models::dense_at(model, grid[i]);
    if (tier == Precision::Double) {
      spectra[i] = eigenvalues<double>(m);
      return;
    }
    for (const auto& v : eigenvalues<ext>(widen<ext>(m)))
      spectra[i].push_back({static_cast<double>(v.real()), static_cast<double>(v.imag())});
  });
  const std::string name = std::holds_alternative<models::BoundaryControlled>(model) ? "r" : "t";
  return continue_tracks(name, std::move(grid), std::move(spectra));
}

// ---- one-parameter location ----

LocateResult ep_locate_1d(const sturmian::SturmianFunction& s, double r_lo, double r_hi, const LocateOptions& opt) {
  if (!(r_lo <= r_hi)) throw std::invalid_argument("ep_locate_1d: empty range");
  LocateResult out;
  const double y = s.y_value();
  const auto D = discriminant_in_E(s.secular);
  if (D.is_zero()) {
    out.unresolved.push_back({"r", r_lo, r_hi, "discriminant vanishes identically"});
    return out;
  }
  const ext pmax = std::max<ext>(ext(r_lo) * r_lo, ext(r_hi) * r_hi);
  const ext pmin = (r_lo <= 0 && r_hi >= 0) ? 0 : std::min<ext>(ext(r_lo) * r_lo, ext(r_hi) * r_hi);
  RootOptions ropt;
  ropt.cluster_tol = opt.cluster_tol;

  for (const auto& pr : real_roots_in(D, pmin, pmax)) {
    if (pr.value < 0) continue;
    std::vector<ext> rs;
    const ext root = std::sqrt(pr.value);
    if (root == 0) {
      rs.push_back(0);
    } else {
      if (root >= r_lo && root <= r_hi) rs.push_back(root);
      if (-root >= r_lo && -root <= r_hi) rs.push_back(-root);
    }
    RootSet spectrum;
    if (pr.exact_zero) {
      spectrum = poly_roots(s.secular.at(pr.exact_value), ropt);
    } else {
      const auto pc = to_cext_poly(s.A()) + to_cext_poly(s.B()) * cext(pr.value, 0);
      spectrum = poly_roots(pc, ropt);
    }
    std::vector<const RootCluster*> repeated;
    for (const auto& c : spectrum.clusters)
      if (c.size >= 2) repeated.push_back(&c);
    for (const ext r : rs) {
      if (repeated.empty()) {
        out.unresolved.push_back({"r", static_cast<double>(r) - 1e-9, static_cast<double>(r) + 1e-9,
                                  "discriminant zero without a resolvable repeated root"});
        continue;
      }
      const auto t = models::bc_matrix<ext>(s.n, bc_z(static_cast<ext>(y), r));
      for (const RootCluster* c : repeated) {
        auto cp = from_classification(classify_degeneracy(to_dense(t), c->centroid, spectrum));
        cp.params = {{"y", y}, {"r", static_cast<double>(r)}};
        cp.residuals.discriminant = pr.exact_zero ? 0.0 : static_cast<double>(std::abs(D(pr.value)));
        out.points.push_back(std::move(cp));
      }
    }
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.param("r") < b.param("r"); });
  return out;
}

namespace {

// Epn: the spectrum is sigma(t) plus that of T0(q), q = tau^2, whose
// diagonal is 2k - n + 1 and couplings -(k+1)(n-k-1) q.  The discriminant is
// shift invariant, so D(q) is an exact polynomial.
LocateResult locate_epn(int n, double lo, double hi, const LocateOptions& opt) {
  LocateResult out;
  auto charpoly_q = [n](const Rational& q) {
    ReducedTridiagonal<Rational> r;
    for (int k = 0; k < n; ++k) r.diag.emplace_back(2 * k - n + 1);
    for (int k = 0; k + 1 < n; ++k) r.coupling.push_back(-Rational((k + 1) * (n - k - 1)) * q);
    return charpoly_tridiag(r);
  };
  const auto D = discriminant_polynomial(charpoly_q, (2 * n - 1) * (n / 2));
  const ext tau_a = 1 - ext(hi), tau_b = 1 - ext(lo);  // tau in [tau_a, tau_b]
  const ext qmax = std::max(tau_a * tau_a, tau_b * tau_b);
  const ext qmin = (tau_a <= 0 && tau_b >= 0) ? 0 : std::min(tau_a * tau_a, tau_b * tau_b);
  RootOptions ropt;
  ropt.cluster_tol = opt.cluster_tol;

  for (const auto& qr : real_roots_in(D, qmin, qmax)) {
    if (qr.value < 0) continue;
    // tau = +-sqrt(q), exact when q is a rational square.
    std::vector<ext> taus;
    const ext root = std::sqrt(qr.value);
    taus.push_back(root);
    if (root != 0) taus.push_back(-root);
    for (ext tau : taus) {
      ext t = 1 - tau;
      if (t < lo || t > hi) continue;
      const Rational tq = simplest_between(exact_from_ext(t - 1e-15L * (1 + std::fabs(t))),
                                           exact_from_ext(t + 1e-15L * (1 + std::fabs(t))));
      if (small_denominator(tq, 10000)) t = tq.convert_to<ext>();

      RootSet base;
      if (qr.exact_zero)
        base = poly_roots(charpoly_q(qr.exact_value), ropt);
      else
        base = poly_roots(charpoly_tridiag(models::epn_reduced<ext>(n, t)), ropt);
      const cext sigma = models::epn_sigma<ext>(t);
      const RootSet spectrum = qr.exact_zero ? shifted(base, sigma) : base;
      const auto dense = to_dense(models::epn_matrix<ext>(n, t));
      bool any = false;
      for (const auto& c : spectrum.clusters) {
        if (c.size < 2) continue;
        any = true;
        auto cp = from_classification(classify_degeneracy(dense, c.centroid, spectrum));
        cp.params = {{"t", static_cast<double>(t)}};
        cp.residuals.discriminant = qr.exact_zero ? 0.0 : static_cast<double>(std::abs(D(qr.value)));
        out.points.push_back(std::move(cp));
      }
      if (!any)
        out.unresolved.push_back({"t", static_cast<double>(t) - 1e-9, static_cast<double>(t) + 1e-9,
                                  "discriminant zero without a resolvable repeated root"});
    }
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.param("t") < b.param("t"); });
  return out;
}

// Generic dense family: grid of |disc|, polished local minima, accepted only
// when an extended-precision root cluster forms and is much tighter than the
// double-precision spread at the same point.
LocateResult locate_dense(const models::HermitianDemo& h, double lo, double hi, const LocateOptions& opt) {
  LocateResult out;
  const int g = std::max(opt.grid, 3);
  auto disc_at = [&](long double t) -> long double {
    const DenseMatrixExt m = widen<ext>(models::hermitian_demo(h.n, static_cast<double>(t), h.seed));
    return std::abs(discriminant(charpoly_dense<ext>(m)));
  };
  std::vector<double> grid(static_cast<std::size_t>(g));
  std::vector<long double> d(grid.size());
  for (int i = 0; i < g; ++i) grid[static_cast<std::size_t>(i)] = (lo * (g - 1 - i) + hi * i) / (g - 1);
  parallel_for(grid.size(), [&](std::size_t i) { d[i] = disc_at(grid[i]); });
  RootOptions ropt;
  ropt.cluster_tol = opt.cluster_tol;
  for (int i = 1; i + 1 < g; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(d[k] <= d[k - 1] && d[k] < d[k + 1])) continue;
    const auto [t, v] = golden_min([&](long double x) { return std::log(disc_at(x) + 1e-300L); }, grid[k - 1],
                                   grid[k + 1], 1e-14L);
    (void)v;
    const DenseMatrixExt me = widen<ext>(models::hermitian_demo(h.n, static_cast<double>(t), h.seed));
    const RootSet polished = poly_roots(charpoly_dense<ext>(me), ropt);
    RootOptions dopt = ropt;
    dopt.tier = Precision::Double;
    const RootSet coarse = poly_roots(charpoly_dense<double>(models::hermitian_demo(h.n, static_cast<double>(t), h.seed)), dopt);
    for (const auto& c : polished.clusters) {
      if (c.size < 2) continue;
      const ext coarse_radius = coarse.nearest_cluster(c.centroid).radius;
      if (!(c.radius <= coarse_radius / 100 || c.radius <= 1e-12L * (1 + std::abs(c.centroid)))) {
        out.unresolved.push_back({"t", grid[k - 1], grid[k + 1], "cluster did not tighten under extended polish"});
        continue;
      }
      auto cp = from_classification(classify_degeneracy(me, c.centroid, polished));
      cp.params = {{"t", static_cast<double>(t)}};
      out.points.push_back(std::move(cp));
    }
  }
  return out;
}

}  // namespace

LocateResult ep_locate_1d(const models::ModelSpec& model, double lo, double hi, const LocateOptions& opt) {
  if (!(lo <= hi)) throw std::invalid_argument("ep_locate_1d: empty range");
  if (const auto* e = std::get_if<models::Epn>(&model)) return locate_epn(e->n, lo, hi, opt);
  if (const auto* h = std::get_if<models::HermitianDemo>(&model)) return locate_dense(*h, lo, hi, opt);
  const auto& b = std::get<models::BoundaryControlled>(model);
  if (std::holds_alternative<models::Circle>(b.coupling))
    return ep_locate_1d(sturmian::bivariate_secular(b.n, 0.0), lo, hi, opt);
  if (const auto* sc = std::get_if<models::ShiftedCircle>(&b.coupling))
    return ep_locate_1d(sturmian::bivariate_secular(b.n, sc->y), lo, hi, opt);
  throw DomainError("ep_locate_1d: this coupling has no scalar parameter (use circle or shifted-circle)");
}

// ---- two-parameter search ----

std::vector<PairGap> pair_gaps(int n, long double y, int r_samples, bool extended) {
  std::vector<PairGap> out;
  for (int a = 0; a + 1 < n; ++a) out.push_back(gap_for(n, y, a, r_samples, extended));
  return out;
}

std::vector<std::pair<double, double>> nonreal_intervals(int n, double y, int label, int samples) {
  if (samples < 2) throw std::invalid_argument("nonreal_intervals: samples must be at least 2");
  std::vector<std::pair<double, double>> out;
  bool open = false;
  double start = 0, last = 0;
  for (int j = 0; j < samples; ++j) {
    const double r = -1 + 2.0 * j / (samples - 1);
    const auto sp = sturmian::real_spectrum_at(n, y, r);
    const bool nonreal = !sp.levels.at(static_cast<std::size_t>(label)).real;
    if (nonreal && !open) {
      open = true;
      start = r;
    }
    if (!nonreal && open) {
      open = false;
      out.emplace_back(start, last);
    }
    last = r;
  }
  if (open) out.emplace_back(start, last);
  return out;
}

LocateResult ep_locate_2d_bc(int n, double y_lo, double y_hi, const Locate2dOptions& opt) {
  if (n < 2) throw std::invalid_argument("model dimension must be at least 2");
  if (!(y_lo < y_hi)) throw std::invalid_argument("ep_locate_2d_bc: empty y range");
  LocateResult out;

  const int cells = std::max(2, static_cast<int>(std::ceil((y_hi - y_lo) / opt.y_step)));
  std::vector<double> ys(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) ys[static_cast<std::size_t>(i)] = (y_lo * (cells - i) + y_hi * i) / cells;
  std::vector<std::vector<PairGap>> gaps(ys.size());
  parallel_for(ys.size(), [&](std::size_t i) { gaps[i] = pair_gaps(n, ys[i], opt.r_samples, false); });

  // Real roots of B, the pole locations of r^2 (B does not depend on y).
  const auto base = sturmian::bivariate_secular(n, Rational(0));
  std::vector<RealRoot> poles;
  if (base.B().degree() >= 1) {
    const ext bound = 64;
    poles = real_roots_in(base.B(), -bound, bound);
  }
  auto near_pole = [&](ext E) -> const RealRoot* {
    for (const auto& p : poles)
      if (std::abs(E - p.value) <= 1e-6L * (1 + std::abs(p.value))) return &p;
    return nullptr;
  };

  struct Onset {
    CriticalPoint cp;
    bool at_pole = false;
  };
  std::vector<Onset> onsets;
  for (int a = 0; a + 1 < n; ++a) {
    for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
      const long double v0 = gaps[i][static_cast<std::size_t>(a)].value;
      const long double v1 = gaps[i + 1][static_cast<std::size_t>(a)].value;
      const bool f0 = std::isfinite(v0), f1 = std::isfinite(v1);
      if (f0 != f1) {
        out.unresolved.push_back({"y", ys[i], ys[i + 1], "level pair changes partner inside the cell"});
        continue;
      }
      if (!f0 || sign_of(v0) == sign_of(v1) || (sign_of(v0) == 0 && i > 0)) continue;

      long double lo = ys[i], hi = ys[i + 1];
      int slo = sign_of(v0);
      bool broken = false;
      for (int phase = 0; phase < 2 && !broken; ++phase) {
        const bool extended = phase == 1;
        const long double width = extended ? opt.y_tol : 1e-9L;
        if (extended) slo = sign_of(gap_for(n, lo, a, opt.r_samples, true).value);
        for (int it = 0; it < 200 && hi - lo > width; ++it) {
          const long double mid = 0.5L * (lo + hi);
          const auto g = gap_for(n, mid, a, opt.r_samples, extended);
          if (!std::isfinite(g.value)) {
            broken = true;
            break;
          }
          if (sign_of(g.value) == 0) {
            lo = hi = mid;
            break;
          }
          if (sign_of(g.value) == slo)
            lo = mid;
          else
            hi = mid;
        }
      }
      if (broken) {
        out.unresolved.push_back({"y", ys[i], ys[i + 1], "pair measure undefined inside the bracket"});
        continue;
      }
      const long double yc = 0.5L * (lo + hi);
      const auto g = gap_for(n, yc, a, opt.r_samples, true);
      const auto lv = bc_levels(n, yc, g.r, true);
      const cext Ec = 0.5L * (lv[static_cast<std::size_t>(a)] + lv[static_cast<std::size_t>(a) + 1]);

      Onset on;
      const auto t = models::bc_matrix<ext>(n, bc_z(yc, g.r));
      on.cp = from_classification(classify_degeneracy(t, cext(Ec.real(), 0)));
      on.cp.params = {{"y", static_cast<double>(yc)}, {"r", static_cast<double>(g.r)}};
      on.cp.level_a = a;
      on.cp.level_b = a + 1;
      on.at_pole = near_pole(Ec.real()) != nullptr;
      if (on.cp.kind == DegeneracyKind::Simple && !on.at_pole) {
        // The measure jumped: a complex pair's real part passed a real level.
        out.unresolved.push_back({"y", ys[i], ys[i + 1], "levels relabel without touching (no degeneracy)"});
        continue;
      }
      onsets.push_back(on);
    }
  }

  // Pole events: A(.; y) and B share a real root.
  std::vector<bool> consumed(onsets.size(), false);
  const auto R = pole_resultant(n);
  if (!R.is_zero()) {
    for (const auto& yr : real_roots_in(R, y_lo, y_hi)) {
      const double ystar = static_cast<double>(yr.value);
      const auto sy = sturmian::bivariate_secular(n, ystar);
      const RealRoot* beta = nullptr;
      ext best = kInf;
      for (const auto& p : poles) {
        const ext av = std::abs(to_cext_poly(sy.A())(cext(p.value, 0)));
        if (av < best) {
          best = av;
          beta = &p;
        }
      }
      if (!beta) continue;
      CriticalPoint cp;
      cp.kind = DegeneracyKind::SturmianPole;
      cp.E = cdouble(static_cast<double>(beta->value), 0);
      cp.params = {{"y", ystar}};
      cp.algebraic = 1;
      cp.geometric = 1;
      double p_at = 0;
      for (std::size_t k = 0; k < onsets.size(); ++k) {
        if (consumed[k] || !onsets[k].at_pole) continue;
        if (std::abs(onsets[k].cp.param("y") - ystar) > opt.pole_match) continue;
        consumed[k] = true;
        const double r = onsets[k].cp.param("r");
        cp.params.emplace_back("r", r);
        cp.level_a = onsets[k].cp.level_a;
        cp.level_b = onsets[k].cp.level_b;
        cp.algebraic = onsets[k].cp.algebraic;
        cp.geometric = onsets[k].cp.geometric;
        cp.residuals = onsets[k].cp.residuals;
        p_at = r * r;
      }
      // The common factor (E - beta) cancels from r^2 = -A/B; what is left
      // must have no repeated root at this coupling.
      const auto full = to_cext_poly(sy.A()) + to_cext_poly(sy.B()) * cext(p_at, 0);
      const auto reduced = deflate(full, cext(beta->value, 0));
      cp.residuals.discriminant = reduced.degree() >= 1 ? static_cast<double>(std::abs(discriminant(reduced))) : 1.0;
      out.points.push_back(std::move(cp));
    }
  }
  for (std::size_t k = 0; k < onsets.size(); ++k) {
    if (consumed[k]) continue;
    auto cp = onsets[k].cp;
    if (onsets[k].at_pole) cp.kind = DegeneracyKind::SturmianPole;
    out.points.push_back(std::move(cp));
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.param("y") < b.param("y"); });
  return out;
}

// ---- perturbation splitting ----

std::vector<double> log_spaced(double lo_exp, double hi_exp, int count) {
  if (count < 2) throw std::invalid_argument("log_spaced: count must be at least 2");
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * k / (count - 1)));
  return out;
}

ExponentFit perturbation_exponent(const DenseMatrixExt& m, cext E0, int order, const std::vector<double>& eps_list,
                                  std::uint64_t seed, int draws) {
  const int n = static_cast<int>(m.rows());
  if (order < 1 || order > n) throw std::invalid_argument("perturbation_exponent: order must be in [1, n]");
  if (eps_list.size() < 2) throw std::invalid_argument("perturbation_exponent: need at least two eps values");
  if (draws < 1) throw std::invalid_argument("perturbation_exponent: draws must be positive");
  for (double e : eps_list)
    if (!(e > 0)) throw std::invalid_argument("perturbation_exponent: eps must be positive");

  std::vector<DenseMatrixExt> dirs(static_cast<std::size_t>(draws));
  for (int d = 0; d < draws; ++d) {
    DenseMatrixExt g = widen<ext>(models::gaussian_matrix(n, seed + static_cast<std::uint64_t>(d)));
    dirs[static_cast<std::size_t>(d)] = g / g.norm();
  }
  const std::size_t ne = eps_list.size();
  std::vector<ext> logs(ne * static_cast<std::size_t>(draws));
  parallel_for(logs.size(), [&](std::size_t idx) {
    const std::size_t e = idx / static_cast<std::size_t>(draws), d = idx % static_cast<std::size_t>(draws);
    const DenseMatrixExt p = m + static_cast<ext>(eps_list[e]) * dirs[d];
    auto vals = eigenvalues<ext>(p);
    std::vector<ext> dist;
    for (const auto& v : vals) dist.push_back(std::abs(v - E0));
    std::sort(dist.begin(), dist.end());
    logs[idx] = std::log(std::max(dist[static_cast<std::size_t>(order) - 1], std::numeric_limits<ext>::min()));
  });

  ExponentFit fit;
  for (std::size_t e = 0; e < ne; ++e) {
    ext acc = 0;
    for (int d = 0; d < draws; ++d) acc += logs[e * static_cast<std::size_t>(draws) + static_cast<std::size_t>(d)];
    fit.log_eps.push_back(std::log(eps_list[e]));
    fit.log_split.push_back(static_cast<double>(acc / draws));
  }
  const double k = static_cast<double>(ne);
  const double mx = std::accumulate(fit.log_eps.begin(), fit.log_eps.end(), 0.0) / k;
  const double my = std::accumulate(fit.log_split.begin(), fit.log_split.end(), 0.0) / k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t e = 0; e < ne; ++e) {
    const double dx = fit.log_eps[e] - mx, dy = fit.log_split[e] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (std::size_t e = 0; e < ne; ++e) {
    const double res = fit.log_split[e] - (fit.intercept + fit.slope * fit.log_eps[e]);
    ssr += res * res;
  }
  fit.r_squared = syy > 0 ? 1 - ssr / syy : 1.0;
  fit.stderr_slope = ne > 2 ? std::sqrt(ssr / (k - 2) / sxx) : 0.0;
  fit.nonlinear = fit.r_squared < 0.99;
  return fit;
}

}  // namespace epkit::ep
