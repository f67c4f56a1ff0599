#include "epkit/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace epkit {

const RootCluster& RootSet::nearest_cluster(cext z) const {
  if (clusters.empty()) throw std::domain_error("nearest_cluster: empty root set");
  std::size_t best = 0;
  ext bestd = std::numeric_limits<ext>::infinity();
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const ext d = std::abs(clusters[k].centroid - z);
    if (d < bestd) {
      bestd = d;
      best = k;
    }
  }
  return clusters[best];
}

namespace {

template <class R>
struct AberthOutcome {
  std::vector<std::complex<R>> roots;
  std::vector<int> unconverged;
  ext max_backward = 0;
  int iterations = 0;
};

// Coefficients must have nonzero constant and leading terms.
template <class R>
AberthOutcome<R> aberth(const std::vector<std::complex<R>>& c, int max_iter) {
  using C = std::complex<R>;
  const int n = static_cast<int>(c.size()) - 1;
  AberthOutcome<R> out;
  if (n == 1) {
    out.roots.push_back(-c[0] / c[1]);
    return out;
  }
  const R eps = std::numeric_limits<R>::epsilon();
  std::vector<R> absc(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) absc[k] = std::abs(c[k]);

  auto eval = [&](C z, C& p, C& dp) {
    p = c[static_cast<std::size_t>(n)];
    dp = C(0);
    for (int k = n - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[static_cast<std::size_t>(k)];
    }
  };
  auto scale = [&](R az) {
    R acc = 0, pw = 1;
    for (int k = 0; k <= n; ++k) {
      acc += absc[static_cast<std::size_t>(k)] * pw;
      pw *= az;
    }
    return acc;
  };

  // Start on a circle around the root centroid with radius from |c0/cn|.
  const C centre = -c[static_cast<std::size_t>(n - 1)] / (R(n) * c[static_cast<std::size_t>(n)]);
  R rho = std::pow(absc[0] / absc[static_cast<std::size_t>(n)], R(1) / R(n));
  if (!(rho > 0) || !std::isfinite(static_cast<double>(rho))) rho = 1;
  std::vector<C> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const R ang = R(2) * std::numbers::pi_v<R> * R(k) / R(n) + R(0.4);
    z[static_cast<std::size_t>(k)] = centre + rho * C(std::cos(ang), std::sin(ang));
  }

  std::vector<bool> done(static_cast<std::size_t>(n), false);
  const R tol = R(8) * R(n) * eps;
  int it = 0;
  for (; it < max_iter; ++it) {
    bool all = true;
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)]) continue;
      C p, dp;
      const C zi = z[static_cast<std::size_t>(i)];
      eval(zi, p, dp);
      if (std::abs(p) <= tol * scale(std::abs(zi))) {
        done[static_cast<std::size_t>(i)] = true;
        continue;
      }
      all = false;
      C s(0);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        C d = zi - z[static_cast<std::size_t>(j)];
        if (d == C(0)) d = C(eps * (R(1) + std::abs(zi)));
        s += C(1) / d;
      }
      const C ratio = (dp == C(0)) ? C(eps * (R(1) + std::abs(zi))) : p / dp;
      const C w = ratio / (C(1) - ratio * s);
      z[static_cast<std::size_t>(i)] = zi - w;
      if (std::abs(w) <= eps * std::abs(zi)) done[static_cast<std::size_t>(i)] = true;
    }
    if (all) break;
  }
  out.iterations = it;
  for (int i = 0; i < n; ++i) {
    C p, dp;
    eval(z[static_cast<std::size_t>(i)], p, dp);
    const R sc = scale(std::abs(z[static_cast<std::size_t>(i)]));
    const ext be = sc > 0 ? static_cast<ext>(std::abs(p) / sc) : 0;
    out.max_backward = std::max(out.max_backward, be);
    // Multiple roots stall at ~eps^(1/m) accuracy but still pass a loose
    // backward-error check; only genuinely wandering iterates are reported.
    if (be > std::sqrt(static_cast<ext>(eps))) out.unconverged.push_back(i);
  }
  out.roots = std::move(z);
  return out;
}

template <class R>
RootSet roots_float(const Polynomial<cext>& p, const RootOptions& opt) {
  using C = std::complex<R>;
  if (p.degree() < 1) throw std::domain_error("poly_roots: degree must be at least 1");
  RootSet rs;
  const auto& cf = p.coeffs();
  std::size_t zeros = 0;
  while (zeros < cf.size() && is_zero(cf[zeros])) ++zeros;
  for (std::size_t k = 0; k < zeros; ++k) rs.roots.emplace_back(0);
  std::vector<C> rest;
  for (std::size_t k = zeros; k < cf.size(); ++k)
    rest.emplace_back(static_cast<R>(cf[k].real()), static_cast<R>(cf[k].imag()));
  if (rest.size() >= 2) {
    auto ab = aberth<R>(rest, opt.max_iterations);
    for (int idx : ab.unconverged) rs.unconverged.push_back(idx + static_cast<int>(zeros));
    for (const auto& z : ab.roots) rs.roots.emplace_back(static_cast<ext>(z.real()), static_cast<ext>(z.imag()));
    rs.max_backward_error = ab.max_backward;
    rs.iterations = ab.iterations;
  }
  rs.converged = rs.unconverged.empty();
  rs.clusters = cluster_roots(rs.roots, opt.cluster_tol);
  return rs;
}

template <class T>
RootSet roots_exact(const Polynomial<T>& p, const RootOptions& opt) {
  if (p.degree() < 1) throw std::domain_error("poly_roots: degree must be at least 1");
  RootSet rs;
  const auto factors = squarefree_decomposition(p);
  RootOptions inner = opt;
  inner.tier = Precision::Extended;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].degree() < 1) continue;
    const int mult = static_cast<int>(k) + 1;
    const Polynomial<cext> f = to_cext_poly(factors[k]);
    RootSet part = roots_float<ext>(f, inner);
    // Simple roots of a square-free factor: a few Newton steps in extended.
    const Polynomial<cext> df = f.derivative();
    for (auto& z : part.roots) {
      for (int it = 0; it < 3; ++it) {
        const cext d = df(z);
        if (d == cext(0)) break;
        z -= f(z) / d;
      }
    }
    const int base = static_cast<int>(rs.roots.size());
    for (int idx : part.unconverged)
      for (int m = 0; m < mult; ++m) rs.unconverged.push_back(base + idx * mult + m);
    rs.max_backward_error = std::max(rs.max_backward_error, part.max_backward_error);
    rs.iterations = std::max(rs.iterations, part.iterations);
    for (const auto& z : part.roots)
      for (int m = 0; m < mult; ++m) rs.roots.push_back(z);
  }
  rs.converged = rs.unconverged.empty();
  rs.clusters = cluster_roots(rs.roots, opt.cluster_tol);
  return rs;
}

}  // namespace

std::vector<RootCluster> cluster_roots(const std::vector<cext>& roots, double tol) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const ext lim = static_cast<ext>(tol) * (1 + 0.5L * (std::abs(roots[i]) + std::abs(roots[j])));
      if (std::abs(roots[i] - roots[j]) <= lim) parent[find(i)] = find(j);
    }
  std::vector<RootCluster> out;
  std::vector<int> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[r])].members.push_back(static_cast<int>(i));
  }
  for (auto& c : out) {
    cext sum(0);
    for (int m : c.members) sum += roots[static_cast<std::size_t>(m)];
    c.size = static_cast<int>(c.members.size());
    c.centroid = sum / static_cast<ext>(c.size);
    c.radius = 0;
    for (int m : c.members) c.radius = std::max(c.radius, std::abs(roots[static_cast<std::size_t>(m)] - c.centroid));
  }
  // Deterministic order: by real part, then imaginary part.
  std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
    if (a.centroid.real() != b.centroid.real()) return a.centroid.real() < b.centroid.real();
    return a.centroid.imag() < b.centroid.imag();
  });
  return out;
}

RootSet poly_roots(const Polynomial<cext>& p, const RootOptions& opt) {
  if (p.degree() >= 1 && is_zero(p.leading())) throw std::domain_error("poly_roots: zero leading coefficient");
  return opt.tier == Precision::Double ? roots_float<double>(p, opt) : roots_float<ext>(p, opt);
}

RootSet poly_roots(const Polynomial<cdouble>& p, const RootOptions& opt) { return poly_roots(to_cext_poly(p), opt); }

RootSet poly_roots(const Polynomial<Rational>& p, const RootOptions& opt) { return roots_exact(p, opt); }

RootSet poly_roots(const Polynomial<QComplex>& p, const RootOptions& opt) { return roots_exact(p, opt); }

std::vector<RealRoot> real_roots_in(const Polynomial<Rational>& p, ext lo, ext hi) {
  std::vector<RealRoot> out;
  if (p.degree() < 1) return out;
  const auto factors = squarefree_decomposition(p);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const auto& f = factors[k];
    if (f.degree() < 1) continue;
    const Polynomial<cext> fc = to_cext_poly(f);
    RootSet rs = poly_roots(fc);
    const Polynomial<ext> fr = map_coeffs<ext>(f, [](const Rational& q) { return q.convert_to<ext>(); });
    for (const auto& z : rs.roots) {
      const ext scale = 1 + std::abs(z);
      if (std::abs(z.imag()) > 1e-9L * scale) continue;
      ext x = z.real();
      if (x < lo - 1e-12L * scale || x > hi + 1e-12L * scale) continue;
      RealRoot rr{x, static_cast<int>(k) + 1, false, Rational(0)};
      // Exact check at the nearest double and at small-denominator rationals.
      const Rational xd = exact_from_double(static_cast<double>(x));
      if (f(xd) == 0) {
        rr.exact_zero = true;
        rr.exact_value = xd;
        rr.value = xd.convert_to<ext>();
      } else {
        // Bisection on the simple root of the square-free factor.
        ext a = x - 1e-9L * scale, b = x + 1e-9L * scale;
        ext fa = fr(a), fb = fr(b);
        if (fa * fb < 0) {
          for (int it = 0; it < 200 && b - a > 0; ++it) {
            const ext m = 0.5L * (a + b);
            if (m == a || m == b) break;
            const ext fm = fr(m);
            if (fm == 0) {
              a = b = m;
              break;
            }
            if ((fm < 0) == (fa < 0)) {
              a = m;
              fa = fm;
            } else {
              b = m;
            }
          }
          rr.value = 0.5L * (a + b);
        }
      }
      if (rr.value >= lo - 1e-15L * scale && rr.value <= hi + 1e-15L * scale) out.push_back(rr);
    }
  }
  std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
  return out;
}

}  // namespace epkit
