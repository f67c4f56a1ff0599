#include "epkit/models.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "epkit/errors.hpp"

namespace epkit::models {

namespace {

void require_dimension(int n) {
  if (n < 2) throw std::invalid_argument("model dimension must be at least 2");
}

template <class R>
std::complex<R> circle_root(R r) {
  return std::sqrt(std::complex<R>(R(1) - r * r, R(0)));
}

template <class R>
std::complex<R> z_of(const ZParam& p) {
  using C = std::complex<R>;
  return std::visit(
      [](const auto& v) -> C {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Robin>) {
          const C den(R(1) - R(v.beta) * R(v.h), -R(v.alpha) * R(v.h));
          if (den == C(0)) throw DomainError("Robin coupling: (1 - beta h)^2 + (alpha h)^2 = 0");
          return C(1) / den;
        } else if constexpr (std::is_same_v<V, Circle>) {
          return C(0, 1) * circle_root<R>(R(v.r));
        } else if constexpr (std::is_same_v<V, ShiftedCircle>) {
          return C(R(v.y), 0) + C(0, 1) * circle_root<R>(R(v.r));
        } else {
          return C(R(v.z.real()), R(v.z.imag()));
        }
      },
      p);
}

// Box-Muller on the raw 53-bit output of mt19937_64; the standard library
// distributions are not specified bit-for-bit across implementations.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : eng_(seed) {}
  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * 3.14159265358979323846 * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 eng_;
  double spare_ = 0;
  bool have_spare_ = false;
};

DenseMatrix gaussian_hermitian(int n, Gaussian& g) {
  DenseMatrix m(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = g(), im = g();
      m(i, j) = cdouble(re * s, im * s);
    }
  DenseMatrix h = 0.5 * (m + m.adjoint());
  for (int i = 0; i < n; ++i) h(i, i) = cdouble(h(i, i).real(), 0.0);
  return h;
}

}  // namespace

cdouble z_value(const ZParam& p) { return z_of<double>(p); }
cext z_value_ext(const ZParam& p) { return z_of<ext>(p); }

bool in_model(const ZParam& p) {
  return std::visit(
      [](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Circle> || std::is_same_v<V, ShiftedCircle>)
          return std::abs(v.r) <= 1.0;
        else
          return true;
      },
      p);
}

ZParam with_r(const ZParam& p, double r) {
  if (std::holds_alternative<Circle>(p)) return Circle{r};
  if (const auto* s = std::get_if<ShiftedCircle>(&p)) return ShiftedCircle{s->y, r};
  (void)r;
  return p;
}

int dimension(const ModelSpec& m) {
  return std::visit([](const auto& v) { return v.n; }, m);
}

std::string describe(const ModelSpec& m) {
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, HermitianDemo>) {
          os << "hermitian-demo(n=" << v.n << ",seed=" << v.seed << ")";
        } else if constexpr (std::is_same_v<V, Epn>) {
          os << "epn(n=" << v.n << ")";
        } else {
          os << "bc(n=" << v.n;
          if (const auto* s = std::get_if<ShiftedCircle>(&v.coupling)) os << ",y=" << s->y;
          os << ")";
        }
      },
      m);
  return os.str();
}

template <class R>
Tridiagonal<std::complex<R>> epn_matrix(int n, R t) {
  using C = std::complex<R>;
  require_dimension(n);
  const R tau = R(1) - t;
  const C sigma = epn_sigma<R>(t);
  std::vector<C> d, up, lo;
  for (int k = 0; k < n; ++k) d.push_back(C(R(2 * k - n + 1), 0) + sigma);
  for (int k = 0; k + 1 < n; ++k) {
    const R w = std::sqrt(R((k + 1) * (n - k - 1))) * tau;
    up.emplace_back(w, 0);
    lo.emplace_back(-w, 0);
  }
  return {std::move(d), std::move(up), std::move(lo)};
}

template <class R>
ReducedTridiagonal<std::complex<R>> epn_reduced(int n, R t) {
  using C = std::complex<R>;
  require_dimension(n);
  const R tau = R(1) - t;
  const C sigma = epn_sigma<R>(t);
  ReducedTridiagonal<C> r;
  for (int k = 0; k < n; ++k) r.diag.push_back(C(R(2 * k - n + 1), 0) + sigma);
  for (int k = 0; k + 1 < n; ++k) r.coupling.emplace_back(-R((k + 1) * (n - k - 1)) * tau * tau, 0);
  return r;
}

ReducedTridiagonal<Rational> epn_reduced_exact(int n, const Rational& tau, const Rational& sigma) {
  require_dimension(n);
  ReducedTridiagonal<Rational> r;
  for (int k = 0; k < n; ++k) r.diag.push_back(Rational(2 * k - n + 1) + sigma);
  for (int k = 0; k + 1 < n; ++k) r.coupling.push_back(-Rational((k + 1) * (n - k - 1)) * tau * tau);
  return r;
}

template <class R>
Tridiagonal<std::complex<R>> bc_matrix(int n, std::complex<R> z) {
  using C = std::complex<R>;
  require_dimension(n);
  std::vector<C> d(static_cast<std::size_t>(n), C(2, 0));
  d.front() = C(2, 0) - z;
  d.back() = C(2, 0) - std::conj(z);
  std::vector<C> off(static_cast<std::size_t>(n - 1), C(-1, 0));
  return {std::move(d), off, off};
}

Tridiagonal<QComplex> bc_matrix_exact(int n, const QComplex& z) {
  require_dimension(n);
  std::vector<QComplex> d(static_cast<std::size_t>(n), QComplex(2));
  d.front() = QComplex(2) - z;
  d.back() = QComplex(2) - conj_of(z);
  std::vector<QComplex> off(static_cast<std::size_t>(n - 1), QComplex(-1));
  return {std::move(d), off, off};
}

HermitianPencil hermitian_pencil(int n, std::uint64_t seed) {
  require_dimension(n);
  Gaussian g(seed);
  HermitianPencil p;
  p.a = gaussian_hermitian(n, g);
  p.b = gaussian_hermitian(n, g);
  return p;
}

DenseMatrix hermitian_demo(int n, double t, std::uint64_t seed) {
  const auto p = hermitian_pencil(n, seed);
  if (t == 0.0) return p.a;
  return p.a + t * p.b;
}

DenseMatrix gaussian_matrix(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gaussian_matrix: n must be positive");
  Gaussian g(seed);
  const double s = 1.0 / std::sqrt(2.0);
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = g(), im = g();
      m(i, j) = cdouble(re * s, im * s);
    }
  return m;
}

DenseMatrix dense_at(const ModelSpec& m, double param) {
  return std::visit(
      [&](const auto& v) -> DenseMatrix {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, HermitianDemo>) {
          return hermitian_demo(v.n, param, v.seed);
        } else if constexpr (std::is_same_v<V, Epn>) {
          return to_dense(epn_matrix<double>(v.n, param));
        } else {
          return to_dense(bc_matrix<double>(v.n, z_value(with_r(v.coupling, param))));
        }
      },
      m);
}

std::optional<Tridiagonal<cext>> tridiagonal_at(const ModelSpec& m, ext param) {
  if (const auto* e = std::get_if<Epn>(&m)) return epn_matrix<ext>(e->n, param);
  if (const auto* b = std::get_if<BoundaryControlled>(&m)) {
    // Keep the swept r in extended precision for the circle forms.
    if (std::holds_alternative<Circle>(b->coupling))
      return bc_matrix<ext>(b->n, cext(0, 1) * circle_root<ext>(param));
    if (const auto* s = std::get_if<ShiftedCircle>(&b->coupling))
      return bc_matrix<ext>(b->n, cext(static_cast<ext>(s->y), 0) + cext(0, 1) * circle_root<ext>(param));
    return bc_matrix<ext>(b->n, z_value_ext(b->coupling));
  }
  return std::nullopt;
}

std::optional<ReducedTridiagonal<cext>> reduced_at(const ModelSpec& m, ext param) {
  if (const auto* e = std::get_if<Epn>(&m)) return epn_reduced<ext>(e->n, param);
  if (const auto t = tridiagonal_at(m, param)) return reduce(*t);
  return std::nullopt;
}

template Tridiagonal<cdouble> epn_matrix<double>(int, double);
template Tridiagonal<cext> epn_matrix<ext>(int, ext);
template ReducedTridiagonal<cdouble> epn_reduced<double>(int, double);
template ReducedTridiagonal<cext> epn_reduced<ext>(int, ext);
template Tridiagonal<cdouble> bc_matrix<double>(int, cdouble);
template Tridiagonal<cext> bc_matrix<ext>(int, cext);

}  // namespace epkit::models
