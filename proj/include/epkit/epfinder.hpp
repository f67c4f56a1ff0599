#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "epkit/dense.hpp"
#include "epkit/eigen.hpp"
#include "epkit/models.hpp"
#include "epkit/roots.hpp"
#include "epkit/sturmian.hpp"

namespace epkit::ep {

enum class DegeneracyKind { Simple, EP, Diabolic, SturmianPole, Indeterminate };
const char* to_string(DegeneracyKind k);

struct Residuals {
  double discriminant = 0;       // |discriminant in E| at the point (0 when exactly zero)
  double coalescence_angle = 0;  // smallest angle between cluster eigenvectors, radians
  int rank_defect = 0;           // n - rank(M - E I)
  double cluster_radius = 0;
  double sigma_ratio = 0;  // decisive singular value of M - E I over ||M||_2
};

struct Classification {
  DegeneracyKind kind = DegeneracyKind::Simple;
  int algebraic = 1;
  int geometric = 1;
  cdouble E;  // cluster centroid
  Residuals residuals;
  int order() const { return kind == DegeneracyKind::EP ? algebraic : 0; }
};

// Algebraic multiplicity: size of the characteristic-root cluster nearest E.
// Geometric multiplicity: singular values of M - E I below 1e-8 ||M||_2 (the
// smallest one always counts, since E is an eigenvalue).  A second singular
// value inside [1e-10, 1e-6] ||M||_2 gives an Indeterminate verdict.
Classification classify_degeneracy(const DenseMatrixExt& m, cext E, const RootSet& spectrum);
// Characteristic roots from the Hessenberg route.
Classification classify_degeneracy(const DenseMatrix& m, cdouble E);
// Characteristic roots from the tridiagonal recurrence on the couplings.
Classification classify_degeneracy(const Tridiagonal<cext>& t, cext E);
Classification classify_degeneracy(const Tridiagonal<cext>& t, const ReducedTridiagonal<cext>& reduced, cext E);

// rank((M - E I)^k) for k = 1..n in exact arithmetic, on the unit-superdiagonal
// realisation of the couplings.
std::vector<int> jordan_rank_chain(const ReducedTridiagonal<Rational>& t, const Rational& E);

struct CriticalPoint {
  std::vector<std::pair<std::string, double>> params;
  cdouble E;
  DegeneracyKind kind = DegeneracyKind::Simple;
  int order = 0;  // EP order, 0 for other kinds
  int algebraic = 1;
  int geometric = 1;
  Residuals residuals;
  int level_a = -1;  // merging levels (descending real part), 2-D search only
  int level_b = -1;

  double param(const std::string& name) const;
};

struct UnresolvedInterval {
  std::string param;
  double lo = 0;
  double hi = 0;
  std::string reason;
};

struct LocateResult {
  std::vector<CriticalPoint> points;
  std::vector<UnresolvedInterval> unresolved;
};

// ---- sweeps ----

struct SweepResult {
  std::string param;
  std::vector<double> grid;
  std::vector<std::vector<cdouble>> values;  // values[i][k]: track k at grid point i
  std::vector<std::vector<bool>> real;       // |Im| <= 1e-10 max(1, max |E|)
  std::vector<bool> ambiguous;               // pairing at this step is unreliable

  int tracks() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
};

// Eigenvalues on a uniform grid, continued by minimal total displacement
// (ties keep the previous order).  A step is flagged ambiguous when its
// largest displacement reaches half of the smallest level gap on either side.
// The Extended tier runs the eigensolver in long double.
SweepResult sweep(const models::ModelSpec& model, double lo, double hi, int samples,
                  Precision tier = Precision::Double);
// Continuation of precomputed spectra on an arbitrary grid.
SweepResult continue_tracks(std::string param, std::vector<double> grid, std::vector<std::vector<cdouble>> spectra);

// ---- locating degeneracies ----

struct LocateOptions {
  int grid = 401;
  double cluster_tol = 1e-7;
};

// Exact route: real roots of the discriminant D(r^2) of the bc secular
// polynomial, mapped back to r in [r_lo, r_hi].
LocateResult ep_locate_1d(const sturmian::SturmianFunction& s, double r_lo, double r_hi,
                          const LocateOptions& opt = {});
// Model family over its scalar parameter (t for Epn and HermitianDemo, r for
// the circle couplings).  bc families delegate to the exact route.
LocateResult ep_locate_1d(const models::ModelSpec& model, double lo, double hi, const LocateOptions& opt = {});

struct Locate2dOptions {
  double y_step = 0.01;
  int r_samples = 201;      // inner grid on r in [0, 1]; r -> -r is a symmetry
  double y_tol = 1e-16;     // extended bisection stops below this bracket width
  double pole_match = 1e-5;  // onset and pole events closer than this are one event
};

// Boundary-controlled family with z = y + i sqrt(1 - r^2): critical y where
// an adjacent pair of levels first touches for some real r (EP2 onset), and
// pole events where A(.; y) and B share a real root.
LocateResult ep_locate_2d_bc(int n, double y_lo, double y_hi, const Locate2dOptions& opt = {});

// Smallest over r in [0, 1] of Re (E_a - E_{a+1})^2, restricted to r where
// the pair is real or mutually conjugate; +inf if never.  Positive: the pair
// is real for all r; negative: complex for some r.  Exposed for diagnostics.
struct PairGap {
  long double value;
  long double r;
};
std::vector<PairGap> pair_gaps(int n, long double y, int r_samples, bool extended);

// r-intervals in [-1, 1] on which level `label` is not real.
std::vector<std::pair<double, double>> nonreal_intervals(int n, double y, int label, int samples);

// ---- perturbation splitting ----

struct ExponentFit {
  double slope = 0;
  double stderr_slope = 0;
  double r_squared = 0;
  double intercept = 0;
  bool nonlinear = false;  // R^2 < 0.99
  std::vector<double> log_eps;
  std::vector<double> log_split;  // draw-averaged log max |l - E0| over the m nearest
};

ExponentFit perturbation_exponent(const DenseMatrixExt& m, cext E0, int order, const std::vector<double>& eps_list,
                                  std::uint64_t seed, int draws = 16);

// eps_k = 10^(lo + k (hi - lo) / (count - 1))
std::vector<double> log_spaced(double lo_exp, double hi_exp, int count);

}  // namespace epkit::ep
