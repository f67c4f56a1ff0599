#pragma once

#include <vector>

#include "epkit/resultant.hpp"

namespace epkit::sturmian {

// det(R_bc - E) = A(E) + r^2 B(E) for the coupling z = y + i sqrt(1 - r^2),
// so r^2(E) = -A(E) / B(E).  Stored exactly: y is taken as the exact dyadic
// value of the given double.
struct SturmianFunction {
  int n = 0;
  Rational y;
  BivariateSecular<Rational> secular;  // A, B with parameter "r^2"
  Polynomial<Rational> common;         // monic gcd(A, B)

  const Polynomial<Rational>& A() const { return secular.A; }
  const Polynomial<Rational>& B() const { return secular.B; }
  double y_value() const { return y.convert_to<double>(); }
};

SturmianFunction bivariate_secular(int n, double y);
SturmianFunction bivariate_secular(int n, const Rational& y);

struct R2Value {
  enum class Kind { Finite, Pole, Indeterminate };
  Kind kind = Kind::Finite;
  double value = 0;  // meaningful for Finite only
};

// -A(E)/B(E), evaluated exactly at the dyadic value of E.
R2Value sturmian_r2(const SturmianFunction& s, double E);

struct BranchPoint {
  enum class Kind { ZeroOfR, PoleOfR, BranchMerge, Indeterminate };
  double E = 0;
  Kind kind = Kind::ZeroOfR;
  int multiplicity = 1;
  double r2 = 0;  // r^2 at a branch merge
};

const char* to_string(BranchPoint::Kind k);

// Real roots of B: pole-of-r where A does not vanish, indeterminate at
// common roots of A and B (exact gcd split).
std::vector<BranchPoint> sturmian_poles(const SturmianFunction& s);

// Zeros and poles of r^2 plus its interior extrema (branch merges, where two
// real levels meet), all within [lo, hi].
std::vector<BranchPoint> sturmian_features(const SturmianFunction& s, double lo, double hi);

struct TracePoint {
  double E = 0;
  double r2 = 0;
  double r_plus = 0;
  double r_minus = 0;
  bool in_model = false;  // |r| <= 1
};

struct BranchTrace {
  std::vector<TracePoint> points;     // ascending E; r^2 < 0 and poles omitted
  std::vector<double> vertical_lines;  // persistent eigenvalues: real roots of gcd(A, B)
};

// Uniform grid refined three times by a factor 10 around every feature.
BranchTrace branch_trace(const SturmianFunction& s, double lo, double hi, int samples);

struct Level {
  cdouble E;
  bool real = false;
};

struct Spectrum {
  std::vector<Level> levels;  // label 0 = largest real part
  bool in_model = true;       // |r| <= 1
};

// Spectrum of bc_matrix(n, y + i sqrt(1 - r^2)); real means
// |Im E| <= 1e-10 * max(1, max |E|).
Spectrum real_spectrum_at(int n, double y, double r);

// Descending real part, ties by descending imaginary part.
void sort_levels(std::vector<cdouble>& v);

}  // namespace epkit::sturmian
