#pragma once

#include <vector>

#include "epkit/polynomial.hpp"

namespace epkit {

// Roots closer than cluster_tol * (1 + |centroid|) are one numerical
// multiple root; `size` is its numerical multiplicity.
struct RootCluster {
  cext centroid;
  ext radius = 0;
  int size = 0;
  std::vector<int> members;  // indices into RootSet::roots
};

struct RootSet {
  std::vector<cext> roots;  // all deg-P roots, repeated by multiplicity
  std::vector<RootCluster> clusters;
  bool converged = true;
  std::vector<int> unconverged;  // indices of roots that missed the residual test
  ext max_backward_error = 0;
  int iterations = 0;

  // Cluster whose centroid is nearest to z.
  const RootCluster& nearest_cluster(cext z) const;
};

struct RootOptions {
  Precision tier = Precision::Extended;
  double cluster_tol = 1e-7;
  int max_iterations = 2000;
};

// Aberth-Ehrlich simultaneous iteration.  Exactly-zero low coefficients are
// split off as exact roots at 0 first.  Exact inputs are reduced to their
// square-free factors (Yun) so multiplicities are exact, not numerical.
RootSet poly_roots(const Polynomial<cext>& p, const RootOptions& opt = {});
RootSet poly_roots(const Polynomial<cdouble>& p, const RootOptions& opt = {});
RootSet poly_roots(const Polynomial<Rational>& p, const RootOptions& opt = {});
RootSet poly_roots(const Polynomial<QComplex>& p, const RootOptions& opt = {});

std::vector<RootCluster> cluster_roots(const std::vector<cext>& roots, double tol);

// Real roots of an exact polynomial inside [lo, hi], each with its exact
// multiplicity.  Roots are located through the square-free factors and
// refined by bisection on a sign change of the factor.
struct RealRoot {
  ext value;
  int multiplicity;
  bool exact_zero;  // the polynomial vanishes exactly at a rational point
  Rational exact_value;
};
std::vector<RealRoot> real_roots_in(const Polynomial<Rational>& p, ext lo, ext hi);

}  // namespace epkit
