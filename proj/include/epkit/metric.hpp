#pragma once

#include <string>
#include <vector>

#include "epkit/dense.hpp"
#include "epkit/models.hpp"

namespace epkit::metric {

struct BiorthogonalBasis {
  std::vector<cdouble> values;
  DenseMatrix right;  // columns x_k, unit 2-norm
  DenseMatrix left;   // columns y_k with Y^H X = I
  double cond = 0;    // 2-norm condition number of X
  double biorthogonality_error = 0;  // ||Y^H X - I||_F
  bool ill_conditioned = false;      // cond > 1e6
};

// Eigenvalues closer than 1e-7 max(1, max |l|) count as a cluster and raise
// DegenerateBasisError naming it.  Decomposed in extended precision.
BiorthogonalBasis biorthogonal_basis(const DenseMatrix& m);

// Theta = Y diag(kappa) Y^H, Hermitised.  Diagnostics are evaluated from
// theta and the source matrix on every call.
class MetricOperator {
 public:
  MetricOperator(DenseMatrix source, DenseMatrix theta, std::vector<double> kappa, double basis_cond);

  const DenseMatrix& theta() const { return theta_; }
  const DenseMatrix& source() const { return source_; }
  const std::vector<double>& kappa() const { return kappa_; }
  double basis_cond() const { return basis_cond_; }

  double residual() const;           // ||M^H Theta - Theta M||_F
  double relative_residual() const;  // residual / (||M||_F ||Theta||_F)
  double min_eig() const;
  double max_eig() const;
  double cond() const { return max_eig() / min_eig(); }
  // Theta / ||Theta||_F
  DenseMatrix normalized() const;
  double normalized_min_eig() const;

 private:
  DenseMatrix source_;
  DenseMatrix theta_;
  std::vector<double> kappa_;
  double basis_cond_;
};

// Empty kappa means (1, ..., 1).  Requires a real, simple spectrum
// (|Im l| <= 1e-10 max(1, max |l|)); otherwise DomainError listing the
// complex eigenvalues.
MetricOperator build_metric(const DenseMatrix& m, const std::vector<double>& kappa = {});

// ||Theta_1 / ||Theta_1||_F - Theta_2 / ||Theta_2||_F||_F
double metric_family_distinct(const DenseMatrix& m, const std::vector<double>& kappa1,
                              const std::vector<double>& kappa2);

struct ConditioningPoint {
  double param = 0;
  bool ok = false;
  double min_eig = 0;  // of Theta / ||Theta||_F
  double cond = 0;
  double relative_residual = 0;
  std::string error;  // set when the metric could not be built
};

// Failures at individual points are recorded, not thrown.
std::vector<ConditioningPoint> metric_conditioning_sweep(const models::ModelSpec& model,
                                                         const std::vector<double>& grid,
                                                         const std::vector<double>& kappa = {});

// <<psi|phi>> = (Theta psi)^H phi
cdouble physical_inner_product(const DenseMatrix& theta, const DenseVector& psi, const DenseVector& phi);

}  // namespace epkit::metric
