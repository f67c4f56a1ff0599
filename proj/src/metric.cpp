#include "epkit/metric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "epkit/eigen.hpp"
#include "epkit/errors.hpp"
#include "epkit/parallel.hpp"

namespace epkit::metric {

namespace {

std::string format_value(cdouble z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

double spectral_scale(const std::vector<cdouble>& v) {
  double s = 1;
  for (const auto& z : v) s = std::max(s, std::abs(z));
  return s;
}

void check_square(const DenseMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw std::invalid_argument("metric: matrix must be square and non-empty");
}

std::vector<double> resolve_kappa(std::vector<double> kappa, Eigen::Index n) {
  if (kappa.empty()) kappa.assign(static_cast<std::size_t>(n), 1.0);
  if (static_cast<Eigen::Index>(kappa.size()) != n)
    throw std::invalid_argument("metric: kappa has " + std::to_string(kappa.size()) + " entries, expected " +
                                std::to_string(n));
  for (double k : kappa)
    if (!(k > 0) || !std::isfinite(k)) throw std::invalid_argument("metric: kappa entries must be positive and finite");
  return kappa;
}

Eigen::VectorXd hermitian_eigenvalues(const DenseMatrix& a) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

BiorthogonalBasis biorthogonal_basis(const DenseMatrix& m) {
  check_square(m);
  const auto d = eig_dense<ext>(widen<ext>(m));
  const Eigen::Index n = m.rows();

  std::vector<cdouble> values;
  for (const auto& v : d.values) values.push_back({static_cast<double>(v.real()), static_cast<double>(v.imag())});
  const double tol = 1e-7 * spectral_scale(values);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) < tol)
        throw DegenerateBasisError("basis degenerate: eigenvalues " + format_value(values[i]) + " and " +
                                   format_value(values[j]) + " form a cluster of radius below 1e-7");

  // Y^H = X^{-1}: the rows of the inverse are the left eigenvectors, already
  // paired with the right ones by column index.
  const DenseMatrixExt& x = d.right;
  const DenseMatrixExt xinv = x.fullPivLu().inverse();
  const DenseMatrixExt y = xinv.adjoint();

  BiorthogonalBasis b;
  b.values = std::move(values);
  b.right = x.cast<cdouble>();
  b.left = y.cast<cdouble>();
  Eigen::JacobiSVD<DenseMatrixExt> svd(x);
  const auto& sv = svd.singularValues();
  b.cond = static_cast<double>(sv(0) / sv(n - 1));
  b.biorthogonality_error = (b.left.adjoint() * b.right - DenseMatrix::Identity(n, n)).norm();
  b.ill_conditioned = !(b.cond <= 1e6);
  return b;
}

MetricOperator::MetricOperator(DenseMatrix source, DenseMatrix theta, std::vector<double> kappa, double basis_cond)
    : source_(std::move(source)), theta_(std::move(theta)), kappa_(std::move(kappa)), basis_cond_(basis_cond) {}

double MetricOperator::residual() const { return (source_.adjoint() * theta_ - theta_ * source_).norm(); }

double MetricOperator::relative_residual() const { return residual() / (source_.norm() * theta_.norm()); }

double MetricOperator::min_eig() const { return hermitian_eigenvalues(theta_).minCoeff(); }

double MetricOperator::max_eig() const { return hermitian_eigenvalues(theta_).maxCoeff(); }

DenseMatrix MetricOperator::normalized() const { return theta_ / theta_.norm(); }

double MetricOperator::normalized_min_eig() const { return min_eig() / theta_.norm(); }

MetricOperator build_metric(const DenseMatrix& m, const std::vector<double>& kappa_in) {
  check_square(m);
  const auto kappa = resolve_kappa(kappa_in, m.rows());

  // Reality is checked before the cluster test so a complex pair is reported
  // as such even when it is close to coalescing.
  std::vector<cdouble> vals;
  for (const auto& v : eigenvalues<ext>(widen<ext>(m)))
    vals.push_back({static_cast<double>(v.real()), static_cast<double>(v.imag())});
  const double scale = spectral_scale(vals);
  std::vector<cdouble> complex_ones;
  for (const auto& v : vals)
    if (std::abs(v.imag()) > 1e-10 * scale) complex_ones.push_back(v);
  if (!complex_ones.empty()) {
    std::string msg = "metric requires a real spectrum; complex eigenvalues:";
    for (const auto& v : complex_ones) msg += " " + format_value(v);
    throw DomainError(msg);
  }

  const auto b = biorthogonal_basis(m);
  const auto n = m.rows();
  const DenseMatrixExt y = b.left.cast<cext>();
  DenseMatrixExt k = DenseMatrixExt::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) k(i, i) = kappa[static_cast<std::size_t>(i)];
  DenseMatrixExt theta = y * k * y.adjoint();
  theta = (theta + theta.adjoint()) / 2.0L;
  MetricOperator out(m, theta.cast<cdouble>(), kappa, b.cond);
  // Beyond this the smallest eigenvalue of Theta is rounding, not signal.
  const double lo = out.min_eig(), hi = out.max_eig();
  if (!(lo > 0) || hi / lo > 1e13)
    throw DegenerateBasisError("basis degenerate: metric is numerically singular (cond(X) = " +
                               sci(b.cond) + ", min/max eigenvalue of Theta = " + sci(lo / hi) +
                               ")");
  return out;
}

double metric_family_distinct(const DenseMatrix& m, const std::vector<double>& kappa1,
                              const std::vector<double>& kappa2) {
  const auto a = build_metric(m, kappa1);
  const auto b = build_metric(m, kappa2);
  return (a.normalized() - b.normalized()).norm();
}

std::vector<ConditioningPoint> metric_conditioning_sweep(const models::ModelSpec& model,
                                                         const std::vector<double>& grid,
                                                         const std::vector<double>& kappa) {
  std::vector<ConditioningPoint> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    auto& p = out[i];
    p.param = grid[i];
    try {
      const auto mo = build_metric(models::dense_at(model, grid[i]), kappa);
      p.min_eig = mo.normalized_min_eig();
      p.cond = mo.cond();
      p.relative_residual = mo.relative_residual();
      p.ok = true;
    } catch (const DomainError& e) {
      p.error = e.what();
    }
  });
  return out;
}

cdouble physical_inner_product(const DenseMatrix& theta, const DenseVector& psi, const DenseVector& phi) {
  if (theta.rows() != theta.cols() || psi.size() != theta.rows() || phi.size() != theta.rows())
    throw std::invalid_argument("physical_inner_product: dimension mismatch");
  return (theta * psi).dot(phi);
}

}  // namespace epkit::metric
