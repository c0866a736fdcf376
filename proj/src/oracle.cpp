#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "pesel/errors.hpp"
#include "pesel/oracle.hpp"

namespace pesel::oracle {
namespace {

// Samples laid out as rows.
Matrix sample_rows(const DataMatrix& x, Orientation orientation) {
  return orientation == Orientation::RowsModel ? x.values() : Matrix(x.values().transpose());
}

}  // namespace

// Equal eigenvalues can differ from their mean by rounding only.
constexpr double kSpikeTolerance = 1e-10;

MlEstimates ml_estimates(const DataMatrix& x, Index k, EigenStructure structure, Orientation orientation) {
  const Matrix samples = sample_rows(x, orientation);
  const Index s = samples.rows();
  const Index a = samples.cols();
  if (k < 0 || k > a - 1) throw DomainError("rank " + std::to_string(k) + " outside 0.." + std::to_string(a - 1));

  MlEstimates est;
  est.mu = samples.colwise().mean().transpose();
  const Matrix centered = samples.rowwise() - est.mu.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(s);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw LinAlgError("covariance eigendecomposition failed");
  // Ascending order from the solver; reverse to descending.
  const Vector values = eig.eigenvalues().reverse();
  const Matrix vectors = eig.eigenvectors().rowwise().reverse();

  est.sigma2 = values.tail(a - k).sum() / static_cast<double>(a - k);
  const Matrix u = vectors.leftCols(k);

  if (structure == EigenStructure::Hetero) {
    if (k > 0 && !(values(k - 1) > est.sigma2 * (1.0 + kSpikeTolerance)))
      throw SpikeBelowNoiseError("eigenvalue " + std::to_string(k) + " does not exceed the noise variance");
    Vector scale(k);
    for (Index j = 0; j < k; ++j) scale(j) = std::sqrt(values(j) - est.sigma2);
    est.w_hat = u * scale.asDiagonal();
  } else {
    est.w_hat = u;
    est.beta = k > 0 ? values.head(k).mean() - est.sigma2 : 0.0;
  }
  return est;
}

double direct_sil_loglik(const DataMatrix& x, const MlEstimates& est, EigenStructure structure,
                         Orientation orientation) {
  const Matrix samples = sample_rows(x, orientation);
  const Index a = samples.cols();
  if (est.mu.size() != a || est.w_hat.rows() != a) throw DomainError("estimates do not match the data shape");

  const double factor = structure == EigenStructure::Homo ? est.beta : 1.0;
  const Matrix sigma = factor * est.w_hat * est.w_hat.transpose() + est.sigma2 * Matrix::Identity(a, a);

  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw LinAlgError("fitted covariance is not positive definite");
  const Matrix& l = llt.matrixL();
  double log_det = 0.0;
  for (Index j = 0; j < a; ++j) log_det += 2.0 * std::log(l(j, j));

  const double log_2pi = std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  for (Index i = 0; i < samples.rows(); ++i) {
    const Vector r = samples.row(i).transpose() - est.mu;
    const Vector z = llt.matrixL().solve(r);
    total += -0.5 * (static_cast<double>(a) * log_2pi + log_det + z.squaredNorm());
  }
  return total;
}

double closed_form_sil(const EigenSpectrum& spectrum, Index samples, Index ambient, Index k,
                       EigenStructure structure) {
  if (k < 0 || k > ambient - 1 || static_cast<Index>(spectrum.lambdas.size()) != ambient)
    throw DomainError("rank or spectrum length inconsistent with the ambient dimension");

  const auto& l = spectrum.lambdas;
  const double s = static_cast<double>(samples);
  const double a = static_cast<double>(ambient);

  double residual = 0.0;
  for (Index j = k; j < ambient; ++j) residual += l[static_cast<std::size_t>(j)];
  residual /= a - static_cast<double>(k);

  double log_top = 0.0;
  if (structure == EigenStructure::Hetero) {
    for (Index j = 0; j < k; ++j) log_top += std::log(l[static_cast<std::size_t>(j)]);
  } else if (k > 0) {
    double sum = 0.0;
    for (Index j = 0; j < k; ++j) sum += l[static_cast<std::size_t>(j)];
    log_top = static_cast<double>(k) * std::log(sum / static_cast<double>(k));
  }
  if (residual <= 0.0 || !std::isfinite(log_top)) return -std::numeric_limits<double>::infinity();

  return -(s * a / 2.0) * std::log(2.0 * std::numbers::pi) - (s / 2.0) * log_top -
         (s * (a - static_cast<double>(k)) / 2.0) * std::log(residual) - s * a / 2.0;
}

}  // namespace pesel::oracle
