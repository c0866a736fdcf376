#include <numbers>

#include "doctest.h"
#include "helpers.hpp"

#include "pesel/criteria.hpp"
#include "pesel/errors.hpp"
#include "pesel/oracle.hpp"

using namespace pesel;
using namespace pesel::oracle;

namespace {

constexpr EigenStructure kStructures[] = {EigenStructure::Hetero, EigenStructure::Homo};
constexpr Orientation kOrientations[] = {Orientation::RowsModel, Orientation::ColumnsModel};

// Orthonormal zero-mean columns scaled by `scales`: its sample covariance is
// exactly diag(scales^2) / n up to rounding.
Matrix diagonal_covariance_data(Index n, const std::vector<double>& scales, std::uint64_t seed) {
  const Index p = static_cast<Index>(scales.size());
  Matrix g = testing::gaussian(n, p, seed);
  g = g.rowwise() - g.colwise().mean();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, p);
  for (Index j = 0; j < p; ++j) q.col(j) *= scales[static_cast<std::size_t>(j)] * std::sqrt(double(n));
  return q;
}

}  // namespace

TEST_SUITE("reference-oracle") {
  TEST_CASE("k = 0 estimates") {
    const DataMatrix x(testing::gaussian(9, 5, 1));
    const auto est = ml_estimates(x, 0, EigenStructure::Hetero, Orientation::RowsModel);
    CHECK(est.w_hat.cols() == 0);
    const auto s = covariance_spectrum(x, Orientation::RowsModel);
    double mean = 0;
    for (double l : s.lambdas) mean += l / 5.0;
    CHECK(testing::rel_diff(est.sigma2, mean) < 1e-12);
    CHECK(testing::rel_diff(est.mu(2), x.values().col(2).mean()) < 1e-14);
  }

  TEST_CASE("loadings align with coordinate axes for diagonal covariance") {
    const Matrix m = diagonal_covariance_data(30, {5, 3, 1, 0.5, 0.25}, 42);
    const auto est = ml_estimates(DataMatrix(m), 2, EigenStructure::Homo, Orientation::RowsModel);
    CHECK(std::abs(std::abs(est.w_hat(0, 0)) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(est.w_hat(1, 1)) - 1.0) < 1e-10);
    CHECK(est.w_hat.col(0).tail(4).norm() < 1e-10);

    const auto het = ml_estimates(DataMatrix(m), 2, EigenStructure::Hetero, Orientation::RowsModel);
    const Matrix gram = het.w_hat.transpose() * het.w_hat;
    CHECK(std::abs(gram(0, 0) - (25 - het.sigma2)) < 1e-9);
    CHECK(std::abs(gram(0, 1)) < 1e-9);
  }

  TEST_CASE("Homo beta with equal top eigenvalues") {
    const Matrix m = diagonal_covariance_data(40, {2, 2, 2, 1, 0.5}, 7);
    const auto est = ml_estimates(DataMatrix(m), 3, EigenStructure::Homo, Orientation::RowsModel);
    CHECK(std::abs(est.beta - (4.0 - est.sigma2)) < 1e-10);
    CHECK(std::abs(est.sigma2 - (1.0 + 0.25) / 2) < 1e-10);
  }

  TEST_CASE("Hetero spike at the noise level is unreachable") {
    const Matrix m = diagonal_covariance_data(20, {1, 1, 1, 1}, 3);
    CHECK_THROWS_AS(ml_estimates(DataMatrix(m), 1, EigenStructure::Hetero, Orientation::RowsModel),
                    SpikeBelowNoiseError);
  }

  TEST_CASE("direct likelihood at k = 0 has the isotropic closed form") {
    const DataMatrix x(testing::gaussian(8, 5, 9));
    const auto est = ml_estimates(x, 0, EigenStructure::Hetero, Orientation::RowsModel);
    const Matrix c = center(x, Orientation::RowsModel).values();
    const double expected = -(8.0 * 5.0 / 2) * (std::log(2 * std::numbers::pi) + std::log(est.sigma2)) -
                            c.squaredNorm() / (2 * est.sigma2);
    CHECK(testing::rel_diff(direct_sil_loglik(x, est, EigenStructure::Hetero, Orientation::RowsModel), expected) <
          1e-12);
  }

  TEST_CASE("closed form by direct substitution") {
    EigenSpectrum s;
    s.lambdas = {2, 1};
    s.ambient_dim = 2;
    const double expected = -10 * std::log(2 * std::numbers::pi) - 5 * std::log(2.0) - 5 * std::log(1.0) - 10;
    CHECK(closed_form_sil(s, 10, 2, 1, EigenStructure::Hetero) == doctest::Approx(expected).epsilon(1e-15));
    s.lambdas = {2, 0};
    CHECK(closed_form_sil(s, 10, 2, 1, EigenStructure::Hetero) == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("closed form matches the criteria log-likelihood") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DataMatrix x(testing::gaussian(7 + seed % 5, 5 + seed % 4, 50 + seed));
      const Index n = x.rows(), p = x.cols();
      for (const auto v : kAllVariants) {
        const auto s = covariance_spectrum(x, orientation_of(v));
        const Index samples = sample_count(n, p, s.orientation);
        for (Index k = 0; k < std::min(n, p); ++k) {
          const auto parts = pesel_score(s, v, n, p, k);
          const double cf = closed_form_sil(s, samples, s.ambient_dim, k, v.structure);
          if (std::isfinite(parts.loglik))
            CHECK(std::abs(cf - parts.loglik) < 1e-10);
          else
            CHECK(cf == parts.loglik);
        }
      }
    }
  }

  TEST_CASE("direct and closed-form likelihoods agree") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DataMatrix x(testing::gaussian(8, 5, 900 + seed));
      for (const auto o : kOrientations) {
        const auto s = covariance_spectrum(x, o);
        const Index samples = sample_count(8, 5, o);
        for (const auto st : kStructures) {
          for (Index k = 0; k <= 3; ++k) {
            MlEstimates est;
            try {
              est = ml_estimates(x, k, st, o);
            } catch (const SpikeBelowNoiseError&) {
              continue;
            }
            const double direct = direct_sil_loglik(x, est, st, o);
            const double closed = closed_form_sil(s, samples, s.ambient_dim, k, st);
            CHECK(testing::rel_diff(direct, closed) < 1e-8);
          }
        }
      }
    }
  }

  TEST_CASE("Homo and Hetero direct values coincide for equal top eigenvalues") {
    const DataMatrix x(diagonal_covariance_data(25, {3, 3, 1, 0.7, 0.2}, 11));
    const auto het = ml_estimates(x, 2, EigenStructure::Hetero, Orientation::RowsModel);
    const auto hom = ml_estimates(x, 2, EigenStructure::Homo, Orientation::RowsModel);
    const double a = direct_sil_loglik(x, het, EigenStructure::Hetero, Orientation::RowsModel);
    const double b = direct_sil_loglik(x, hom, EigenStructure::Homo, Orientation::RowsModel);
    CHECK(testing::rel_diff(a, b) < 1e-10);
  }

  TEST_CASE("likelihood does not depend on the loading rotation") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const DataMatrix x(testing::gaussian(12, 7, 40 + seed));
      auto est = ml_estimates(x, 3, EigenStructure::Hetero, Orientation::RowsModel);
      const double base = direct_sil_loglik(x, est, EigenStructure::Hetero, Orientation::RowsModel);
      est.w_hat = est.w_hat * testing::random_orthogonal(3, 80 + seed);
      CHECK(testing::rel_diff(direct_sil_loglik(x, est, EigenStructure::Hetero, Orientation::RowsModel), base) <
            1e-8);
    }
  }

  TEST_CASE("perturbing the ML loadings never raises the likelihood") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DataMatrix x(testing::gaussian(12, 6, 60 + seed));
      const auto o = seed % 2 ? Orientation::ColumnsModel : Orientation::RowsModel;
      const auto est = ml_estimates(x, 2, EigenStructure::Hetero, o);
      const double base = direct_sil_loglik(x, est, EigenStructure::Hetero, o);
      for (std::uint64_t trial = 0; trial < 10; ++trial) {
        auto moved = est;
        const Matrix delta = testing::gaussian(est.w_hat.rows(), est.w_hat.cols(), 1000 * seed + trial);
        moved.w_hat += 1e-3 * est.w_hat.norm() / delta.norm() * delta;
        const double perturbed = direct_sil_loglik(x, moved, EigenStructure::Hetero, o);
        CHECK(perturbed <= base + 1e-6 * std::abs(base));
      }
    }
  }
}
