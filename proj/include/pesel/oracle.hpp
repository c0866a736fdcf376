#pragma once

#include "pesel/criteria.hpp"
#include "pesel/matrix.hpp"

// Brute-force evaluation of the profile semi-integrated likelihood. Builds
// the fitted covariance explicitly and evaluates Gaussian densities sample by
// sample, so it shares no eigenvalue shortcuts with the closed-form criteria.
// Meant for verification at small sizes (ambient dimension in the tens).

namespace pesel::oracle {

struct MlEstimates {
  Vector mu;          // sample mean over the sample axis
  Matrix w_hat;       // ambient x k
  double sigma2 = 0;  // residual eigenvalue mean
  double beta = 0;    // Homo only: mean(top-k) - sigma2
};

/// Maximum-likelihood estimates from an explicit covariance eigensolve.
/// Hetero requires the k-th eigenvalue to exceed sigma2 (SpikeBelowNoiseError
/// otherwise); the rotation is fixed to the identity.
MlEstimates ml_estimates(const DataMatrix& x, Index k, EigenStructure structure, Orientation orientation);

/// Sum of log N(sample; mu, Sigma) with Sigma = W W^T + sigma2 I (Hetero) or
/// beta W W^T + sigma2 I (Homo), evaluated through a Cholesky factor.
double direct_sil_loglik(const DataMatrix& x, const MlEstimates& est, EigenStructure structure,
                         Orientation orientation);

/// Log of the maximised likelihood written in terms of the spectrum alone.
/// Returns -inf when a logarithm argument is zero.
double closed_form_sil(const EigenSpectrum& spectrum, Index samples, Index ambient, Index k,
                       EigenStructure structure);

}  // namespace pesel::oracle
