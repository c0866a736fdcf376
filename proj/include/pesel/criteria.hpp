#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "pesel/matrix.hpp"

namespace pesel {

/// Asymptotic regime the criterion is built for. NGrows integrates out the
/// scores and consumes the rows spectrum; PGrows integrates out the loadings
/// and consumes the columns spectrum.
enum class Asymptotic { NGrows, PGrows };

/// Hetero leaves the top-k eigenvalues free; Homo constrains them equal.
enum class EigenStructure { Hetero, Homo };

struct PeselVariant {
  Asymptotic asymptotic = Asymptotic::NGrows;
  EigenStructure structure = EigenStructure::Hetero;

  bool operator==(const PeselVariant&) const = default;
};

inline constexpr PeselVariant kHeteroN{Asymptotic::NGrows, EigenStructure::Hetero};
inline constexpr PeselVariant kHomoN{Asymptotic::NGrows, EigenStructure::Homo};
inline constexpr PeselVariant kHeteroP{Asymptotic::PGrows, EigenStructure::Hetero};
inline constexpr PeselVariant kHomoP{Asymptotic::PGrows, EigenStructure::Homo};
inline constexpr PeselVariant kAllVariants[] = {kHeteroN, kHomoN, kHeteroP, kHomoP};

Orientation orientation_of(PeselVariant variant);

/// "hetero-n", "homo-n", "hetero-p" or "homo-p".
std::string_view variant_name(PeselVariant variant);
std::optional<PeselVariant> parse_variant(std::string_view name);

struct ScoreParts {
  Index k = 0;
  double loglik = 0.0;   // profile semi-integrated log-likelihood
  double penalty = 0.0;  // log(sample count) * effective_dimension / 2
  double total = 0.0;    // loglik - penalty
  double sigma2_hat = 0.0;

  bool operator==(const ScoreParts&) const = default;
};

struct CriterionTrace {
  PeselVariant variant;
  Index n = 0;
  Index p = 0;
  std::vector<ScoreParts> scores;  // consecutive k starting at scores.front().k
};

struct SelectionResult {
  Index k_selected = 0;
  CriterionTrace trace;
  bool tie_broken = false;
};

/// Totals within this absolute distance of the maximum count as tied.
inline constexpr double kTieTolerance = 1e-9;

/// Free-parameter count of the semi-integrated model at rank k.
long long effective_dimension(PeselVariant variant, Index n, Index p, Index k);

/// Mean of the eigenvalues past the first k.
double sigma2_hat(const EigenSpectrum& spectrum, Index k);

/// PESEL score at rank k. A zero residual variance (or a zero top-k
/// eigenvalue under Hetero) yields loglik = total = -inf.
ScoreParts pesel_score(const EigenSpectrum& spectrum, PeselVariant variant, Index n, Index p, Index k);

/// Scores for k = 0..k_max; requires 1 <= k_max <= min(n, p) - 1.
CriterionTrace pesel_trace(const DataMatrix& x, PeselVariant variant, Index k_max);

/// Same as pesel_trace but over a precomputed spectrum.
CriterionTrace pesel_trace(const EigenSpectrum& spectrum, PeselVariant variant, Index n, Index p, Index k_max);

SelectionResult select_k(CriterionTrace trace);

/// PGrows/Hetero when p > n, NGrows/Hetero otherwise.
PeselVariant auto_variant(Index n, Index p);

}  // namespace pesel
