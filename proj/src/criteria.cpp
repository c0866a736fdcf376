#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "pesel/criteria.hpp"
#include "pesel/errors.hpp"

namespace pesel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string describe(PeselVariant v) { return std::string(variant_name(v)); }

}  // namespace

Orientation orientation_of(PeselVariant variant) {
  return variant.asymptotic == Asymptotic::NGrows ? Orientation::RowsModel : Orientation::ColumnsModel;
}

std::string_view variant_name(PeselVariant variant) {
  const bool hetero = variant.structure == EigenStructure::Hetero;
  if (variant.asymptotic == Asymptotic::NGrows) return hetero ? "hetero-n" : "homo-n";
  return hetero ? "hetero-p" : "homo-p";
}

std::optional<PeselVariant> parse_variant(std::string_view name) {
  for (const auto v : kAllVariants)
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

long long effective_dimension(PeselVariant variant, Index n, Index p, Index k) {
  if (n < 1 || p < 1 || k < 0 || k > std::min(n, p) - 1)
    throw DomainError("rank " + std::to_string(k) + " outside 0.." + std::to_string(std::min(n, p) - 1));

  // Stiefel frame (dk - k(k+1)/2), eigenvalues (k or 1), mean (d), noise (1).
  const long long d = variant.asymptotic == Asymptotic::NGrows ? p : n;
  const long long kk = k;
  const long long frame = d * kk - kk * (kk + 1) / 2;
  const long long eigen = variant.structure == EigenStructure::Hetero ? kk : 1;
  return frame + eigen + d + 1;
}

double sigma2_hat(const EigenSpectrum& spectrum, Index k) {
  const Index dim = static_cast<Index>(spectrum.lambdas.size());
  if (k < 0 || k >= dim)
    throw DomainError("rank " + std::to_string(k) + " leaves no residual eigenvalues (dimension " +
                      std::to_string(dim) + ")");
  const double tail = std::accumulate(spectrum.lambdas.begin() + k, spectrum.lambdas.end(), 0.0);
  return tail / static_cast<double>(dim - k);
}

ScoreParts pesel_score(const EigenSpectrum& spectrum, PeselVariant variant, Index n, Index p, Index k) {
  if (spectrum.orientation != orientation_of(variant))
    throw DomainError("variant " + describe(variant) + " does not match the spectrum orientation");
  const Index ambient = ambient_count(n, p, spectrum.orientation);
  if (static_cast<Index>(spectrum.lambdas.size()) != ambient)
    throw DomainError("spectrum length does not match the matrix shape");

  ScoreParts out;
  out.k = k;
  out.sigma2_hat = sigma2_hat(spectrum, k);
  const long long dim = effective_dimension(variant, n, p, k);

  const double samples = static_cast<double>(sample_count(n, p, spectrum.orientation));
  const double a = static_cast<double>(ambient);
  out.penalty = std::log(samples) * static_cast<double>(dim) / 2.0;

  const auto top = spectrum.lambdas.begin();
  bool zero_top = false;
  double top_term = 0.0;  // sum of log eigenvalues over the signal subspace
  if (k > 0) {
    if (variant.structure == EigenStructure::Hetero) {
      for (Index j = 0; j < k; ++j) {
        const double l = top[j];
        if (l <= 0.0) zero_top = true;
        top_term += std::log(l);
      }
    } else {
      const double mean = std::accumulate(top, top + k, 0.0) / static_cast<double>(k);
      zero_top = mean <= 0.0;
      top_term = static_cast<double>(k) * std::log(mean);
    }
  }

  if (out.sigma2_hat <= 0.0 || zero_top) {
    out.loglik = kNegInf;
    out.total = kNegInf;
    return out;
  }

  out.loglik = -(samples * a / 2.0) * std::log(2.0 * std::numbers::pi) - (samples / 2.0) * top_term -
               (samples * (a - static_cast<double>(k)) / 2.0) * std::log(out.sigma2_hat) - samples * a / 2.0;
  out.total = out.loglik - out.penalty;
  return out;
}

CriterionTrace pesel_trace(const EigenSpectrum& spectrum, PeselVariant variant, Index n, Index p, Index k_max) {
  if (n < 2 || p < 2) throw DomainError("criteria need at least a 2 x 2 matrix");
  if (k_max < 1 || k_max > std::min(n, p) - 1)
    throw DomainError("k_max " + std::to_string(k_max) + " outside 1.." + std::to_string(std::min(n, p) - 1));
  if (spectrum.lambdas.empty() || spectrum.lambdas.front() <= 0.0)
    throw DegenerateDataError("centered data matrix is identically zero");

  CriterionTrace trace{variant, n, p, {}};
  trace.scores.reserve(static_cast<std::size_t>(k_max + 1));
  for (Index k = 0; k <= k_max; ++k) trace.scores.push_back(pesel_score(spectrum, variant, n, p, k));
  return trace;
}

CriterionTrace pesel_trace(const DataMatrix& x, PeselVariant variant, Index k_max) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (n < 2 || p < 2) throw DomainError("criteria need at least a 2 x 2 matrix");
  if (k_max < 1 || k_max > std::min(n, p) - 1)
    throw DomainError("k_max " + std::to_string(k_max) + " outside 1.." + std::to_string(std::min(n, p) - 1));
  return pesel_trace(covariance_spectrum(x, orientation_of(variant)), variant, n, p, k_max);
}

SelectionResult select_k(CriterionTrace trace) {
  if (trace.scores.empty()) throw DegenerateDataError("empty criterion trace");

  double best = kNegInf;
  for (const auto& s : trace.scores)
    if (s.total > best) best = s.total;
  if (!std::isfinite(best)) throw DegenerateDataError("every candidate rank scored -inf");

  SelectionResult out;
  std::size_t tied = 0;
  for (const auto& s : trace.scores) {
    if (std::isfinite(s.total) && best - s.total <= kTieTolerance) {
      if (tied == 0) out.k_selected = s.k;
      ++tied;
    }
  }
  out.tie_broken = tied > 1;
  out.trace = std::move(trace);
  return out;
}

PeselVariant auto_variant(Index n, Index p) { return p > n ? kHeteroP : kHeteroN; }

}  // namespace pesel
