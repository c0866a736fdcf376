#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/SVD>

#include "pesel/errors.hpp"
#include "pesel/rng.hpp"
#include "pesel/simgen.hpp"

namespace pesel::sim {
namespace {

constexpr std::uint64_t kSignalStream = 0x5349474E414CULL;  // "SIGNAL"
constexpr std::uint64_t kNoiseStream = 0x4E4F495345ULL;     // "NOISE"

struct ScenarioEntry {
  Scenario value;
  std::string_view name;
};
constexpr ScenarioEntry kScenarios[] = {
    {Scenario::EqualSpectrum, "equal-spectrum"}, {Scenario::ExpSpectrum, "exp-spectrum"},
    {Scenario::FixedEffect, "fixed-effect"},     {Scenario::StudentNoise, "student-noise"},
    {Scenario::SurplusVars, "surplus-vars"},
};

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw LinAlgError("singular value decomposition failed");
  return svd;
}

double spread_of(const Vector& s, Index k) {
  const auto top = s.head(k);
  const double mean = top.mean();
  if (!(mean > 0.0)) return std::numeric_limits<double>::infinity();
  return (top.maxCoeff() - top.minCoeff()) / mean;
}

void require_rank_arg(const Matrix& m, Index k) {
  if (k < 1 || k > std::min(m.rows(), m.cols()))
    throw DomainError("rank " + std::to_string(k) + " outside 1.." + std::to_string(std::min(m.rows(), m.cols())));
}

}  // namespace

std::string_view scenario_name(Scenario s) {
  for (const auto& e : kScenarios)
    if (e.value == s) return e.name;
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (const auto& e : kScenarios)
    if (e.name == name) return e.value;
  // Numbered aliases: 1a/1b are the two spectrum schemes of the first study.
  if (name == "1a") return Scenario::EqualSpectrum;
  if (name == "1b") return Scenario::ExpSpectrum;
  if (name == "2") return Scenario::FixedEffect;
  if (name == "3") return Scenario::StudentNoise;
  if (name == "4") return Scenario::SurplusVars;
  return std::nullopt;
}

std::string_view scaling_name(StudentScaling s) {
  return s == StudentScaling::VarianceMatched ? "variance-matched" : "inverse-snr";
}

std::optional<StudentScaling> parse_scaling(std::string_view name) {
  if (name == "variance-matched") return StudentScaling::VarianceMatched;
  if (name == "inverse-snr") return StudentScaling::InverseSnr;
  return std::nullopt;
}

void validate(const ScenarioSpec& spec) {
  std::ostringstream msg;
  if (spec.n < 2 || spec.p < 2) {
    msg << "n and p must be at least 2 (got n=" << spec.n << ", p=" << spec.p << ")";
  } else if (spec.k_true < 1 || spec.k_true > std::min(spec.n, spec.p)) {
    msg << "k_true=" << spec.k_true << " must lie in 1..min(n, p)=" << std::min(spec.n, spec.p);
  } else if (!(spec.snr > 0.0) || !std::isfinite(spec.snr)) {
    msg << "snr must be a positive finite number (got " << spec.snr << ")";
  } else if (spec.scenario == Scenario::SurplusVars && spec.p % 2 != 0) {
    msg << "surplus-vars needs an even p (got " << spec.p << ")";
  } else {
    return;
  }
  throw DomainError(msg.str());
}

std::uint64_t signal_seed(const ScenarioSpec& spec) { return mix_seed(spec.seed, kSignalStream); }

std::uint64_t noise_seed(const ScenarioSpec& spec) {
  return mix_seed(mix_seed(spec.seed, kNoiseStream), spec.replicate);
}

Matrix standardize_columns(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const double scale = m.col(j).norm();
    const auto centered = m.col(j).array() - m.col(j).mean();
    const double norm = centered.matrix().norm();
    if (!(norm > 1e-12 * scale))
      throw DegenerateSignalError("column " + std::to_string(j) + " is constant and cannot be standardized");
    out.col(j) = centered / norm;
  }
  return out;
}

Matrix gen_fixed_effect_signal(Index n, Index p, Index k, std::uint64_t seed) {
  if (k < 1 || k > std::min(n, p)) throw DomainError("rank must lie in 1..min(n, p)");
  Rng rng(seed);
  Matrix t(n, k);
  Matrix w(p, k);
  for (Index c = 0; c < k; ++c)
    for (Index i = 0; i < n; ++i) t(i, c) = rng.normal();
  for (Index c = 0; c < k; ++c)
    for (Index j = 0; j < p; ++j) w(j, c) = rng.normal();
  return standardize_columns(t * w.transpose());
}

double top_singular_spread(const Matrix& m, Index k) {
  require_rank_arg(m, k);
  Eigen::BDCSVD<Matrix> svd(m);
  return spread_of(svd.singularValues(), k);
}

EqualizeResult equalize_singular_values(const Matrix& m, Index k, double tol, int max_iter) {
  require_rank_arg(m, k);
  EqualizeResult out;
  out.signal = m;
  while (true) {
    const auto svd = thin_svd(out.signal);
    out.spread = spread_of(svd.singularValues(), k);
    if (out.spread < tol) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= max_iter) return out;

    const double mean = svd.singularValues().head(k).mean();
    out.signal = standardize_columns(mean * svd.matrixU().leftCols(k) * svd.matrixV().leftCols(k).transpose());
    ++out.iterations;
  }
}

ExpShapeResult exp_singular_values(const Matrix& m, Index k) {
  require_rank_arg(m, k);
  const auto svd = thin_svd(m);
  const Vector& s = svd.singularValues();

  ExpShapeResult out;
  double weight = 0.0;
  for (Index i = 1; i <= k; ++i) weight += std::ldexp(1.0, static_cast<int>(-i));
  const double c = s.head(k).sum() / weight;

  Vector assigned(k);
  for (Index i = 1; i <= k; ++i) {
    assigned(i - 1) = c * std::ldexp(1.0, static_cast<int>(-i));
    out.original.push_back(s(i - 1));
    out.assigned.push_back(assigned(i - 1));
  }
  out.unstandardized = svd.matrixU().leftCols(k) * assigned.asDiagonal() * svd.matrixV().leftCols(k).transpose();
  out.signal = standardize_columns(out.unstandardized);
  return out;
}

Matrix add_noise(const Matrix& m, double snr, NoiseFamily family, StudentScaling scaling, std::uint64_t seed) {
  if (!(snr > 0.0)) throw DomainError("snr must be positive");
  Rng rng(seed);
  Matrix out = m;
  if (family == NoiseFamily::Gaussian) {
    const double sd = std::sqrt(1.0 / snr);
    for (Index j = 0; j < out.cols(); ++j)
      for (Index i = 0; i < out.rows(); ++i) out(i, j) += sd * rng.normal();
    return out;
  }
  // t(3) has variance 3.
  const double scale =
      scaling == StudentScaling::VarianceMatched ? std::sqrt(1.0 / (3.0 * snr)) : std::sqrt(1.0 / 3.0) / snr;
  for (Index j = 0; j < out.cols(); ++j)
    for (Index i = 0; i < out.rows(); ++i) out(i, j) += scale * rng.student_t3();
  return out;
}

Matrix append_noise_vars(const Matrix& x, Index count, std::uint64_t seed) {
  if (count < 1) throw DomainError("count must be at least 1");
  Rng rng(seed);
  Matrix out(x.rows(), x.cols() + count);
  out.leftCols(x.cols()) = x;
  for (Index j = x.cols(); j < out.cols(); ++j)
    for (Index i = 0; i < out.rows(); ++i) out(i, j) = rng.normal();
  return out;
}

Signal generate_signal(const ScenarioSpec& spec) {
  validate(spec);
  Signal out;
  Matrix base = gen_fixed_effect_signal(spec.n, spec.p, spec.k_true, signal_seed(spec));
  switch (spec.scenario) {
    case Scenario::EqualSpectrum: {
      auto eq = equalize_singular_values(base, spec.k_true);
      if (!eq.converged) {
        std::ostringstream msg;
        msg << "singular value equalization stopped after " << eq.iterations << " iterations with spread "
            << eq.spread;
        out.warnings.push_back(msg.str());
      }
      out.m = std::move(eq.signal);
      break;
    }
    case Scenario::ExpSpectrum:
      out.m = exp_singular_values(base, spec.k_true).signal;
      break;
    default:
      out.m = std::move(base);
  }
  return out;
}

SimulatedDataset realize(const ScenarioSpec& spec, const Signal& signal) {
  validate(spec);
  if (signal.m.rows() != spec.n || signal.m.cols() != spec.p) throw DomainError("signal shape does not match spec");

  const auto family = spec.scenario == Scenario::StudentNoise ? NoiseFamily::Student3 : NoiseFamily::Gaussian;
  const std::uint64_t seed = noise_seed(spec);
  Matrix x = add_noise(signal.m, spec.snr, family, spec.student_scaling, seed);
  if (spec.scenario == Scenario::SurplusVars) x = append_noise_vars(x, spec.p / 2, mix_seed(seed, 1));

  return SimulatedDataset{DataMatrix(std::move(x)), DataMatrix(signal.m), spec, signal.warnings};
}

SimulatedDataset generate(const ScenarioSpec& spec) { return realize(spec, generate_signal(spec)); }

}  // namespace pesel::sim
