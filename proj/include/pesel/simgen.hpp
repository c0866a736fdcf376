#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pesel/matrix.hpp"

namespace pesel::sim {

enum class Scenario {
  EqualSpectrum,  // fixed-effect signal, top-k singular values forced equal
  ExpSpectrum,    // fixed-effect signal, singular values halving
  FixedEffect,    // T W^T signal, Gaussian noise
  StudentNoise,   // as FixedEffect with t(3) noise
  SurplusVars,    // as FixedEffect plus p/2 pure-noise columns
};

enum class NoiseFamily { Gaussian, Student3 };

/// Scaling of t(3) noise. VarianceMatched gives noise variance 1/snr;
/// InverseSnr multiplies t(3) by sqrt(1/3)/snr, i.e. variance 1/snr^2.
enum class StudentScaling { VarianceMatched, InverseSnr };

struct ScenarioSpec {
  Scenario scenario = Scenario::FixedEffect;
  Index n = 0;
  Index p = 0;
  Index k_true = 0;
  double snr = 1.0;
  std::uint64_t seed = 0;       // fixes the signal matrix
  std::uint64_t replicate = 0;  // selects the noise draw for that signal
  StudentScaling student_scaling = StudentScaling::VarianceMatched;

  bool operator==(const ScenarioSpec&) const = default;
};

std::string_view scenario_name(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);
std::string_view scaling_name(StudentScaling s);
std::optional<StudentScaling> parse_scaling(std::string_view name);

/// Throws DomainError describing the first violated constraint.
void validate(const ScenarioSpec& spec);

/// Seeds of the signal and noise streams for a spec.
std::uint64_t signal_seed(const ScenarioSpec& spec);
std::uint64_t noise_seed(const ScenarioSpec& spec);

struct SimulatedDataset {
  DataMatrix x;  // observed data (n x p, or n x 3p/2 for SurplusVars)
  DataMatrix m;  // standardized signal, n x p
  ScenarioSpec spec;
  std::vector<std::string> warnings;
};

/// Centers every column and scales it to unit Euclidean norm.
Matrix standardize_columns(const Matrix& m);

/// standardize_columns(T W^T) with T (n x k) and W (p x k) standard normal.
Matrix gen_fixed_effect_signal(Index n, Index p, Index k, std::uint64_t seed);

struct EqualizeResult {
  Matrix signal;
  int iterations = 0;  // number of modify-and-standardize passes
  double spread = 0;   // (max - min) / mean of the top-k singular values
  bool converged = false;
};

/// Alternates "set the top-k singular values to their mean, drop the rest"
/// with column standardization until the top-k spread is below tol.
EqualizeResult equalize_singular_values(const Matrix& m, Index k, double tol = 1e-6, int max_iter = 100);

struct ExpShapeResult {
  Matrix signal;                    // after the final standardization
  Matrix unstandardized;            // rebuilt from the assigned singular values
  std::vector<double> original;     // top-k singular values of the input
  std::vector<double> assigned;     // C * 2^-i, i = 1..k
};

/// Single pass: top-k singular values become C * 2^-i with C chosen to keep
/// their sum, the rest are zeroed, then columns are standardized once.
ExpShapeResult exp_singular_values(const Matrix& m, Index k);

Matrix add_noise(const Matrix& m, double snr, NoiseFamily family, StudentScaling scaling, std::uint64_t seed);

/// Appends `count` i.i.d. N(0, 1) columns.
Matrix append_noise_vars(const Matrix& x, Index count, std::uint64_t seed);

struct Signal {
  Matrix m;
  std::vector<std::string> warnings;
};

/// The noiseless signal for a spec; depends on the seed only, not the replicate.
Signal generate_signal(const ScenarioSpec& spec);

/// Adds the spec's noise realization to a signal from generate_signal.
SimulatedDataset realize(const ScenarioSpec& spec, const Signal& signal);

SimulatedDataset generate(const ScenarioSpec& spec);

/// Relative spread (max - min) / mean of the k largest singular values.
double top_singular_spread(const Matrix& m, Index k);

}  // namespace pesel::sim
