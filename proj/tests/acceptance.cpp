// Acceptance checks. One PASS/FAIL/SKIP line per criterion; exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "pesel/bench.hpp"
#include "pesel/criteria.hpp"
#include "pesel/errors.hpp"
#include "pesel/matrix.hpp"
#include "pesel/oracle.hpp"
#include "pesel/simgen.hpp"

using namespace pesel;

namespace {

// Tolerances and thresholds.
constexpr double kOracleRelTol = 1e-8;
constexpr double kOracleSeconds = 10.0;
constexpr double kDualityAbsTol = 1e-10;
constexpr double kScalingRelTol = 1e-8;
constexpr double kRecoveryMin = 0.90;
constexpr double kScenario2Seconds = 300.0;
constexpr double kRobustMeanMax = 6.0;
constexpr double kBaselineMeanMin = 6.0;
constexpr double kHomoHeteroSlack = 0.05;
constexpr double kSpreadTol = 1e-6;
constexpr double kStandardizeTol = 1e-8;
constexpr int kMaxIterations = 100;
constexpr int kReplicates = 100;

struct Outcome {
  enum class Status { Pass, Fail, Skip } status;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::Fail, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return ok ? pass(std::move(d)) : fail(std::move(d)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix gaussian(Index n, Index p, std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = z(gen);
  return m;
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(20240101);
  std::uniform_int_distribution<Index> pick_n(6, 12), pick_p(4, 10);
  double worst = 0;
  int compared = 0, unreachable = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = pick_n(gen), p = pick_p(gen);
    const DataMatrix x(gaussian(n, p, gen));
    for (const auto o : {Orientation::RowsModel, Orientation::ColumnsModel}) {
      const auto spectrum = covariance_spectrum(x, o);
      const Index samples = sample_count(n, p, o);
      for (const auto st : {EigenStructure::Hetero, EigenStructure::Homo}) {
        for (Index k = 0; k <= std::min(n, p) - 2; ++k) {
          oracle::MlEstimates est;
          try {
            est = oracle::ml_estimates(x, k, st, o);
          } catch (const SpikeBelowNoiseError&) {
            ++unreachable;
            continue;
          }
          const double closed = oracle::closed_form_sil(spectrum, samples, spectrum.ambient_dim, k, st);
          const double direct = oracle::direct_sil_loglik(x, est, st, o);
          worst = std::max(worst, std::abs(closed - direct) / std::abs(closed));
          ++compared;
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << compared << " comparisons (" << unreachable << " k without ML solution), worst rel diff " << worst << " < "
    << kOracleRelTol << ", " << secs << " s < " << kOracleSeconds << " s";
  return verdict(compared > 0 && worst < kOracleRelTol && secs < kOracleSeconds, d.str());
}

Outcome transposition_duality() {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<Index> pick(4, 40);
  double worst = 0;
  bool inf_mismatch = false;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = pick(gen), p = pick(gen);
    const Matrix m = gaussian(n, p, gen);
    const Index k_max = std::min(n, p) - 1;
    const std::pair<PeselVariant, PeselVariant> pairs[] = {{kHeteroP, kHeteroN}, {kHomoP, kHomoN}};
    for (const auto& [pv, nv] : pairs) {
      const auto a = pesel_trace(DataMatrix(m), pv, k_max);
      const auto b = pesel_trace(DataMatrix(Matrix(m.transpose())), nv, k_max);
      for (std::size_t k = 0; k < a.scores.size(); ++k) {
        const double x = a.scores[k].total, y = b.scores[k].total;
        if (std::isinf(x) || std::isinf(y)) {
          inf_mismatch |= x != y;
          continue;
        }
        worst = std::max(worst, std::abs(x - y));
      }
    }
  }
  std::ostringstream d;
  d << "worst abs diff " << worst << " < " << kDualityAbsTol << (inf_mismatch ? ", infinite totals disagree" : "");
  return verdict(!inf_mismatch && worst < kDualityAbsTol, d.str());
}

Outcome scaling_invariance() {
  std::vector<Matrix> inputs;
  std::mt19937_64 gen(99);
  for (int i = 0; i < 20; ++i) inputs.push_back(gaussian(15 + i % 5, 9 + i % 7, gen));
  for (int i = 0; i < 20; ++i) {
    sim::ScenarioSpec spec{sim::Scenario::FixedEffect, 30, 60, 3, 2.0, static_cast<std::uint64_t>(500 + i)};
    inputs.push_back(sim::generate(spec).x.values());
  }
  double worst = 0;
  int k_mismatch = 0;
  for (const auto& m : inputs) {
    const Index k_max = std::min(m.rows(), m.cols()) - 1;
    for (const auto v : kAllVariants) {
      const auto base = pesel_trace(DataMatrix(m), v, k_max);
      const Index k0 = select_k(base).k_selected;
      for (const double c : {0.01, 1.0, 100.0}) {
        const auto scaled = pesel_trace(DataMatrix(Matrix(c * m)), v, k_max);
        k_mismatch += select_k(scaled).k_selected != k0;
        const Index s = sample_count(m.rows(), m.cols(), orientation_of(v));
        const Index a = ambient_count(m.rows(), m.cols(), orientation_of(v));
        const double expected = -0.5 * double(s) * double(a) * std::log(c * c);
        for (std::size_t k = 0; k < base.scores.size(); ++k) {
          const double x = base.scores[k].total, y = scaled.scores[k].total;
          if (std::isinf(x) || std::isinf(y)) {
            k_mismatch += x != y;
            continue;
          }
          worst = std::max(worst, std::abs((y - x) - expected) / std::max(1.0, std::abs(x)));
        }
      }
    }
  }
  std::ostringstream d;
  d << inputs.size() << " matrices x 4 variants x 3 scales, " << k_mismatch << " selection mismatches, worst rel shift error "
    << worst << " < " << kScalingRelTol;
  return verdict(k_mismatch == 0 && worst < kScalingRelTol, d.str());
}

Outcome penalty_formulas() {
  int checked = 0, wrong = 0;
  for (long long n : {2, 3, 7, 18, 50, 100, 2000})
    for (long long p : {2, 5, 50, 189, 800, 2000})
      for (long long k = 0; k <= std::min(n, p) - 1 && k <= 60; ++k) {
        const long long tri = k * (k + 1) / 2;
        const long long literal[] = {p * k - tri + k + p + 1, p * k - tri + p + 2, n * k - tri + k + n + 1,
                                     n * k - tri + n + 2};
        const PeselVariant variants[] = {kHeteroN, kHomoN, kHeteroP, kHomoP};
        for (int i = 0; i < 4; ++i) {
          ++checked;
          wrong += effective_dimension(variants[i], n, p, k) != literal[i];
        }
      }
  return verdict(wrong == 0, std::to_string(checked) + " (variant, n, p, k) points, " + std::to_string(wrong) + " mismatches");
}

std::map<std::string, bench::CellSummary> run_cells(std::vector<bench::CellTemplate> cells,
                                                     std::vector<std::string> methods, std::uint64_t seed) {
  bench::BenchmarkConfig config;
  config.cells = std::move(cells);
  config.replications = kReplicates;
  for (const auto& m : methods) config.methods.push_back(bench::Method::parse(m));
  config.k_max = 20;
  config.base_seed = seed;
  std::map<std::string, bench::CellSummary> out;
  for (auto& s : bench::summarize(bench::run_benchmark(config))) out[s.cell_id + "/" + s.method] = s;
  return out;
}

std::string fmt(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

Outcome scenario2_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_cells({{sim::Scenario::FixedEffect, {100}, {800}, 5, {4.0}, {}},
                            {sim::Scenario::FixedEffect, {50}, {2000}, 5, {1.0}, {}}},
                           {"hetero-p", "hetero-n"}, 2);
  const double secs = seconds_since(t0);
  const double strong = r.at("fixed-effect_n100_p800_k5_snr4/hetero-p").recovery_rate;
  const double wide_p = r.at("fixed-effect_n50_p2000_k5_snr1/hetero-p").recovery_rate;
  const double wide_n = r.at("fixed-effect_n50_p2000_k5_snr1/hetero-n").recovery_rate;
  const double strong_mean = r.at("fixed-effect_n100_p800_k5_snr4/hetero-p").mean_k;
  const bool ok = strong >= kRecoveryMin && wide_p > wide_n && secs < kScenario2Seconds;
  return verdict(ok, "n100 p800 snr4 hetero-p recovery " + fmt(strong) + " (mean k " + fmt(strong_mean) + ") >= " +
                         fmt(kRecoveryMin) + "; n50 p2000 snr1 hetero-p " + fmt(wide_p) + " > hetero-n " + fmt(wide_n) +
                         "; " + fmt(secs) + " s");
}

Outcome scenario4_robustness() {
  const auto r = run_cells({{sim::Scenario::SurplusVars, {100}, {800}, 5, {1.0, 4.0, 8.0}, {}}},
                           {"hetero-p", "var-threshold:0.9"}, 4);
  bool ok = true;
  std::string d;
  for (const char* snr : {"1", "4", "8"}) {
    const double m = r.at(std::string("surplus-vars_n100_p800_k5_snr") + snr + "/hetero-p").mean_k;
    ok &= m <= kRobustMeanMax;
    d += "snr" + std::string(snr) + " hetero-p mean " + fmt(m) + "; ";
  }
  const double base = r.at("surplus-vars_n100_p800_k5_snr8/var-threshold:0.9").mean_k;
  ok &= base > kBaselineMeanMin;
  return verdict(ok, d + "var-threshold:0.9 mean at snr8 " + fmt(base) + " > " + fmt(kBaselineMeanMin));
}

Outcome homo_vs_hetero() {
  const auto r = run_cells({{sim::Scenario::EqualSpectrum, {100}, {50}, 5, {1.0}, {}},
                            {sim::Scenario::ExpSpectrum, {100}, {50}, 5, {1.0}, {}}},
                           {"homo-n", "hetero-n"}, 1);
  const double eq_homo = r.at("equal-spectrum_n100_p50_k5_snr1/homo-n").recovery_rate;
  const double eq_het = r.at("equal-spectrum_n100_p50_k5_snr1/hetero-n").recovery_rate;
  const double ex_homo = r.at("exp-spectrum_n100_p50_k5_snr1/homo-n").recovery_rate;
  const double ex_het = r.at("exp-spectrum_n100_p50_k5_snr1/hetero-n").recovery_rate;
  const double eq_mean = r.at("equal-spectrum_n100_p50_k5_snr1/homo-n").mean_k;
  const double ex_mean = r.at("exp-spectrum_n100_p50_k5_snr1/hetero-n").mean_k;
  const bool ok = eq_homo >= eq_het - kHomoHeteroSlack && ex_het >= ex_homo - kHomoHeteroSlack;
  return verdict(ok, "equal: homo " + fmt(eq_homo) + " vs hetero " + fmt(eq_het) + " (homo mean k " + fmt(eq_mean) +
                         "); exp: hetero " + fmt(ex_het) + " vs homo " + fmt(ex_homo) + " (hetero mean k " +
                         fmt(ex_mean) + ")");
}

Outcome algorithm1_contract() {
  std::mt19937_64 gen(31337);
  double worst_spread = 0, worst_std = 0;
  int worst_iter = 0;
  bool all_converged = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = sim::equalize_singular_values(gaussian(100, 50, gen), 5, kSpreadTol, kMaxIterations);
    Eigen::BDCSVD<Matrix> svd(r.signal);
    const Vector top = svd.singularValues().head(5);
    worst_spread = std::max(worst_spread, (top.maxCoeff() - top.minCoeff()) / top.mean());
    for (Index j = 0; j < r.signal.cols(); ++j) {
      worst_std = std::max(worst_std, std::abs(r.signal.col(j).mean()));
      worst_std = std::max(worst_std, std::abs(r.signal.col(j).norm() - 1.0));
    }
    worst_iter = std::max(worst_iter, r.iterations);
    all_converged &= r.converged;
  }
  const bool ok = all_converged && worst_spread < kSpreadTol && worst_std < kStandardizeTol && worst_iter <= kMaxIterations;
  return verdict(ok, "worst spread " + fmt(worst_spread) + ", worst standardization error " + fmt(worst_std) +
                         ", max iterations " + std::to_string(worst_iter));
}

Outcome real_data() {
  const char* path = std::getenv("PESEL_URINE_CSV");
  if (!path || !*path) return {Outcome::Status::Skip, "set PESEL_URINE_CSV to an 18 x 189 numeric CSV"};
  DataMatrix x = [&] {
    try {
      return load_csv(path, CsvOptions{});
    } catch (const ParseError&) {
      return load_csv(path, CsvOptions{true, ','});
    }
  }();
  const Index k_max = std::min(x.rows(), x.cols()) - 1;
  const auto kp = select_k(pesel_trace(x, kHeteroP, k_max)).k_selected;
  const auto kn = select_k(pesel_trace(x, kHeteroN, k_max)).k_selected;
  return verdict(kp == 1 && kn == 2, std::to_string(x.rows()) + " x " + std::to_string(x.cols()) + ": hetero-p " +
                                         std::to_string(kp) + " (want 1), hetero-n " + std::to_string(kn) +
                                         " (want 2)");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle-equivalence", oracle_equivalence},
      {"transposition-duality", transposition_duality},
      {"scaling-invariance", scaling_invariance},
      {"penalty-formulas", penalty_formulas},
      {"scenario2-recovery", scenario2_recovery},
      {"scenario4-robustness", scenario4_robustness},
      {"homo-vs-hetero", homo_vs_hetero},
      {"algorithm1-contract", algorithm1_contract},
      {"real-data", real_data},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Outcome::Status::Pass ? "PASS" : o.status == Outcome::Status::Fail ? "FAIL" : "SKIP";
    failures += o.status == Outcome::Status::Fail;
    std::printf("%s %-22s %s\n", tag, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
