#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "pesel/criteria.hpp"
#include "pesel/simgen.hpp"

namespace pesel::bench {

inline constexpr int kRecordsSchemaVersion = 1;
inline constexpr int kSummarySchemaVersion = 1;

/// One grid of experiment cells: every (n, p, snr) combination.
struct CellTemplate {
  sim::Scenario scenario = sim::Scenario::FixedEffect;
  std::vector<Index> n;
  std::vector<Index> p;
  Index k_true = 5;
  std::vector<double> snr_grid;
  sim::StudentScaling student_scaling = sim::StudentScaling::VarianceMatched;
};

/// A PESEL variant or the cumulative-variance baseline.
struct Method {
  enum class Kind { Pesel, VarianceThreshold };
  Kind kind = Kind::Pesel;
  PeselVariant variant;
  double fraction = 0.9;

  /// "hetero-p", ..., or "var-threshold:<fraction>".
  std::string id() const;
  static Method parse(std::string_view id);  // throws ConfigError
};

struct BenchmarkConfig {
  std::vector<CellTemplate> cells;
  int replications = 100;
  std::vector<Method> methods;
  Index k_max = 20;
  std::uint64_t base_seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct Cell {
  std::size_t index = 0;
  std::string id;
  sim::ScenarioSpec spec;  // replicate field left at 0
};

struct BenchmarkRecord {
  std::string cell_id;
  std::size_t cell_index = 0;
  sim::ScenarioSpec spec;
  std::string method;
  Index k_selected = -1;  // -1 when degenerate
  double runtime_ms = 0;
  bool degenerate = false;
};

struct CellSummary {
  std::string cell_id;
  sim::ScenarioSpec spec;
  std::string method;
  int replications = 0;
  int degenerate = 0;
  double mean_k = 0;  // NaN when every replicate was degenerate
  Index mode_k = -1;  // smallest most frequent value
  std::map<Index, int> frequencies;
  double recovery_rate = 0;  // exact hits over all replicates
};

/// Expands the cell templates in order: template, n, p, snr.
std::vector<Cell> expand_cells(const BenchmarkConfig& config);

/// Every cell x replicate x method, ordered by (cell, replicate, method).
/// Signals are drawn once per cell; noise per replicate. Failures inside a
/// method are recorded as degenerate, never propagated.
std::vector<BenchmarkRecord> run_benchmark(const BenchmarkConfig& config);

/// One summary per (cell, method), in first-seen order.
std::vector<CellSummary> summarize(const std::vector<BenchmarkRecord>& records);

/// Smallest k whose leading eigenvalues explain at least `fraction` of the total.
Index variance_threshold_baseline(const EigenSpectrum& spectrum, double fraction);

/// Parses and validates a config document; ConfigError lists offending keys.
BenchmarkConfig parse_config(const nlohmann::json& doc);
BenchmarkConfig load_config(const std::filesystem::path& path);

void write_records_csv(const std::filesystem::path& path, const std::vector<BenchmarkRecord>& records);
void write_timings_csv(const std::filesystem::path& path, const std::vector<BenchmarkRecord>& records);
void write_summary_csv(const std::filesystem::path& path, const std::vector<CellSummary>& summaries);

/// Runs a config file end to end, writing records.csv, summary.csv,
/// timings.csv and manifest.json into out_dir. The directory is checked for
/// writability before any computation.
void run_to_directory(const std::filesystem::path& config_path, const std::filesystem::path& out_dir);

}  // namespace pesel::bench
