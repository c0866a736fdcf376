#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "pesel/bench.hpp"
#include "pesel/errors.hpp"
#include "pesel/rng.hpp"

namespace pesel::bench {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell_id(const sim::ScenarioSpec& s) {
  std::ostringstream out;
  out << sim::scenario_name(s.scenario) << "_n" << s.n << "_p" << s.p << "_k" << s.k_true << "_snr" << fmt(s.snr);
  return out.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

// Index list that accepts either a scalar or an array of positive integers.
std::vector<Index> index_list(const json& v, const std::string& key, std::vector<std::string>& problems) {
  std::vector<Index> out;
  const auto take = [&](const json& e) {
    if (e.is_number_integer() && e.get<long long>() > 0)
      out.push_back(static_cast<Index>(e.get<long long>()));
    else
      problems.push_back(key + ": expected positive integers");
  };
  if (v.is_array()) {
    for (const auto& e : v) take(e);
    if (v.empty()) problems.push_back(key + ": must not be empty");
  } else {
    take(v);
  }
  return out;
}

CellTemplate parse_cell(const json& c, const std::string& prefix, std::vector<std::string>& problems) {
  static const std::vector<std::string> known = {"scenario", "n", "p", "k_true", "snr_grid", "student_scaling"};
  CellTemplate cell;
  for (const auto& [key, value] : c.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) problems.push_back(prefix + key + ": unknown key");
  }
  for (const auto* required : {"scenario", "n", "p", "k_true", "snr_grid"})
    if (!c.contains(required)) problems.push_back(prefix + required + ": missing");

  if (c.contains("scenario")) {
    const auto s = c["scenario"].is_string() ? sim::parse_scenario(c["scenario"].get<std::string>()) : std::nullopt;
    if (s)
      cell.scenario = *s;
    else
      problems.push_back(prefix + "scenario: unknown scenario");
  }
  if (c.contains("n")) cell.n = index_list(c["n"], prefix + "n", problems);
  if (c.contains("p")) cell.p = index_list(c["p"], prefix + "p", problems);
  if (c.contains("k_true")) {
    const auto& k = c["k_true"];
    if (k.is_number_integer() && k.get<long long>() > 0)
      cell.k_true = k.get<Index>();
    else
      problems.push_back(prefix + "k_true: expected a positive integer");
  }
  if (c.contains("snr_grid")) {
    const auto& g = c["snr_grid"];
    const auto take = [&](const json& e) {
      if (e.is_number() && e.get<double>() > 0.0 && std::isfinite(e.get<double>()))
        cell.snr_grid.push_back(e.get<double>());
      else
        problems.push_back(prefix + "snr_grid: values must be positive numbers");
    };
    if (g.is_array()) {
      for (const auto& e : g) take(e);
      if (g.empty()) problems.push_back(prefix + "snr_grid: must not be empty");
    } else {
      take(g);
    }
  }
  if (c.contains("student_scaling")) {
    const auto s = c["student_scaling"].is_string() ? sim::parse_scaling(c["student_scaling"].get<std::string>())
                                                    : std::nullopt;
    if (s)
      cell.student_scaling = *s;
    else
      problems.push_back(prefix + "student_scaling: expected variance-matched or inverse-snr");
  }
  return cell;
}

struct Outcome {
  Index k = -1;
  bool degenerate = false;
  double runtime_ms = 0;
};

Outcome evaluate(const Method& method, const DataMatrix& x, Index k_max) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Index cap = std::min(k_max, std::min(x.rows(), x.cols()) - 1);
    if (method.kind == Method::Kind::Pesel) {
      out.k = select_k(pesel_trace(x, method.variant, cap)).k_selected;
    } else {
      // Capped at k_max so every record stays inside the candidate range.
      out.k = std::min(variance_threshold_baseline(covariance_spectrum(x, Orientation::RowsModel), method.fraction),
                       cap);
    }
  } catch (const Error&) {
    out.k = -1;
    out.degenerate = true;
  }
  out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

std::string Method::id() const {
  if (kind == Kind::Pesel) return std::string(variant_name(variant));
  return "var-threshold:" + fmt(fraction);
}

Method Method::parse(std::string_view id) {
  Method m;
  if (const auto v = parse_variant(id)) {
    m.variant = *v;
    return m;
  }
  constexpr std::string_view prefix = "var-threshold";
  if (id.starts_with(prefix)) {
    m.kind = Kind::VarianceThreshold;
    auto rest = id.substr(prefix.size());
    if (rest.empty()) return m;
    if (rest.front() == ':') {
      rest.remove_prefix(1);
      double f = 0;
      const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), f);
      if (res.ec == std::errc() && res.ptr == rest.data() + rest.size() && f > 0.0 && f < 1.0) {
        m.fraction = f;
        return m;
      }
    }
  }
  throw ConfigError("methods: unknown method '" + std::string(id) + "'");
}

std::vector<Cell> expand_cells(const BenchmarkConfig& config) {
  std::vector<Cell> cells;
  for (const auto& t : config.cells)
    for (const Index n : t.n)
      for (const Index p : t.p)
        for (const double snr : t.snr_grid) {
          Cell c;
          c.index = cells.size();
          c.spec.scenario = t.scenario;
          c.spec.n = n;
          c.spec.p = p;
          c.spec.k_true = t.k_true;
          c.spec.snr = snr;
          c.spec.student_scaling = t.student_scaling;
          c.spec.seed = mix_seed(config.base_seed, c.index);
          c.id = cell_id(c.spec);
          cells.push_back(std::move(c));
        }
  return cells;
}

std::vector<BenchmarkRecord> run_benchmark(const BenchmarkConfig& config) {
  if (config.replications < 1) throw ConfigError("replications: must be at least 1");
  const auto cells = expand_cells(config);
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t methods = config.methods.size();

  std::vector<std::optional<sim::Signal>> signals(cells.size());
  for (const auto& c : cells) {
    try {
      signals[c.index] = sim::generate_signal(c.spec);
    } catch (const Error&) {
      signals[c.index].reset();
    }
  }

  std::vector<BenchmarkRecord> records(cells.size() * reps * methods);
  const auto work = [&](std::size_t item) {
    const auto& cell = cells[item / reps];
    const std::size_t rep = item % reps;
    sim::ScenarioSpec spec = cell.spec;
    spec.replicate = rep;

    std::optional<DataMatrix> x;
    if (signals[cell.index]) {
      try {
        x = sim::realize(spec, *signals[cell.index]).x;
      } catch (const Error&) {
      }
    }
    for (std::size_t m = 0; m < methods; ++m) {
      auto& r = records[item * methods + m];
      r.cell_id = cell.id;
      r.cell_index = cell.index;
      r.spec = spec;
      r.method = config.methods[m].id();
      if (x) {
        const auto o = evaluate(config.methods[m], *x, config.k_max);
        r.k_selected = o.k;
        r.degenerate = o.degenerate;
        r.runtime_ms = o.runtime_ms;
      } else {
        r.degenerate = true;
      }
    }
  };

  const std::size_t items = cells.size() * reps;
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(items, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < items; ++i) work(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < items; i = next++) work(i);
    });
  pool.clear();
  return records;
}

std::vector<CellSummary> summarize(const std::vector<BenchmarkRecord>& records) {
  std::vector<CellSummary> out;
  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  std::vector<std::vector<Index>> picks;

  for (const auto& r : records) {
    const auto key = std::make_pair(r.cell_id, r.method);
    auto it = slot.find(key);
    if (it == slot.end()) {
      CellSummary s;
      s.cell_id = r.cell_id;
      s.spec = r.spec;
      s.spec.replicate = 0;
      s.method = r.method;
      it = slot.emplace(key, out.size()).first;
      out.push_back(std::move(s));
      picks.emplace_back();
    }
    auto& s = out[it->second];
    ++s.replications;
    if (r.degenerate) {
      ++s.degenerate;
    } else {
      picks[it->second].push_back(r.k_selected);
      ++s.frequencies[r.k_selected];
    }
  }

  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& s = out[i];
    const auto& ks = picks[i];
    if (ks.empty()) {
      s.mean_k = std::nan("");
      continue;
    }
    s.mean_k = static_cast<double>(std::accumulate(ks.begin(), ks.end(), Index{0})) / static_cast<double>(ks.size());
    int best = 0;
    for (const auto& [k, count] : s.frequencies)
      if (count > best) {
        best = count;
        s.mode_k = k;
      }
    const auto hits = s.frequencies.count(s.spec.k_true) ? s.frequencies.at(s.spec.k_true) : 0;
    s.recovery_rate = static_cast<double>(hits) / static_cast<double>(s.replications);
  }
  return out;
}

Index variance_threshold_baseline(const EigenSpectrum& spectrum, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("fraction must lie in (0, 1)");
  const double total = std::accumulate(spectrum.lambdas.begin(), spectrum.lambdas.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateDataError("total variance is zero");

  double cumulative = 0.0;
  for (std::size_t j = 0; j < spectrum.lambdas.size(); ++j) {
    cumulative += spectrum.lambdas[j];
    if (cumulative / total >= fraction) return static_cast<Index>(j + 1);
  }
  return static_cast<Index>(spectrum.lambdas.size());
}

BenchmarkConfig parse_config(const json& doc) {
  std::vector<std::string> problems;
  BenchmarkConfig config;
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  static const std::vector<std::string> top_keys = {"schema_version", "cells", "replications", "methods",
                                                    "k_max",          "base_seed", "threads"};
  static const std::vector<std::string> cell_keys = {"scenario", "n", "p", "k_true", "snr_grid", "student_scaling"};
  const bool inline_cell = !doc.contains("cells");

  for (const auto& [key, value] : doc.items()) {
    const bool top = std::find(top_keys.begin(), top_keys.end(), key) != top_keys.end();
    const bool cell = inline_cell && std::find(cell_keys.begin(), cell_keys.end(), key) != cell_keys.end();
    if (!top && !cell) problems.push_back(key + ": unknown key");
  }

  if (inline_cell) {
    json cell = json::object();
    for (const auto& k : cell_keys)
      if (doc.contains(k)) cell[k] = doc[k];
    config.cells.push_back(parse_cell(cell, "", problems));
  } else if (!doc["cells"].is_array() || doc["cells"].empty()) {
    problems.push_back("cells: expected a non-empty array");
  } else {
    for (std::size_t i = 0; i < doc["cells"].size(); ++i) {
      const auto& c = doc["cells"][i];
      const std::string prefix = "cells[" + std::to_string(i) + "].";
      if (!c.is_object())
        problems.push_back(prefix + ": expected an object");
      else
        config.cells.push_back(parse_cell(c, prefix, problems));
    }
  }

  if (!doc.contains("replications")) {
    problems.push_back("replications: missing");
  } else if (!doc["replications"].is_number_integer() || doc["replications"].get<long long>() < 1) {
    problems.push_back("replications: expected an integer >= 1");
  } else {
    config.replications = doc["replications"].get<int>();
  }

  if (!doc.contains("methods")) {
    problems.push_back("methods: missing");
  } else if (!doc["methods"].is_array() || doc["methods"].empty()) {
    problems.push_back("methods: expected a non-empty array of method names");
  } else {
    for (const auto& m : doc["methods"]) {
      try {
        if (!m.is_string()) throw ConfigError("methods: entries must be strings");
        config.methods.push_back(Method::parse(m.get<std::string>()));
      } catch (const ConfigError& e) {
        problems.push_back(e.what());
      }
    }
  }

  if (doc.contains("k_max")) {
    if (doc["k_max"].is_number_integer() && doc["k_max"].get<long long>() >= 1)
      config.k_max = doc["k_max"].get<Index>();
    else
      problems.push_back("k_max: expected an integer >= 1");
  }
  if (!doc.contains("base_seed")) {
    problems.push_back("base_seed: missing");
  } else if (!doc["base_seed"].is_number_unsigned() && !(doc["base_seed"].is_number_integer() &&
                                                          doc["base_seed"].get<long long>() >= 0)) {
    problems.push_back("base_seed: expected a non-negative integer");
  } else {
    config.base_seed = doc["base_seed"].get<std::uint64_t>();
  }
  if (doc.contains("threads")) {
    if (doc["threads"].is_number_integer() && doc["threads"].get<long long>() >= 0)
      config.threads = doc["threads"].get<unsigned>();
    else
      problems.push_back("threads: expected a non-negative integer");
  }
  if (doc.contains("schema_version") && doc["schema_version"] != 1)
    problems.push_back("schema_version: only version 1 is supported");

  if (problems.empty()) {
    for (const auto& c : expand_cells(config)) {
      try {
        sim::validate(c.spec);
      } catch (const DomainError& e) {
        problems.push_back("cells: " + c.id + ": " + e.what());
      }
    }
  }

  if (!problems.empty()) {
    std::string msg = "invalid benchmark config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return config;
}

BenchmarkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

void write_records_csv(const std::filesystem::path& path, const std::vector<BenchmarkRecord>& records) {
  auto out = open_output(path);
  out << "# pesel-records schema=" << kRecordsSchemaVersion << '\n';
  out << "cell_id,cell_index,scenario,n,p,k_true,snr,replicate,method,k_selected,degenerate\n";
  for (const auto& r : records) {
    out << r.cell_id << ',' << r.cell_index << ',' << sim::scenario_name(r.spec.scenario) << ',' << r.spec.n << ','
        << r.spec.p << ',' << r.spec.k_true << ',' << fmt(r.spec.snr) << ',' << r.spec.replicate << ',' << r.method
        << ',' << r.k_selected << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
}

void write_timings_csv(const std::filesystem::path& path, const std::vector<BenchmarkRecord>& records) {
  auto out = open_output(path);
  out << "cell_id,replicate,method,runtime_ms\n";
  for (const auto& r : records)
    out << r.cell_id << ',' << r.spec.replicate << ',' << r.method << ',' << fmt(r.runtime_ms) << '\n';
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<CellSummary>& summaries) {
  auto out = open_output(path);
  out << "# pesel-summary schema=" << kSummarySchemaVersion << '\n';
  out << "cell_id,scenario,n,p,k_true,snr,method,replications,degenerate,mean_k,mode_k,recovery_rate,frequencies\n";
  for (const auto& s : summaries) {
    std::string freq;
    for (const auto& [k, count] : s.frequencies) {
      if (!freq.empty()) freq += ';';
      freq += std::to_string(k) + ':' + std::to_string(count);
    }
    out << s.cell_id << ',' << sim::scenario_name(s.spec.scenario) << ',' << s.spec.n << ',' << s.spec.p << ','
        << s.spec.k_true << ',' << fmt(s.spec.snr) << ',' << s.method << ',' << s.replications << ',' << s.degenerate
        << ',' << fmt(s.mean_k) << ',' << s.mode_k << ',' << fmt(s.recovery_rate) << ',' << freq << '\n';
  }
}

void run_to_directory(const std::filesystem::path& config_path, const std::filesystem::path& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open config '" + config_path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + config_path.string() + "' is not valid JSON: " + e.what());
  }
  const auto config = parse_config(doc);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto probe = out_dir / ".pesel-write-probe";
  {
    std::ofstream test(probe);
    if (ec || !test) throw IoError("output directory '" + out_dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);

  const auto records = run_benchmark(config);
  write_records_csv(out_dir / "records.csv", records);
  write_timings_csv(out_dir / "timings.csv", records);
  write_summary_csv(out_dir / "summary.csv", summarize(records));

  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json manifest = {
      {"tool", "pesel"},
      {"version", PESEL_VERSION_STRING},
      {"base_seed", config.base_seed},
      {"records_schema", kRecordsSchemaVersion},
      {"summary_schema", kSummarySchemaVersion},
      {"record_count", records.size()},
      {"created_at", stamp},
      {"config", doc},
  };
  auto out = open_output(out_dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace pesel::bench
