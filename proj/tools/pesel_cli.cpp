// pesel: command-line front end over the C API.
//
//   pesel estimate data.csv [--variant auto] [--k-max N] [--format json|text]
//   pesel simulate --scenario fixed-effect --n 100 --p 800 --k 5 --snr 4 --out DIR
//   pesel bench config.json --out DIR
//   pesel verify data.csv [--k-max N]
//
// Exit codes: 0 success, 2 bad input (files, parsing, flags, config),
// 3 degenerate data.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pesel/pesel.h"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

int report_failure(pesel_status status) {
  std::cerr << "pesel: " << pesel_status_name(status) << ": " << pesel_last_error() << '\n';
  return status == PESEL_ERR_DEGENERATE_DATA ? kExitDegenerate : kExitInput;
}

std::string default_output_dir() {
  const char* env = std::getenv("PESEL_OUTPUT_DIR");
  return env && *env ? env : ".";
}

char delimiter_char(const std::string& d) {
  if (d == "\\t" || d == "tab") return '\t';
  return d.empty() ? ',' : d.front();
}

struct InputOptions {
  std::string path;
  bool header = false;
  std::string delimiter = ",";
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("input", in.path, "CSV file, rows = observations")->required();
  cmd->add_flag("--header", in.header, "skip the first row");
  cmd->add_option("--delimiter", in.delimiter, "field delimiter (',' by default, 'tab' for tabs)");
}

int load(const InputOptions& in, pesel_matrix** out) {
  const auto st = pesel_matrix_load_csv(in.path.c_str(), in.header ? 1 : 0, delimiter_char(in.delimiter), out);
  return st == PESEL_OK ? 0 : report_failure(st);
}

int run_estimate(const InputOptions& in, const std::string& variant, long long k_max, const std::string& format) {
  pesel_matrix* m = nullptr;
  if (const int rc = load(in, &m)) return rc;
  char* json = nullptr;
  const auto st = pesel_estimate_json(m, variant.c_str(), k_max, &json);
  pesel_matrix_free(m);
  if (st != PESEL_OK) return report_failure(st);

  if (format == "json") {
    std::cout << json << '\n';
  } else {
    char* text = nullptr;
    const auto tst = pesel_report_json_to_text(json, &text);
    if (tst != PESEL_OK) {
      pesel_string_free(json);
      return report_failure(tst);
    }
    std::cout << text;
    pesel_string_free(text);
  }
  pesel_string_free(json);
  return 0;
}

int run_verify(const InputOptions& in, long long k_max) {
  pesel_matrix* m = nullptr;
  if (const int rc = load(in, &m)) return rc;
  const long long n = pesel_matrix_rows(m);
  const long long p = pesel_matrix_cols(m);
  const long long limit = std::min(n, p) - 1;
  if (k_max < 0 || k_max > limit) k_max = limit;

  std::printf("%-8s %-9s %4s %20s %20s %12s\n", "orient", "struct", "k", "direct", "closed_form", "rel_diff");
  for (const auto orient : {PESEL_ROWS_MODEL, PESEL_COLUMNS_MODEL}) {
    for (const auto structure : {PESEL_HETERO, PESEL_HOMO}) {
      for (long long k = 0; k <= k_max; ++k) {
        double direct = 0, closed = 0;
        const auto st = pesel_oracle_check(m, k, structure, orient, &direct, &closed);
        const char* o = orient == PESEL_ROWS_MODEL ? "rows" : "columns";
        const char* s = structure == PESEL_HETERO ? "hetero" : "homo";
        if (st != PESEL_OK) {
          std::printf("%-8s %-9s %4lld %20s %20s %12s  (%s)\n", o, s, k, "-", "-", "-", pesel_status_name(st));
          continue;
        }
        std::printf("%-8s %-9s %4lld %20.10f %20.10f %12.3e\n", o, s, k, direct, closed,
                    std::abs(direct - closed) / std::abs(closed));
      }
    }
  }
  pesel_matrix_free(m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PESEL: number of principal components by penalized semi-integrated likelihood"};
  app.set_version_flag("--version", std::string(pesel_version()));
  app.require_subcommand(1);

  InputOptions est_in;
  std::string variant = "auto";
  long long est_k_max = -1;
  std::string format = "json";
  auto* estimate = app.add_subcommand("estimate", "select the number of principal components of a CSV matrix");
  add_input_options(estimate, est_in);
  estimate->add_option("--variant", variant, "auto|hetero-n|homo-n|hetero-p|homo-p")
      ->check(CLI::IsMember({"auto", "hetero-n", "homo-n", "hetero-p", "homo-p"}));
  estimate->add_option("--k-max", est_k_max, "largest candidate rank (default min(n,p)-1, capped at 50)")
      ->check(CLI::PositiveNumber);
  estimate->add_option("--format", format, "json|text")->check(CLI::IsMember({"json", "text"}));

  std::string scenario = "fixed-effect";
  pesel_scenario_spec spec{PESEL_SCENARIO_FIXED_EFFECT, 100, 150, 5, 4.0, 0, 0, PESEL_STUDENT_VARIANCE_MATCHED};
  std::string scaling = "variance-matched";
  bool write_signal = false;
  std::string sim_out = default_output_dir();
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic data set");
  simulate->add_option("--scenario", scenario,
                       "equal-spectrum|exp-spectrum|fixed-effect|student-noise|surplus-vars (or 1a|1b|2|3|4)");
  simulate->add_option("--n", spec.n, "observations");
  simulate->add_option("--p", spec.p, "signal variables");
  simulate->add_option("--k", spec.k_true, "true rank");
  simulate->add_option("--snr", spec.snr, "signal to noise ratio, 1/noise variance");
  simulate->add_option("--seed", spec.seed, "signal seed");
  simulate->add_option("--replicate", spec.replicate, "noise replicate index");
  simulate->add_option("--student-scaling", scaling, "variance-matched|inverse-snr")
      ->check(CLI::IsMember({"variance-matched", "inverse-snr"}));
  simulate->add_flag("--write-signal", write_signal, "also write the noiseless signal as M.csv");
  simulate->add_option("--out", sim_out, "output directory (default $PESEL_OUTPUT_DIR or .)");

  std::string config_path;
  std::string bench_out = default_output_dir();
  auto* bench = app.add_subcommand("bench", "run a Monte Carlo benchmark from a JSON config");
  bench->add_option("config", config_path, "benchmark config file")->required();
  bench->add_option("--out", bench_out, "output directory (default $PESEL_OUTPUT_DIR or .)");

  InputOptions ver_in;
  long long ver_k_max = -1;
  auto* verify = app.add_subcommand("verify", "compare closed-form and brute-force likelihoods");
  add_input_options(verify, ver_in);
  verify->add_option("--k-max", ver_k_max, "largest rank to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  if (estimate->parsed()) return run_estimate(est_in, variant, est_k_max, format);

  if (simulate->parsed()) {
    if (const auto st = pesel_scenario_parse(scenario.c_str(), &spec.scenario); st != PESEL_OK)
      return report_failure(st);
    spec.student_scaling = scaling == "inverse-snr" ? PESEL_STUDENT_INVERSE_SNR : PESEL_STUDENT_VARIANCE_MATCHED;
    if (const auto st = pesel_simulate_to_dir(&spec, sim_out.c_str(), write_signal ? 1 : 0); st != PESEL_OK)
      return report_failure(st);
    std::cerr << "wrote " << sim_out << "/X.csv\n";
    return 0;
  }

  if (bench->parsed()) {
    if (const auto st = pesel_bench_run(config_path.c_str(), bench_out.c_str()); st != PESEL_OK)
      return report_failure(st);
    std::cerr << "wrote " << bench_out << "/{records,summary,timings}.csv and manifest.json\n";
    return 0;
  }

  if (verify->parsed()) return run_verify(ver_in, ver_k_max);
  return kExitInput;
}
