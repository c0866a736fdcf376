#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "pesel/pesel.h"

#include "pesel/bench.hpp"
#include "pesel/criteria.hpp"
#include "pesel/errors.hpp"
#include "pesel/oracle.hpp"
#include "pesel/report.hpp"
#include "pesel/simgen.hpp"

struct pesel_matrix {
  pesel::DataMatrix data;
};

struct pesel_trace {
  pesel::CriterionTrace trace;
};

namespace {

thread_local std::string g_last_error;

pesel_status status_of(pesel::ErrorKind kind) {
  using pesel::ErrorKind;
  switch (kind) {
    case ErrorKind::Ingest: return PESEL_ERR_INGEST;
    case ErrorKind::Parse: return PESEL_ERR_PARSE;
    case ErrorKind::Domain: return PESEL_ERR_DOMAIN;
    case ErrorKind::LinAlg: return PESEL_ERR_LINALG;
    case ErrorKind::DegenerateData: return PESEL_ERR_DEGENERATE_DATA;
    case ErrorKind::SpikeBelowNoise: return PESEL_ERR_SPIKE_BELOW_NOISE;
    case ErrorKind::DegenerateSignal: return PESEL_ERR_DEGENERATE_SIGNAL;
    case ErrorKind::Io: return PESEL_ERR_IO;
    case ErrorKind::Config: return PESEL_ERR_CONFIG;
  }
  return PESEL_ERR_INTERNAL;
}

pesel_status fail(pesel_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <class F>
pesel_status guarded(F&& body) {
  try {
    body();
    return PESEL_OK;
  } catch (const pesel::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(PESEL_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PESEL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PESEL_ERR_INTERNAL, e.what());
  }
}

pesel::Orientation to_cpp(pesel_orientation o) {
  return o == PESEL_COLUMNS_MODEL ? pesel::Orientation::ColumnsModel : pesel::Orientation::RowsModel;
}

pesel::PeselVariant to_cpp(pesel_variant v) {
  switch (v) {
    case PESEL_HOMO_N: return pesel::kHomoN;
    case PESEL_HETERO_P: return pesel::kHeteroP;
    case PESEL_HOMO_P: return pesel::kHomoP;
    default: return pesel::kHeteroN;
  }
}

pesel_variant to_c(pesel::PeselVariant v) {
  if (v == pesel::kHomoN) return PESEL_HOMO_N;
  if (v == pesel::kHeteroP) return PESEL_HETERO_P;
  if (v == pesel::kHomoP) return PESEL_HOMO_P;
  return PESEL_HETERO_N;
}

bool valid(pesel_variant v) { return v >= PESEL_HETERO_N && v <= PESEL_HOMO_P; }

pesel::sim::ScenarioSpec to_cpp(const pesel_scenario_spec& s) {
  pesel::sim::ScenarioSpec out;
  out.scenario = static_cast<pesel::sim::Scenario>(s.scenario);
  out.n = s.n;
  out.p = s.p;
  out.k_true = s.k_true;
  out.snr = s.snr;
  out.seed = s.seed;
  out.replicate = s.replicate;
  out.student_scaling = s.student_scaling == PESEL_STUDENT_INVERSE_SNR ? pesel::sim::StudentScaling::InverseSnr
                                                                       : pesel::sim::StudentScaling::VarianceMatched;
  return out;
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define PESEL_REQUIRE(cond, what) \
  if (!(cond)) return fail(PESEL_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

PESEL_API const char* pesel_version(void) { return PESEL_VERSION_STRING; }

PESEL_API const char* pesel_last_error(void) { return g_last_error.c_str(); }

PESEL_API const char* pesel_status_name(pesel_status status) {
  switch (status) {
    case PESEL_OK: return "ok";
    case PESEL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PESEL_ERR_INGEST: return "ingest error";
    case PESEL_ERR_PARSE: return "parse error";
    case PESEL_ERR_DOMAIN: return "domain error";
    case PESEL_ERR_LINALG: return "linear algebra error";
    case PESEL_ERR_DEGENERATE_DATA: return "degenerate data";
    case PESEL_ERR_SPIKE_BELOW_NOISE: return "spike below noise";
    case PESEL_ERR_DEGENERATE_SIGNAL: return "degenerate signal";
    case PESEL_ERR_IO: return "i/o error";
    case PESEL_ERR_CONFIG: return "config error";
    case PESEL_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case PESEL_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

PESEL_API void pesel_string_free(char* s) { std::free(s); }

PESEL_API pesel_status pesel_matrix_load_csv(const char* path, int has_header, char delimiter, pesel_matrix** out) {
  PESEL_REQUIRE(path && out, "path and out must be non-null");
  return guarded([&] {
    pesel::CsvOptions options{has_header != 0, delimiter ? delimiter : ','};
    *out = new pesel_matrix{pesel::load_csv(path, options)};
  });
}

PESEL_API pesel_status pesel_matrix_from_rows(const double* values, int64_t n, int64_t p, pesel_matrix** out) {
  PESEL_REQUIRE(values && out && n > 0 && p > 0, "values/out must be non-null and shape positive");
  return guarded([&] {
    pesel::Matrix m(n, p);
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < p; ++j) m(i, j) = values[i * p + j];
    *out = new pesel_matrix{pesel::DataMatrix(std::move(m))};
  });
}

PESEL_API void pesel_matrix_free(pesel_matrix* m) { delete m; }

PESEL_API int64_t pesel_matrix_rows(const pesel_matrix* m) { return m ? m->data.rows() : 0; }

PESEL_API int64_t pesel_matrix_cols(const pesel_matrix* m) { return m ? m->data.cols() : 0; }

PESEL_API pesel_status pesel_matrix_copy_rows(const pesel_matrix* m, double* out, size_t len) {
  PESEL_REQUIRE(m && out, "matrix and out must be non-null");
  const auto& v = m->data.values();
  if (len < static_cast<size_t>(v.size())) return fail(PESEL_ERR_BUFFER_TOO_SMALL, "output buffer too small");
  for (pesel::Index i = 0; i < v.rows(); ++i)
    for (pesel::Index j = 0; j < v.cols(); ++j) out[i * v.cols() + j] = v(i, j);
  return PESEL_OK;
}

PESEL_API pesel_status pesel_matrix_transpose(const pesel_matrix* m, pesel_matrix** out) {
  PESEL_REQUIRE(m && out, "matrix and out must be non-null");
  return guarded([&] { *out = new pesel_matrix{pesel::transpose(m->data)}; });
}

PESEL_API pesel_status pesel_matrix_center(const pesel_matrix* m, pesel_orientation orientation, pesel_matrix** out) {
  PESEL_REQUIRE(m && out, "matrix and out must be non-null");
  return guarded([&] { *out = new pesel_matrix{pesel::center(m->data, to_cpp(orientation))}; });
}

PESEL_API pesel_status pesel_covariance_spectrum(const pesel_matrix* m, pesel_orientation orientation, double* out,
                                                 size_t capacity, size_t* len) {
  PESEL_REQUIRE(m && len, "matrix and len must be non-null");
  pesel::EigenSpectrum spectrum;
  const auto st = guarded([&] { spectrum = pesel::covariance_spectrum(m->data, to_cpp(orientation)); });
  if (st != PESEL_OK) return st;
  *len = spectrum.lambdas.size();
  if (!out || capacity < spectrum.lambdas.size()) return fail(PESEL_ERR_BUFFER_TOO_SMALL, "output buffer too small");
  std::copy(spectrum.lambdas.begin(), spectrum.lambdas.end(), out);
  return PESEL_OK;
}

PESEL_API pesel_variant pesel_auto_variant(int64_t n, int64_t p) { return to_c(pesel::auto_variant(n, p)); }

PESEL_API const char* pesel_variant_name(pesel_variant variant) {
  if (!valid(variant)) return "unknown";
  return pesel::variant_name(to_cpp(variant)).data();
}

PESEL_API pesel_status pesel_parse_variant(const char* name, pesel_variant* out) {
  PESEL_REQUIRE(name && out, "name and out must be non-null");
  const auto v = pesel::parse_variant(name);
  if (!v) return fail(PESEL_ERR_INVALID_ARGUMENT, std::string("unknown variant '") + name + "'");
  *out = to_c(*v);
  return PESEL_OK;
}

PESEL_API pesel_status pesel_effective_dimension(pesel_variant variant, int64_t n, int64_t p, int64_t k,
                                                 int64_t* out) {
  PESEL_REQUIRE(out && valid(variant), "out must be non-null and variant valid");
  return guarded([&] { *out = pesel::effective_dimension(to_cpp(variant), n, p, k); });
}

PESEL_API pesel_status pesel_trace_compute(const pesel_matrix* m, pesel_variant variant, int64_t k_max,
                                           pesel_trace** out) {
  PESEL_REQUIRE(m && out && valid(variant), "matrix/out must be non-null and variant valid");
  return guarded([&] { *out = new pesel_trace{pesel::pesel_trace(m->data, to_cpp(variant), k_max)}; });
}

PESEL_API void pesel_trace_free(pesel_trace* t) { delete t; }

PESEL_API size_t pesel_trace_size(const pesel_trace* t) { return t ? t->trace.scores.size() : 0; }

PESEL_API pesel_status pesel_trace_score(const pesel_trace* t, size_t index, pesel_score_parts* out) {
  PESEL_REQUIRE(t && out, "trace and out must be non-null");
  if (index >= t->trace.scores.size()) return fail(PESEL_ERR_DOMAIN, "score index out of range");
  const auto& s = t->trace.scores[index];
  *out = pesel_score_parts{s.k, s.loglik, s.penalty, s.total, s.sigma2_hat};
  return PESEL_OK;
}

PESEL_API pesel_status pesel_trace_select(const pesel_trace* t, int64_t* k_selected, int* tie_broken) {
  PESEL_REQUIRE(t && k_selected, "trace and k_selected must be non-null");
  return guarded([&] {
    const auto r = pesel::select_k(t->trace);
    *k_selected = r.k_selected;
    if (tie_broken) *tie_broken = r.tie_broken ? 1 : 0;
  });
}

PESEL_API pesel_status pesel_estimate_json(const pesel_matrix* m, const char* variant, int64_t k_max, char** json) {
  PESEL_REQUIRE(m && variant && json, "matrix, variant and json must be non-null");
  return guarded([&] {
    std::optional<pesel::Index> cap;
    if (k_max >= 0) cap = k_max;
    *json = copy_string(pesel::to_json(pesel::estimate(m->data, variant, cap)).dump(2));
  });
}

PESEL_API pesel_status pesel_report_json_to_text(const char* json, char** text) {
  PESEL_REQUIRE(json && text, "json and text must be non-null");
  return guarded([&] {
    *text = copy_string(pesel::format_text(pesel::report_from_json(nlohmann::json::parse(json))));
  });
}

PESEL_API pesel_status pesel_oracle_check(const pesel_matrix* m, int64_t k, pesel_structure structure,
                                          pesel_orientation orientation, double* direct, double* closed_form) {
  PESEL_REQUIRE(m && direct && closed_form, "matrix and outputs must be non-null");
  return guarded([&] {
    const auto s = structure == PESEL_HOMO ? pesel::EigenStructure::Homo : pesel::EigenStructure::Hetero;
    const auto o = to_cpp(orientation);
    const auto est = pesel::oracle::ml_estimates(m->data, k, s, o);
    *direct = pesel::oracle::direct_sil_loglik(m->data, est, s, o);
    const auto spectrum = pesel::covariance_spectrum(m->data, o);
    *closed_form = pesel::oracle::closed_form_sil(spectrum, pesel::sample_count(m->data.rows(), m->data.cols(), o),
                                                  spectrum.ambient_dim, k, s);
  });
}

PESEL_API pesel_status pesel_scenario_parse(const char* name, pesel_scenario* out) {
  PESEL_REQUIRE(name && out, "name and out must be non-null");
  const auto s = pesel::sim::parse_scenario(name);
  if (!s) return fail(PESEL_ERR_INVALID_ARGUMENT, std::string("unknown scenario '") + name + "'");
  *out = static_cast<pesel_scenario>(*s);
  return PESEL_OK;
}

PESEL_API pesel_status pesel_simulate(const pesel_scenario_spec* spec, pesel_matrix** x, pesel_matrix** signal) {
  PESEL_REQUIRE(spec && x, "spec and x must be non-null");
  PESEL_REQUIRE(spec->scenario >= PESEL_SCENARIO_EQUAL_SPECTRUM && spec->scenario <= PESEL_SCENARIO_SURPLUS_VARS,
                "unknown scenario");
  return guarded([&] {
    auto data = pesel::sim::generate(to_cpp(*spec));
    *x = new pesel_matrix{std::move(data.x)};
    if (signal) *signal = new pesel_matrix{std::move(data.m)};
  });
}

PESEL_API pesel_status pesel_simulate_to_dir(const pesel_scenario_spec* spec, const char* out_dir, int write_signal) {
  PESEL_REQUIRE(spec && out_dir, "spec and out_dir must be non-null");
  PESEL_REQUIRE(spec->scenario >= PESEL_SCENARIO_EQUAL_SPECTRUM && spec->scenario <= PESEL_SCENARIO_SURPLUS_VARS,
                "unknown scenario");
  return guarded([&] {
    const auto cpp_spec = to_cpp(*spec);
    pesel::sim::validate(cpp_spec);
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw pesel::IoError("cannot create '" + dir.string() + "': " + ec.message());

    const auto data = pesel::sim::generate(cpp_spec);
    pesel::write_csv(dir / "X.csv", data.x.values());
    if (write_signal) pesel::write_csv(dir / "M.csv", data.m.values());

    auto sidecar = pesel::to_json(cpp_spec);
    sidecar["x_shape"] = {data.x.rows(), data.x.cols()};
    sidecar["warnings"] = data.warnings;
    std::ofstream out(dir / "spec.json", std::ios::trunc);
    if (!out) throw pesel::IoError("cannot write '" + (dir / "spec.json").string() + "'");
    out << sidecar.dump(2) << '\n';
  });
}

PESEL_API pesel_status pesel_bench_run(const char* config_path, const char* out_dir) {
  PESEL_REQUIRE(config_path && out_dir, "config_path and out_dir must be non-null");
  return guarded([&] { pesel::bench::run_to_directory(config_path, out_dir); });
}

}  // extern "C"
