/*
 * C interface to the PESEL rank-selection library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a pesel_status;
 * on failure pesel_last_error() describes the problem (thread-local, valid
 * until the next failing call on the same thread).
 */
#ifndef PESEL_PESEL_H
#define PESEL_PESEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(PESEL_BUILDING_LIBRARY)
#define PESEL_API __attribute__((visibility("default")))
#else
#define PESEL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pesel_status {
  PESEL_OK = 0,
  PESEL_ERR_INVALID_ARGUMENT = 1,
  PESEL_ERR_INGEST = 2,
  PESEL_ERR_PARSE = 3,
  PESEL_ERR_DOMAIN = 4,
  PESEL_ERR_LINALG = 5,
  PESEL_ERR_DEGENERATE_DATA = 6,
  PESEL_ERR_SPIKE_BELOW_NOISE = 7,
  PESEL_ERR_DEGENERATE_SIGNAL = 8,
  PESEL_ERR_IO = 9,
  PESEL_ERR_CONFIG = 10,
  PESEL_ERR_BUFFER_TOO_SMALL = 11,
  PESEL_ERR_INTERNAL = 99
} pesel_status;

typedef enum pesel_orientation { PESEL_ROWS_MODEL = 0, PESEL_COLUMNS_MODEL = 1 } pesel_orientation;

typedef enum pesel_variant {
  PESEL_HETERO_N = 0,
  PESEL_HOMO_N = 1,
  PESEL_HETERO_P = 2,
  PESEL_HOMO_P = 3
} pesel_variant;

typedef enum pesel_structure { PESEL_HETERO = 0, PESEL_HOMO = 1 } pesel_structure;

typedef enum pesel_scenario {
  PESEL_SCENARIO_EQUAL_SPECTRUM = 0,
  PESEL_SCENARIO_EXP_SPECTRUM = 1,
  PESEL_SCENARIO_FIXED_EFFECT = 2,
  PESEL_SCENARIO_STUDENT_NOISE = 3,
  PESEL_SCENARIO_SURPLUS_VARS = 4
} pesel_scenario;

typedef enum pesel_student_scaling {
  PESEL_STUDENT_VARIANCE_MATCHED = 0,
  PESEL_STUDENT_INVERSE_SNR = 1
} pesel_student_scaling;

typedef struct pesel_matrix pesel_matrix;
typedef struct pesel_trace pesel_trace;

typedef struct pesel_score_parts {
  int64_t k;
  double loglik;
  double penalty;
  double total;
  double sigma2_hat;
} pesel_score_parts;

typedef struct pesel_scenario_spec {
  pesel_scenario scenario;
  int64_t n;
  int64_t p;
  int64_t k_true;
  double snr;
  uint64_t seed;
  uint64_t replicate;
  pesel_student_scaling student_scaling;
} pesel_scenario_spec;

PESEL_API const char* pesel_version(void);
PESEL_API const char* pesel_last_error(void);
PESEL_API const char* pesel_status_name(pesel_status status);

/* Strings returned through char** out-parameters. */
PESEL_API void pesel_string_free(char* s);

/* ---- matrices ---------------------------------------------------------- */

PESEL_API pesel_status pesel_matrix_load_csv(const char* path, int has_header, char delimiter, pesel_matrix** out);
/* Copies n*p row-major values. */
PESEL_API pesel_status pesel_matrix_from_rows(const double* values, int64_t n, int64_t p, pesel_matrix** out);
PESEL_API void pesel_matrix_free(pesel_matrix* m);
PESEL_API int64_t pesel_matrix_rows(const pesel_matrix* m);
PESEL_API int64_t pesel_matrix_cols(const pesel_matrix* m);
/* Copies row-major values into out (capacity len >= rows*cols). */
PESEL_API pesel_status pesel_matrix_copy_rows(const pesel_matrix* m, double* out, size_t len);
PESEL_API pesel_status pesel_matrix_transpose(const pesel_matrix* m, pesel_matrix** out);
PESEL_API pesel_status pesel_matrix_center(const pesel_matrix* m, pesel_orientation orientation, pesel_matrix** out);

/* Writes the descending covariance eigenvalues; *len receives the ambient
 * dimension. Returns PESEL_ERR_BUFFER_TOO_SMALL if capacity is short. */
PESEL_API pesel_status pesel_covariance_spectrum(const pesel_matrix* m, pesel_orientation orientation, double* out,
                                                 size_t capacity, size_t* len);

/* ---- criteria ---------------------------------------------------------- */

PESEL_API pesel_variant pesel_auto_variant(int64_t n, int64_t p);
PESEL_API const char* pesel_variant_name(pesel_variant variant);
PESEL_API pesel_status pesel_parse_variant(const char* name, pesel_variant* out);
PESEL_API pesel_status pesel_effective_dimension(pesel_variant variant, int64_t n, int64_t p, int64_t k,
                                                 int64_t* out);

PESEL_API pesel_status pesel_trace_compute(const pesel_matrix* m, pesel_variant variant, int64_t k_max,
                                           pesel_trace** out);
PESEL_API void pesel_trace_free(pesel_trace* t);
PESEL_API size_t pesel_trace_size(const pesel_trace* t);
PESEL_API pesel_status pesel_trace_score(const pesel_trace* t, size_t index, pesel_score_parts* out);
PESEL_API pesel_status pesel_trace_select(const pesel_trace* t, int64_t* k_selected, int* tie_broken);

/* Full estimate report as JSON. variant is "auto" or a variant name;
 * k_max < 0 selects the default range. */
PESEL_API pesel_status pesel_estimate_json(const pesel_matrix* m, const char* variant, int64_t k_max, char** json);
/* Same report rendered as a text table. */
PESEL_API pesel_status pesel_report_json_to_text(const char* json, char** text);

/* ---- reference oracle -------------------------------------------------- */

/* Likelihood at the ML estimates, evaluated both by dense Gaussian densities
 * (direct) and from the spectrum alone (closed_form). */
PESEL_API pesel_status pesel_oracle_check(const pesel_matrix* m, int64_t k, pesel_structure structure,
                                          pesel_orientation orientation, double* direct, double* closed_form);

/* ---- simulation and benchmarking -------------------------------------- */

PESEL_API pesel_status pesel_scenario_parse(const char* name, pesel_scenario* out);
PESEL_API pesel_status pesel_simulate(const pesel_scenario_spec* spec, pesel_matrix** x, pesel_matrix** signal);
/* Writes X.csv, spec.json and, when write_signal != 0, M.csv. */
PESEL_API pesel_status pesel_simulate_to_dir(const pesel_scenario_spec* spec, const char* out_dir, int write_signal);
/* Writes records.csv, summary.csv, timings.csv and manifest.json. */
PESEL_API pesel_status pesel_bench_run(const char* config_path, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* PESEL_PESEL_H */
