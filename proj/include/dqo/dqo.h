/*
 * C interface to the distributed quantum observer library.
 *
 * All objects are opaque handles created and destroyed by the library. Every
 * fallible call returns a dqo_status; on failure a description is available
 * from dqo_last_error() on the calling thread until the next failing call.
 * Matrices are exchanged as row-major double arrays: callers pass a buffer and
 * its capacity in doubles, and query the required shape first.
 */
#ifndef DQO_DQO_H
#define DQO_DQO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DQO_BUILDING_LIBRARY)
#    define DQO_API __declspec(dllexport)
#  else
#    define DQO_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__)
#  define DQO_API __attribute__((visibility("default")))
#else
#  define DQO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dqo_status {
  DQO_OK = 0,
  DQO_ERR_INVALID_DIMENSION = 1,
  DQO_ERR_INVALID_PARAMETER = 2,
  DQO_ERR_UNSUPPORTED_SCHEME = 3,
  DQO_ERR_DEGENERATE_OUTPUT = 4,
  DQO_ERR_UNSUPPORTED_PLANT = 5,
  DQO_ERR_NOT_POSITIVE_DEFINITE = 6,
  DQO_ERR_BOUND_VIOLATED = 7,
  DQO_ERR_INVALID_INPUT = 8,
  DQO_ERR_NUMERICAL_FAILURE = 9,
  DQO_ERR_TOLERANCE_EXCEEDED = 10,
  DQO_ERR_STEP_TOO_COARSE = 11,
  DQO_ERR_PARSE = 12,
  DQO_ERR_VALIDATION = 13,
  DQO_ERR_IO = 14,
  DQO_ERR_CERTIFICATE_FAILED = 15,
  DQO_ERR_ORACLE_DISAGREEMENT = 16,
  DQO_ERR_NULL_ARGUMENT = 17,
  DQO_ERR_BUFFER_TOO_SMALL = 18,
  DQO_ERR_INTERNAL = 19
} dqo_status;

typedef enum dqo_matrix_kind {
  DQO_MATRIX_R_A = 0,     /* augmented Hamiltonian, (2N+2)x(2N+2) */
  DQO_MATRIX_A_A = 1,     /* augmented dynamics 2 Theta R_a */
  DQO_MATRIX_C_A = 2,     /* augmented output map, (N+1)x(2N+2) */
  DQO_MATRIX_R_O = 3,     /* observer Hamiltonian block, 2N x 2N */
  DQO_MATRIX_A_O = 4,     /* observer dynamics 2 Theta R_o */
  DQO_MATRIX_B_O = 5,     /* plant-output gain, 2N x 1 */
  DQO_MATRIX_REDUCED = 6, /* tridiagonal comparison matrix, N x N */
  DQO_MATRIX_THETA = 7    /* symplectic form for N+1 modes */
} dqo_matrix_kind;

typedef struct dqo_config dqo_config;
typedef struct dqo_observer dqo_observer;

typedef struct dqo_certificate {
  double lambda_min;
  double lambda_max;
  double exp_norm_bound;
} dqo_certificate;

DQO_API const char* dqo_version(void);
DQO_API const char* dqo_status_name(dqo_status status);
/* Message for the most recent failure on this thread; never NULL. */
DQO_API const char* dqo_last_error(void);
/* 0 = error, 1 = warn, 2 = info, 3 = debug. */
DQO_API void dqo_set_log_level(int level);
DQO_API void dqo_string_free(char* text);

/* ---- configuration ---------------------------------------------------- */

DQO_API dqo_status dqo_config_parse(const char* json_text, dqo_config** out);
DQO_API dqo_status dqo_config_load(const char* path, dqo_config** out);
DQO_API void dqo_config_free(dqo_config* config);
DQO_API dqo_status dqo_config_set_output_dir(dqo_config* config, const char* dir);
DQO_API dqo_status dqo_config_set_horizon(dqo_config* config, double horizon);
/* step <= 0 selects the automatic step. */
DQO_API dqo_status dqo_config_set_step(dqo_config* config, double step);
DQO_API dqo_status dqo_config_n_elements(const dqo_config* config, size_t* out);

/* ---- experiment runs --------------------------------------------------- */
/*
 * Each run writes its files into the configured output directory and, when
 * report_json is non-NULL, returns the JSON run report (free with
 * dqo_string_free). A run whose certificates fail still returns its report,
 * with the status of the first failing check.
 */
DQO_API dqo_status dqo_run_build(const dqo_config* config, char** report_json);
DQO_API dqo_status dqo_run_simulate(const dqo_config* config, char** report_json);
DQO_API dqo_status dqo_run_timeavg(const dqo_config* config, char** report_json);
DQO_API dqo_status dqo_run_check(const dqo_config* config, char** report_json);

/* ---- observer construction and analysis -------------------------------- */

/* Chain observer for the static plant with output c_p and couplings mu_tilde[0..n). */
DQO_API dqo_status dqo_observer_create(const double c_p[2], const double* mu_tilde, size_t n, dqo_observer** out);
DQO_API dqo_status dqo_observer_from_config(const dqo_config* config, dqo_observer** out);
DQO_API void dqo_observer_free(dqo_observer* observer);
DQO_API dqo_status dqo_observer_n_elements(const dqo_observer* observer, size_t* out);
DQO_API dqo_status dqo_observer_matrix_shape(const dqo_observer* observer, dqo_matrix_kind kind, size_t* rows,
                                             size_t* cols);
DQO_API dqo_status dqo_observer_copy_matrix(const dqo_observer* observer, dqo_matrix_kind kind, double* out,
                                            size_t capacity);
/* Frequencies omega_1..omega_N. */
DQO_API dqo_status dqo_observer_frequencies(const dqo_observer* observer, double* out, size_t capacity);
DQO_API dqo_status dqo_observer_certificate(const dqo_observer* observer, dqo_certificate* out);
DQO_API dqo_status dqo_observer_residuals(const dqo_observer* observer, double* realizability, double* fixed_point);
/* Phi(t) = exp(A_a t), (2N+2)x(2N+2). */
DQO_API dqo_status dqo_observer_propagator(const dqo_observer* observer, double t, double* out, size_t capacity);
/* (1/T) int_0^T C_a Phi(t) dt, (N+1)x(2N+2). */
DQO_API dqo_status dqo_observer_time_average(const dqo_observer* observer, double horizon, double* out,
                                             size_t capacity);
DQO_API dqo_status dqo_observer_consensus_error(const dqo_observer* observer, double horizon, double* out);

#ifdef __cplusplus
}
#endif

#endif /* DQO_DQO_H */
