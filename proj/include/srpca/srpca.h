#ifndef SRPCA_SRPCA_H
#define SRPCA_SRPCA_H

/* C interface to the matrix completion library. Matrices and results are
 * opaque handles; every function returns a status code and reports data
 * through out-parameters. On any failure srpca_last_error() describes what
 * went wrong for the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SRPCA_API __declspec(dllexport)
#else
#define SRPCA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srpca_status {
  SRPCA_OK = 0,
  SRPCA_ERR_ARGUMENT = 1,   /* bad parameter or config */
  SRPCA_ERR_PARSE = 2,      /* malformed input data */
  SRPCA_ERR_IO = 3,         /* file missing or unwritable */
  SRPCA_ERR_DIVERGED = 4,   /* solver residual blew up */
  SRPCA_ERR_INTERNAL = 5
} srpca_status;

typedef enum srpca_algorithm {
  SRPCA_ALG_SRPCA = 0,
  SRPCA_ALG_FAST_SRPCA = 1,
  SRPCA_ALG_SVT = 2,
  SRPCA_ALG_ALS = 3
} srpca_algorithm;

typedef enum srpca_termination {
  SRPCA_TERM_CONVERGED = 0,
  SRPCA_TERM_MAX_ITER = 1,
  SRPCA_TERM_FAST_FIXPOINT = 2
} srpca_termination;

typedef struct srpca_config {
  int32_t algorithm;        /* srpca_algorithm */
  int32_t rank;
  double tol;
  double lambda_;
  int32_t max_iter;
  uint64_t seed;
  int32_t standardize;      /* 0 or 1 */
  double ridge;             /* relative least-squares regularizer */
  double svt_tau;           /* <= 0 selects the default */
  double svt_delta;         /* <= 0 selects the default */
  int32_t svt_soft;         /* 0 or 1 */
} srpca_config;

typedef struct srpca_matrix srpca_matrix;
typedef struct srpca_result srpca_result;

/* Called once per iteration with the observed squared residual. */
typedef void (*srpca_progress_fn)(int32_t iteration, double residual,
                                  void* user);

SRPCA_API const char* srpca_version(void);

/* Thread-local message for the most recent failing call; empty string when
 * the last call succeeded. The pointer stays valid until the thread's next
 * library call. */
SRPCA_API const char* srpca_last_error(void);

/* Frees strings returned with ownership (report JSON). */
SRPCA_API void srpca_string_free(char* s);

SRPCA_API void srpca_config_defaults(srpca_config* cfg);

/* --- matrices ---------------------------------------------------------- */

/* Copies values (row-major, rows*cols doubles). mask may be NULL for fully
 * observed; otherwise nonzero bytes mark observed cells. */
SRPCA_API srpca_status srpca_matrix_create(int64_t rows, int64_t cols,
                                           const double* values,
                                           const uint8_t* mask,
                                           srpca_matrix** out);
SRPCA_API srpca_status srpca_matrix_load_csv(const char* path,
                                             srpca_matrix** out);
/* mask_path may be NULL. */
SRPCA_API srpca_status srpca_matrix_load_pgm(const char* path,
                                             const char* mask_path,
                                             int32_t* maxval_out,
                                             srpca_matrix** out);
SRPCA_API srpca_status srpca_matrix_load_movielens(const char* path,
                                                   int64_t* duplicates_out,
                                                   srpca_matrix** out);
SRPCA_API srpca_status srpca_matrix_save_csv(const srpca_matrix* m,
                                             const char* path);
SRPCA_API srpca_status srpca_matrix_save_pgm(const srpca_matrix* m,
                                             const char* path, int32_t maxval);

SRPCA_API int64_t srpca_matrix_rows(const srpca_matrix* m);
SRPCA_API int64_t srpca_matrix_cols(const srpca_matrix* m);
SRPCA_API int64_t srpca_matrix_observed_count(const srpca_matrix* m);
/* Row-major copy into caller storage of rows*cols doubles; unobserved cells
 * come out as NaN. */
SRPCA_API srpca_status srpca_matrix_values(const srpca_matrix* m, double* out);
SRPCA_API srpca_status srpca_matrix_observed_range(const srpca_matrix* m,
                                                   double* min_out,
                                                   double* max_out);
SRPCA_API uint64_t srpca_matrix_fingerprint(const srpca_matrix* m);

/* Hides round(fraction * observed) observed cells, exact and seeded. */
SRPCA_API srpca_status srpca_matrix_mask_random(const srpca_matrix* m,
                                                double missing_fraction,
                                                uint64_t seed,
                                                srpca_matrix** out);
/* Splits observed cells into train and holdout; fraction goes to holdout. */
SRPCA_API srpca_status srpca_matrix_holdout(const srpca_matrix* m,
                                            double fraction, uint64_t seed,
                                            srpca_matrix** train_out,
                                            srpca_matrix** holdout_out);
SRPCA_API void srpca_matrix_free(srpca_matrix* m);

/* --- completion -------------------------------------------------------- */

SRPCA_API srpca_status srpca_complete(const srpca_matrix* x,
                                      const srpca_config* cfg,
                                      srpca_progress_fn progress, void* user,
                                      srpca_result** out);

SRPCA_API int32_t srpca_result_iterations(const srpca_result* r);
SRPCA_API int32_t srpca_result_termination(const srpca_result* r);
SRPCA_API double srpca_result_wall_seconds(const srpca_result* r);
/* Row-major copy of the completed matrix (rows*cols doubles). */
SRPCA_API srpca_status srpca_result_values(const srpca_result* r, double* out);
/* Residual history; pass count_out first with residuals NULL to size the
 * buffer. */
SRPCA_API srpca_status srpca_result_residuals(const srpca_result* r,
                                              double* residuals,
                                              int64_t* count_out);
/* JSON run report; caller frees with srpca_string_free. */
SRPCA_API srpca_status srpca_result_report_json(const srpca_result* r,
                                                char** out);
SRPCA_API void srpca_result_free(srpca_result* r);

/* --- metrics ----------------------------------------------------------- */

SRPCA_API srpca_status srpca_observed_residual(const srpca_matrix* x,
                                               const srpca_result* r,
                                               double* out);
/* Range normalization comes from train's observed values. */
SRPCA_API srpca_status srpca_nmae(const srpca_matrix* holdout,
                                  const srpca_result* r,
                                  const srpca_matrix* train, int32_t clip,
                                  double* out);

/* --- benchmarks -------------------------------------------------------- */

/* Runs the scenario JSON at scenario_path; report JSON is returned through
 * out (free with srpca_string_free). */
SRPCA_API srpca_status srpca_bench_run_file(const char* scenario_path,
                                            char** out);
SRPCA_API srpca_status srpca_bench_run_json(const char* scenario_json,
                                            char** out);

#ifdef __cplusplus
}
#endif

#endif
