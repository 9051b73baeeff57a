/* Copyright 2026 The sqratio Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the sqratio solver library: sparse signal recovery with
 * squared L1/L2 regularization over three noise models (quadratic,
 * Lorentzian, sparse-outlier distance), plus seeded benchmark batches.
 *
 * All functions returning int yield SQR_OK (0) on success or an SQR_ERR_*
 * code; sqr_last_error() describes the most recent failure on the calling
 * thread. Handles are opaque and freed with the matching *_free call.
 */

#ifndef SQRATIO_SQRATIO_H_
#define SQRATIO_SQRATIO_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SQR_OK 0
#define SQR_ERR_INVALID_ARG 1   /* bad parameter or malformed value */
#define SQR_ERR_IO 2            /* file system failure */
#define SQR_ERR_BAD_FILE 3      /* wrong magic, checksum, or layout */
#define SQR_ERR_INVALID_INIT 4  /* initial point violates the level-set test */
#define SQR_ERR_LINE_SEARCH 5   /* stepsize fell below the floor */
#define SQR_ERR_NO_INIT 6       /* no valid initial point found */
#define SQR_ERR_INTERNAL 7

typedef struct sqr_instance sqr_instance;
typedef struct sqr_result sqr_result;
typedef struct sqr_batch sqr_batch;

const char* sqr_version(void);
const char* sqr_strerror(int code);
const char* sqr_last_error(void);

/* ------------------------------------------------------------ instances */

/* Robust family, scale i: (n, p, K, d) = (2560i, 720i, 80i, 10i), sparse
 * outlier loss with budget 2d, lambda = 0.01. */
int sqr_gen_robust(int scale_i, uint64_t seed, sqr_instance** out);
/* Cauchy family, scale i: (n, m, K) = (2060i, 720i, 80i), Lorentzian loss
 * with gamma = 0.02, lambda = 40. */
int sqr_gen_cauchy(int scale_i, uint64_t seed, sqr_instance** out);
/* Oversampled-DCT family: n = 1024, m = 64, K-sparse signal with dynamic
 * range D, coherence F, quadratic loss, lambda = 0.4. */
int sqr_gen_gaussian_dct(int64_t sparsity, double coherence,
                         double dynamic_range, uint64_t seed,
                         sqr_instance** out);

int sqr_instance_save(const sqr_instance* inst, const char* path);
int sqr_instance_load(const char* path, sqr_instance** out);
void sqr_instance_free(sqr_instance* inst);

int64_t sqr_instance_rows(const sqr_instance* inst);
int64_t sqr_instance_cols(const sqr_instance* inst);
const char* sqr_instance_family(const sqr_instance* inst);
uint64_t sqr_instance_seed(const sqr_instance* inst);
double sqr_instance_lambda(const sqr_instance* inst);
int64_t sqr_instance_sparsity(const sqr_instance* inst);
/* Copies the ground-truth signal (length = cols). */
int sqr_instance_truth(const sqr_instance* inst, double* buf, int64_t len);

int sqr_instance_set_lambda(sqr_instance* inst, double lambda);
/* Lorentzian scale; fails on other loss kinds. */
int sqr_instance_set_gamma(sqr_instance* inst, double gamma);
/* Outlier budget of the robust loss; fails on other loss kinds. */
int sqr_instance_set_outliers(sqr_instance* inst, int64_t count);

/* --------------------------------------------------------------- solver */

typedef struct sqr_options {
  double alpha_min;   /* lower trial-stepsize bound, default 1e-4 */
  double alpha_max;   /* upper trial-stepsize bound, default 1e4 */
  double sigma;       /* sufficient-descent constant, default 1e-3 */
  double shrink;      /* backtracking factor in (0,1), default 0.5 */
  double step_tol;    /* relative step termination tolerance, default 1e-6 */
  double alpha_floor; /* line-search failure floor, default 1e-20 */
  int64_t max_iters;  /* outer iteration cap, default 50000 */
} sqr_options;

void sqr_options_init(sqr_options* opts);

/* init_strategy: "pseudoinverse", "ridge", "ridge:<mu>", or "user" (then
 * x0/x0_len supply the point; pass NULL/0 otherwise). */
int sqr_solve(const sqr_instance* inst, const sqr_options* opts,
              const char* init_strategy, const double* x0, int64_t x0_len,
              sqr_result** out);
void sqr_result_free(sqr_result* res);

int sqr_result_solution(const sqr_result* res, double* buf, int64_t len);
double sqr_result_objective(const sqr_result* res);  /* model objective F */
double sqr_result_sparsity(const sqr_result* res);   /* ||x||_1^2/||x||_2^2 */
double sqr_result_rec_err(const sqr_result* res);
double sqr_result_residual(const sqr_result* res);
double sqr_result_initial_objective(const sqr_result* res);
double sqr_result_seconds(const sqr_result* res);
int64_t sqr_result_iterations(const sqr_result* res);
int64_t sqr_result_ls_trials(const sqr_result* res);
/* "step_tolerance", "max_iters", or "line_search_failure" */
const char* sqr_result_termination(const sqr_result* res);

int64_t sqr_result_trace_len(const sqr_result* res);
/* Copies per-iteration objective values, accepted stepsizes, and step
 * norms; any output pointer may be NULL. */
int sqr_result_trace(const sqr_result* res, double* objectives, double* alphas,
                     double* step_norms, int64_t len);

/* -------------------------------------------------------------- batches */

int sqr_batch_create(sqr_batch** out);
/* Loads a key=value config file (see README for the keys). */
int sqr_batch_load(const char* path, sqr_batch** out);
/* Applies one key=value override on top of the current config. */
int sqr_batch_set(sqr_batch* batch, const char* key, const char* value);
/* Runs all trials and writes <stem>_trials.csv / <stem>_summary.csv under
 * out_dir (NULL keeps the configured directory); jobs <= 0 keeps the
 * configured worker count. */
int sqr_batch_run(sqr_batch* batch, const char* out_dir, int jobs);
void sqr_batch_free(sqr_batch* batch);

int64_t sqr_batch_trials(const sqr_batch* batch);
int64_t sqr_batch_failed(const sqr_batch* batch);
double sqr_batch_mean_time(const sqr_batch* batch);
double sqr_batch_mean_obj(const sqr_batch* batch);
double sqr_batch_mean_ratio(const sqr_batch* batch);
double sqr_batch_mean_rec_err(const sqr_batch* batch);
const char* sqr_batch_trials_csv_path(const sqr_batch* batch);
const char* sqr_batch_summary_csv_path(const sqr_batch* batch);

/* ---------------------------------------------------------------- verify */

/* Runs the built-in property checks. Returns the number of failed checks,
 * or a negative SQR_ERR_* code on internal failure. *report (optional)
 * receives a verdict table; release it with sqr_string_free. */
int sqr_self_check(char** report);
void sqr_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SQRATIO_SQRATIO_H_ */
