// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sqratio/sqratio.h"

#include "sqratio/harness.hpp"
#include "sqratio/verify.hpp"

#include <chrono>
#include <cstring>
#include <memory>
#include <optional>

using namespace sqratio;

struct sqr_instance {
  GeneratedInstance inst;
};

struct sqr_result {
  Vector x;
  TrialReport report;
  SolveTrace trace;
};

struct sqr_batch {
  BatchConfig config;
  std::optional<BatchResult> result;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SQR_OK;
  } catch (const InvalidInitialPoint& e) {
    return fail(SQR_ERR_INVALID_INIT, e.what());
  } catch (const NoValidInitialPoint& e) {
    return fail(SQR_ERR_NO_INIT, e.what());
  } catch (const LineSearchFailure& e) {
    return fail(SQR_ERR_LINE_SEARCH, e.what());
  } catch (const BadInstanceFile& e) {
    return fail(SQR_ERR_BAD_FILE, e.what());
  } catch (const IoError& e) {
    return fail(SQR_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SQR_ERR_INVALID_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(SQR_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* sqr_version(void) { return "1.0.0"; }

const char* sqr_strerror(int code) {
  switch (code) {
    case SQR_OK: return "ok";
    case SQR_ERR_INVALID_ARG: return "invalid argument";
    case SQR_ERR_IO: return "i/o failure";
    case SQR_ERR_BAD_FILE: return "corrupt or unrecognized file";
    case SQR_ERR_INVALID_INIT: return "invalid initial point";
    case SQR_ERR_LINE_SEARCH: return "line search failure";
    case SQR_ERR_NO_INIT: return "no valid initial point";
    case SQR_ERR_INTERNAL: return "internal error";
  }
  return "unknown error";
}

const char* sqr_last_error(void) { return g_last_error.c_str(); }

int sqr_gen_robust(int scale_i, uint64_t seed, sqr_instance** out) {
  if (out == nullptr) return fail(SQR_ERR_INVALID_ARG, "out is null");
  return guarded([&] { *out = new sqr_instance{gen_robust_instance(scale_i, seed)}; });
}

int sqr_gen_cauchy(int scale_i, uint64_t seed, sqr_instance** out) {
  if (out == nullptr) return fail(SQR_ERR_INVALID_ARG, "out is null");
  return guarded([&] { *out = new sqr_instance{gen_cauchy_instance(scale_i, seed)}; });
}

int sqr_gen_gaussian_dct(int64_t sparsity, double coherence,
                         double dynamic_range, uint64_t seed,
                         sqr_instance** out) {
  if (out == nullptr) return fail(SQR_ERR_INVALID_ARG, "out is null");
  return guarded([&] {
    *out = new sqr_instance{
        gen_gaussian_dct_instance(sparsity, coherence, dynamic_range, seed)};
  });
}

int sqr_instance_save(const sqr_instance* inst, const char* path) {
  if (inst == nullptr || path == nullptr)
    return fail(SQR_ERR_INVALID_ARG, "null argument");
  return guarded([&] { save_instance(inst->inst, path); });
}

int sqr_instance_load(const char* path, sqr_instance** out) {
  if (path == nullptr || out == nullptr)
    return fail(SQR_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = new sqr_instance{load_instance(path)}; });
}

void sqr_instance_free(sqr_instance* inst) { delete inst; }

int64_t sqr_instance_rows(const sqr_instance* inst) {
  return inst == nullptr ? 0 : inst->inst.model.rows();
}

int64_t sqr_instance_cols(const sqr_instance* inst) {
  return inst == nullptr ? 0 : inst->inst.model.cols();
}

const char* sqr_instance_family(const sqr_instance* inst) {
  return inst == nullptr ? "" : to_string(inst->inst.family);
}

uint64_t sqr_instance_seed(const sqr_instance* inst) {
  return inst == nullptr ? 0 : inst->inst.seed;
}

double sqr_instance_lambda(const sqr_instance* inst) {
  return inst == nullptr ? 0.0 : inst->inst.model.lambda;
}

int64_t sqr_instance_sparsity(const sqr_instance* inst) {
  return inst == nullptr ? 0 : inst->inst.sparsity;
}

int sqr_instance_truth(const sqr_instance* inst, double* buf, int64_t len) {
  if (inst == nullptr || buf == nullptr)
    return fail(SQR_ERR_INVALID_ARG, "null argument");
  if (len < inst->inst.x_true.size())
    return fail(SQR_ERR_INVALID_ARG, "buffer too small");
  std::memcpy(buf, inst->inst.x_true.data(),
              sizeof(double) * static_cast<size_t>(inst->inst.x_true.size()));
  return SQR_OK;
}

int sqr_instance_set_lambda(sqr_instance* inst, double lambda) {
  if (inst == nullptr) return fail(SQR_ERR_INVALID_ARG, "null instance");
  if (!(lambda > 0.0)) return fail(SQR_ERR_INVALID_ARG, "lambda must be positive");
  inst->inst.model.lambda = lambda;
  return SQR_OK;
}

int sqr_instance_set_gamma(sqr_instance* inst, double gamma) {
  if (inst == nullptr) return fail(SQR_ERR_INVALID_ARG, "null instance");
  if (inst->inst.model.loss.kind() != LossKind::lorentzian)
    return fail(SQR_ERR_INVALID_ARG, "gamma applies only to the Lorentzian loss");
  return guarded([&] { inst->inst.model.loss = LossModel::lorentzian(gamma); });
}

int sqr_instance_set_outliers(sqr_instance* inst, int64_t count) {
  if (inst == nullptr) return fail(SQR_ERR_INVALID_ARG, "null instance");
  if (inst->inst.model.loss.kind() != LossKind::robust_distance)
    return fail(SQR_ERR_INVALID_ARG, "outlier budget applies only to the robust loss");
  if (count < 0 || count > inst->inst.model.rows())
    return fail(SQR_ERR_INVALID_ARG, "outlier budget out of range");
  return guarded([&] { inst->inst.model.loss = LossModel::robust_distance(count); });
}

void sqr_options_init(sqr_options* opts) {
  if (opts == nullptr) return;
  const SolverConfig defaults;
  opts->alpha_min = defaults.alpha_min;
  opts->alpha_max = defaults.alpha_max;
  opts->sigma = defaults.sigma;
  opts->shrink = defaults.shrink_factor;
  opts->step_tol = defaults.rel_step_tol;
  opts->alpha_floor = defaults.alpha_floor;
  opts->max_iters = defaults.max_outer_iters;
}

int sqr_solve(const sqr_instance* inst, const sqr_options* opts,
              const char* init_strategy, const double* x0, int64_t x0_len,
              sqr_result** out) {
  if (inst == nullptr || out == nullptr)
    return fail(SQR_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    SolverConfig config;
    if (opts != nullptr) {
      config.alpha_min = opts->alpha_min;
      config.alpha_max = opts->alpha_max;
      config.sigma = opts->sigma;
      config.shrink_factor = opts->shrink;
      config.rel_step_tol = opts->step_tol;
      config.alpha_floor = opts->alpha_floor;
      config.max_outer_iters = opts->max_iters;
    }
    config.validate();

    InitStrategy strategy;
    const std::string name = init_strategy == nullptr ? "pseudoinverse" : init_strategy;
    if (name == "user") {
      if (x0 == nullptr || x0_len != inst->inst.model.cols())
        throw std::invalid_argument("user strategy requires x0 of length cols");
      strategy = InitStrategy::user(Vector(Eigen::Map<const Vector>(x0, x0_len)));
    } else {
      strategy = InitStrategy::parse(name);
    }

    const Vector start = initial_point(inst->inst, strategy);
    auto obj = build_objective(inst->inst.model);

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult solved = solve(obj, start, config, bb_rule(config));
    const auto t1 = std::chrono::steady_clock::now();

    auto res = std::make_unique<sqr_result>();
    res->x = std::move(solved.x);
    res->trace = std::move(solved.trace);
    TrialReport& rep = res->report;
    rep.family = inst->inst.family;
    rep.scale_i = inst->inst.scale_i;
    rep.sparsity = inst->inst.sparsity;
    rep.coherence = inst->inst.coherence;
    rep.dynamic_range = inst->inst.dynamic_range;
    rep.seed = inst->inst.seed;
    rep.init = strategy.name();
    rep.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    rep.objective_final = evaluate_F(obj, res->x);
    rep.objective_ratio = effective_sparsity(res->x);
    rep.rec_err = recovery_error(res->x, inst->inst.x_true);
    rep.iterations = static_cast<long>(res->trace.iterations.size());
    rep.line_search_trials_total = res->trace.total_line_search_trials();
    rep.termination_reason = res->trace.termination_reason;
    rep.criticality_residual = res->trace.final_residual;
    rep.ok = rep.termination_reason == Termination::step_tolerance;
    *out = res.release();
  });
}

void sqr_result_free(sqr_result* res) { delete res; }

int sqr_result_solution(const sqr_result* res, double* buf, int64_t len) {
  if (res == nullptr || buf == nullptr)
    return fail(SQR_ERR_INVALID_ARG, "null argument");
  if (len < res->x.size()) return fail(SQR_ERR_INVALID_ARG, "buffer too small");
  std::memcpy(buf, res->x.data(),
              sizeof(double) * static_cast<size_t>(res->x.size()));
  return SQR_OK;
}

double sqr_result_objective(const sqr_result* res) {
  return res == nullptr ? 0.0 : res->report.objective_final;
}

double sqr_result_sparsity(const sqr_result* res) {
  return res == nullptr ? 0.0 : res->report.objective_ratio;
}

double sqr_result_rec_err(const sqr_result* res) {
  return res == nullptr ? 0.0 : res->report.rec_err;
}

double sqr_result_residual(const sqr_result* res) {
  return res == nullptr ? 0.0 : res->report.criticality_residual;
}

double sqr_result_initial_objective(const sqr_result* res) {
  return res == nullptr ? 0.0 : res->trace.initial_objective;
}

double sqr_result_seconds(const sqr_result* res) {
  return res == nullptr ? 0.0 : res->report.wall_time_s;
}

int64_t sqr_result_iterations(const sqr_result* res) {
  return res == nullptr ? 0 : res->report.iterations;
}

int64_t sqr_result_ls_trials(const sqr_result* res) {
  return res == nullptr ? 0 : res->report.line_search_trials_total;
}

const char* sqr_result_termination(const sqr_result* res) {
  return res == nullptr ? "" : to_string(res->report.termination_reason);
}

int64_t sqr_result_trace_len(const sqr_result* res) {
  return res == nullptr ? 0
                        : static_cast<int64_t>(res->trace.iterations.size());
}

int sqr_result_trace(const sqr_result* res, double* objectives, double* alphas,
                     double* step_norms, int64_t len) {
  if (res == nullptr) return fail(SQR_ERR_INVALID_ARG, "null result");
  const auto n = static_cast<int64_t>(res->trace.iterations.size());
  if (len < n) return fail(SQR_ERR_INVALID_ARG, "buffer too small");
  for (int64_t i = 0; i < n; ++i) {
    const auto& rec = res->trace.iterations[static_cast<size_t>(i)];
    if (objectives != nullptr) objectives[i] = rec.F_value;
    if (alphas != nullptr) alphas[i] = rec.alpha;
    if (step_norms != nullptr) step_norms[i] = rec.step_norm;
  }
  return SQR_OK;
}

int sqr_batch_create(sqr_batch** out) {
  if (out == nullptr) return fail(SQR_ERR_INVALID_ARG, "out is null");
  *out = new sqr_batch{};
  return SQR_OK;
}

int sqr_batch_load(const char* path, sqr_batch** out) {
  if (path == nullptr || out == nullptr)
    return fail(SQR_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = new sqr_batch{BatchConfig::load(path), {}}; });
}

int sqr_batch_set(sqr_batch* batch, const char* key, const char* value) {
  if (batch == nullptr || key == nullptr || value == nullptr)
    return fail(SQR_ERR_INVALID_ARG, "null argument");
  return guarded([&] { batch->config.set(key, value); });
}

int sqr_batch_run(sqr_batch* batch, const char* out_dir, int jobs) {
  if (batch == nullptr) return fail(SQR_ERR_INVALID_ARG, "null batch");
  return guarded([&] {
    if (out_dir != nullptr) batch->config.out_dir = out_dir;
    if (jobs > 0) batch->config.jobs = jobs;
    batch->result = run_batch(batch->config);
    write_batch_csv(*batch->result);
  });
}

void sqr_batch_free(sqr_batch* batch) { delete batch; }

int64_t sqr_batch_trials(const sqr_batch* batch) {
  return batch != nullptr && batch->result ? batch->result->summary.n_trials : 0;
}

int64_t sqr_batch_failed(const sqr_batch* batch) {
  return batch != nullptr && batch->result ? batch->result->summary.n_failed : 0;
}

double sqr_batch_mean_time(const sqr_batch* batch) {
  return batch != nullptr && batch->result ? batch->result->summary.time_mean : 0.0;
}

double sqr_batch_mean_obj(const sqr_batch* batch) {
  return batch != nullptr && batch->result ? batch->result->summary.obj_mean : 0.0;
}

double sqr_batch_mean_ratio(const sqr_batch* batch) {
  return batch != nullptr && batch->result ? batch->result->summary.ratio_mean : 0.0;
}

double sqr_batch_mean_rec_err(const sqr_batch* batch) {
  return batch != nullptr && batch->result ? batch->result->summary.rec_err_mean
                                           : 0.0;
}

const char* sqr_batch_trials_csv_path(const sqr_batch* batch) {
  return batch != nullptr && batch->result ? batch->result->trials_csv_path.c_str()
                                           : "";
}

const char* sqr_batch_summary_csv_path(const sqr_batch* batch) {
  return batch != nullptr && batch->result
             ? batch->result->summary_csv_path.c_str()
             : "";
}

int sqr_self_check(char** report) {
  int failed = 0;
  const int rc = guarded([&] {
    const auto results = run_self_checks();
    for (const auto& r : results)
      if (!r.pass) ++failed;
    if (report != nullptr) {
      const std::string table = format_verdict_table(results);
      char* buf = new char[table.size() + 1];
      std::memcpy(buf, table.c_str(), table.size() + 1);
      *report = buf;
    }
  });
  if (rc != SQR_OK) return -rc;
  return failed;
}

void sqr_string_free(char* s) { delete[] s; }

}  // extern "C"
