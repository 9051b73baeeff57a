// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SQRATIO_HARNESS_HPP_
#define SQRATIO_HARNESS_HPP_

#include "sqratio/generate.hpp"

#include <optional>
#include <string>
#include <vector>

// Seeded trial batches over the benchmark families: initialization,
// solving, metrics, aggregation, CSV emission.

namespace sqratio {

struct NoValidInitialPoint : SolverError {
  using SolverError::SolverError;
};

/// ||x_hat - x_true||_2 / max(1, ||x_true||_2).
double recovery_error(const Vector& x_hat, const Vector& x_true);

enum class InitKind { pseudoinverse, ridge, user_supplied };

struct InitStrategy {
  InitKind kind = InitKind::pseudoinverse;
  double mu = 1e-6;  // ridge regularization weight
  Vector x0;         // user-supplied point

  static InitStrategy pseudoinverse();
  static InitStrategy ridge(double mu);
  static InitStrategy user(Vector x0);
  /// "pseudoinverse" | "ridge" | "ridge:<mu>".
  static InitStrategy parse(const std::string& text);
  std::string name() const;
};

/// Computes the strategy's point, clamps it to the box, and validates the
/// nontrivial-level-set condition F(x0) < lambda + q(-b). When the raw
/// point fails the condition, retries over hard-thresholded (top-j) and
/// rescaled copies of it; dense least-squares points provably fail the
/// condition whenever lambda is large, and sparsifying is the only
/// perturbation that lowers the ratio term. Throws NoValidInitialPoint
/// once the retry ladder is exhausted.
Vector initial_point(const SquaredRatioModel& model, const InitStrategy& strategy);
Vector initial_point(const GeneratedInstance& inst, const InitStrategy& strategy);

/// Spectral initial trial stepsize ||dx||^2 / |<dx, dg>| clamped to
/// [alpha_min, alpha_max]; 1 when the inner product vanishes.
double bb_initial_stepsize(const Vector& x_k, const Vector& x_prev,
                           const Vector& grad_k, const Vector& grad_prev,
                           const SolverConfig& config);

/// StepsizeRule wrapping bb_initial_stepsize (1 on the first iteration).
StepsizeRule bb_rule(const SolverConfig& config);

struct TrialReport {
  Family family = Family::robust_cs;
  int scale_i = 0;
  Eigen::Index sparsity = 0;
  double coherence = 0.0;
  double dynamic_range = 0.0;
  std::uint64_t seed = 0;
  std::string init;

  double wall_time_s = 0.0;       // solve only, excludes generation and IO
  double objective_final = 0.0;   // model objective F at the output
  double objective_ratio = 0.0;   // ||x||_1^2/||x||_2^2 at the output
  double rec_err = 0.0;
  long iterations = 0;
  long line_search_trials_total = 0;
  Termination termination_reason = Termination::max_iters;
  double criticality_residual = 0.0;

  bool ok = false;     // terminated via the step tolerance
  std::string error;   // set when the trial aborted (init/solver error)
};

struct BatchSummary {
  int n_trials = 0;
  int n_failed = 0;  // trials not terminating via the step tolerance
  double time_mean = 0.0, time_sd = 0.0;
  double obj_mean = 0.0, obj_sd = 0.0;        // F
  double ratio_mean = 0.0, ratio_sd = 0.0;    // squared L1/L2 value
  double rec_err_mean = 0.0, rec_err_sd = 0.0;
  std::string fingerprint;
};

struct BatchConfig {
  Family family = Family::robust_cs;
  int scale_i = 2;
  Eigen::Index sparsity = 8;    // K (gaussian_dct)
  double coherence = 5.0;       // F (gaussian_dct)
  double dynamic_range = 2.0;   // D (gaussian_dct)
  int n_trials = 20;
  std::uint64_t root_seed = 0;  // trial t uses seed root_seed + t

  SolverConfig solver;
  std::optional<double> tol;  // defaults per family: 1e-6, 1e-6, 1e-8
  InitStrategy init;
  std::optional<double> lambda_override;
  std::optional<double> gamma_override;
  std::optional<Eigen::Index> outliers_override;

  int jobs = 1;
  std::string out_dir = ".";
  bool record_traces = false;

  static BatchConfig load(const std::string& path);  // key=value file
  /// Applies one "key=value" override; throws std::invalid_argument on an
  /// unknown key or unparseable value.
  void set(const std::string& key, const std::string& value);
  double resolved_tol() const;
  /// Canonical key=value serialization of everything that affects results.
  std::string canonical() const;
  std::string fingerprint() const;
  /// Stem used for output file names, e.g. "robust_i2_seed7".
  std::string stem() const;
};

struct BatchResult {
  BatchConfig config;
  std::vector<TrialReport> reports;
  std::vector<SolveTrace> traces;  // filled when config.record_traces
  BatchSummary summary;
  std::string trials_csv_path;   // set by write_batch_csv
  std::string summary_csv_path;
};

/// Generates the instance for one trial of the batch (seed root+index,
/// overrides applied).
GeneratedInstance make_trial_instance(const BatchConfig& config, int trial_index);

/// Solves one instance with the BB rule and assembles the report. Errors
/// are captured in the report, never thrown.
TrialReport run_trial(const GeneratedInstance& inst, const SolverConfig& solver,
                      const InitStrategy& init, SolveTrace* trace_out = nullptr);

/// Runs the whole batch (possibly with config.jobs worker threads) and
/// aggregates. Failed trials are excluded from the means and counted.
BatchResult run_batch(const BatchConfig& config);

/// Writes <stem>_trials.csv and <stem>_summary.csv under config.out_dir
/// and records their paths in the result.
void write_batch_csv(BatchResult& result);

std::string trials_csv(const BatchResult& result);
std::string summary_csv(const BatchResult& result);

}  // namespace sqratio

#endif  // SQRATIO_HARNESS_HPP_
