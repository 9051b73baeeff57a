// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sqratio/harness.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace sqratio {

double recovery_error(const Vector& x_hat, const Vector& x_true) {
  if (x_hat.size() != x_true.size())
    throw std::invalid_argument("recovery_error: size mismatch");
  return (x_hat - x_true).norm() / std::max(1.0, x_true.norm());
}

InitStrategy InitStrategy::pseudoinverse() { return InitStrategy{}; }

InitStrategy InitStrategy::ridge(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("InitStrategy::ridge: mu must be positive");
  InitStrategy s;
  s.kind = InitKind::ridge;
  s.mu = mu;
  return s;
}

InitStrategy InitStrategy::user(Vector x0) {
  InitStrategy s;
  s.kind = InitKind::user_supplied;
  s.x0 = std::move(x0);
  return s;
}

InitStrategy InitStrategy::parse(const std::string& text) {
  if (text == "pseudoinverse") return pseudoinverse();
  if (text == "ridge") return ridge(1e-6);
  if (text.rfind("ridge:", 0) == 0) return ridge(std::stod(text.substr(6)));
  throw std::invalid_argument("unknown init strategy: " + text);
}

std::string InitStrategy::name() const {
  switch (kind) {
    case InitKind::pseudoinverse: return "pseudoinverse";
    case InitKind::ridge: return "ridge:" + std::to_string(mu);
    case InitKind::user_supplied: return "user_supplied";
  }
  return "unknown";
}

namespace {

// Minimum-norm least-squares solution. Small systems go through a
// rank-revealing decomposition (the DCT matrices can be numerically rank
// deficient); large ones through the normal equations.
Vector min_norm_least_squares(const Matrix& A, const Vector& b) {
  if (A.rows() <= 256) {
    return A.completeOrthogonalDecomposition().solve(b);
  }
  Matrix gram = Matrix::Zero(A.rows(), A.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(A);
  auto llt = gram.selfadjointView<Eigen::Lower>().llt();
  if (llt.info() == Eigen::Success) return A.transpose() * llt.solve(b);
  return A.transpose() * gram.selfadjointView<Eigen::Lower>().ldlt().solve(b);
}

Vector ridge_least_squares(const Matrix& A, const Vector& b, double mu) {
  Matrix gram = Matrix::Zero(A.rows(), A.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(A);
  gram.diagonal().array() += mu;
  return A.transpose() *
         gram.selfadjointView<Eigen::Lower>().llt().solve(b);
}

bool box_is_unbounded(const BoxBounds& box) {
  return !box.lower.array().isFinite().any() &&
         !box.upper.array().isFinite().any();
}

}  // namespace

Vector initial_point(const SquaredRatioModel& model,
                     const InitStrategy& strategy) {
  model.validate();
  Vector base;
  switch (strategy.kind) {
    case InitKind::pseudoinverse:
      base = min_norm_least_squares(model.A, model.b);
      break;
    case InitKind::ridge:
      base = ridge_least_squares(model.A, model.b, strategy.mu);
      break;
    case InitKind::user_supplied:
      if (strategy.x0.size() != model.cols())
        throw std::invalid_argument("initial_point: user point has wrong dimension");
      base = strategy.x0;
      break;
  }

  const double threshold = model.lambda + model.loss.q_value(-model.b);
  const Vector clamped = model.box.clamp(base);
  auto obj = build_objective(model);
  if (check_nontrivial_init(obj, clamped, model.lambda,
                            model.loss.q_value(-model.b)))
    return clamped;

  // Retry ladder: hard-threshold to the top-j entries and rescale. The
  // ratio term is scale invariant, so only sparsification can lower it.
  static constexpr double kScales[] = {1.0,       0.5,    2.0,    0.25,
                                       4.0,       0.125,  8.0,    0.0625,
                                       16.0,      0.03125, 32.0};
  const bool unbounded = box_is_unbounded(model.box);
  for (Eigen::Index j = model.cols(); j >= 1; j /= 2) {
    Vector xj = model.box.clamp(project_sparse(clamped, j));
    const double g = xj.squaredNorm();
    if (g == 0.0) continue;
    if (unbounded) {
      // F(t*xj) = lambda*es(xj) + q(t*A*xj - b): one matrix pass per j.
      const double ratio_term = model.lambda * effective_sparsity(xj);
      const Vector Axj = model.A * xj;
      for (const double t : kScales) {
        if (ratio_term + model.loss.q_value(t * Axj - model.b) < threshold)
          return Vector(t * xj);
      }
    } else {
      for (const double t : kScales) {
        Vector cand = model.box.clamp(t * xj);
        if (check_nontrivial_init(obj, cand, model.lambda,
                                  model.loss.q_value(-model.b)))
          return cand;
      }
    }
  }
  throw NoValidInitialPoint(
      "initial_point: no candidate satisfied F(x0) < lambda + q(-b) for "
      "strategy " +
      strategy.name());
}

Vector initial_point(const GeneratedInstance& inst, const InitStrategy& strategy) {
  return initial_point(inst.model, strategy);
}

double bb_initial_stepsize(const Vector& x_k, const Vector& x_prev,
                           const Vector& grad_k, const Vector& grad_prev,
                           const SolverConfig& config) {
  const Vector dx = x_k - x_prev;
  const double denom = std::abs(dx.dot(grad_k - grad_prev));
  if (denom == 0.0) return 1.0;
  const double ratio = dx.squaredNorm() / denom;
  return std::min(config.alpha_max, std::max(config.alpha_min, ratio));
}

StepsizeRule bb_rule(const SolverConfig& config) {
  return [config](const StepContext& ctx) {
    if (ctx.x_prev == nullptr) return 1.0;
    return bb_initial_stepsize(ctx.x, *ctx.x_prev, ctx.grad_h1,
                               *ctx.grad_h1_prev, config);
  };
}

TrialReport run_trial(const GeneratedInstance& inst, const SolverConfig& solver,
                      const InitStrategy& init, SolveTrace* trace_out) {
  TrialReport report;
  report.family = inst.family;
  report.scale_i = inst.scale_i;
  report.sparsity = inst.sparsity;
  report.coherence = inst.coherence;
  report.dynamic_range = inst.dynamic_range;
  report.seed = inst.seed;
  report.init = init.name();

  try {
    const Vector x0 = initial_point(inst, init);
    auto obj = build_objective(inst.model);
    const auto rule = bb_rule(solver);

    const auto start = std::chrono::steady_clock::now();
    SolveResult result = solve(obj, x0, solver, rule);
    const auto stop = std::chrono::steady_clock::now();

    report.wall_time_s =
        std::chrono::duration<double>(stop - start).count();
    report.objective_final = evaluate_F(obj, result.x);
    report.objective_ratio = effective_sparsity(result.x);
    report.rec_err = recovery_error(result.x, inst.x_true);
    report.iterations = static_cast<long>(result.trace.iterations.size());
    report.line_search_trials_total = result.trace.total_line_search_trials();
    report.termination_reason = result.trace.termination_reason;
    report.criticality_residual = result.trace.final_residual;
    report.ok = report.termination_reason == Termination::step_tolerance;
    if (trace_out != nullptr) *trace_out = std::move(result.trace);
  } catch (const std::exception& e) {
    report.ok = false;
    report.error = e.what();
    report.objective_final = std::numeric_limits<double>::quiet_NaN();
    report.objective_ratio = std::numeric_limits<double>::quiet_NaN();
    report.rec_err = std::numeric_limits<double>::quiet_NaN();
    report.criticality_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

// ------------------------------------------------------------- batch config

BatchConfig BatchConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  BatchConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r\n");
      if (first == std::string::npos) return std::string();
      const auto last = s.find_last_not_of(" \t\r\n");
      return s.substr(first, last - first + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void BatchConfig::set(const std::string& key, const std::string& value) {
  auto as_double = [&](const char* what) {
    try {
      return std::stod(value);
    } catch (...) {
      throw std::invalid_argument(std::string("bad value for ") + what + ": " + value);
    }
  };
  auto as_long = [&](const char* what) {
    try {
      return std::stoll(value);
    } catch (...) {
      throw std::invalid_argument(std::string("bad value for ") + what + ": " + value);
    }
  };
  if (key == "family") family = family_from_string(value);
  else if (key == "i") scale_i = static_cast<int>(as_long("i"));
  else if (key == "K") sparsity = static_cast<Eigen::Index>(as_long("K"));
  else if (key == "F") coherence = as_double("F");
  else if (key == "D") dynamic_range = as_double("D");
  else if (key == "trials") n_trials = static_cast<int>(as_long("trials"));
  else if (key == "seed") {
    try {
      root_seed = std::stoull(value);
    } catch (...) {
      throw std::invalid_argument("bad value for seed: " + value);
    }
  }
  else if (key == "tol") tol = as_double("tol");
  else if (key == "sigma") solver.sigma = as_double("sigma");
  else if (key == "alpha_min") solver.alpha_min = as_double("alpha_min");
  else if (key == "alpha_max") solver.alpha_max = as_double("alpha_max");
  else if (key == "shrink") solver.shrink_factor = as_double("shrink");
  else if (key == "alpha_floor") solver.alpha_floor = as_double("alpha_floor");
  else if (key == "max_iters") solver.max_outer_iters = as_long("max_iters");
  else if (key == "init") init = InitStrategy::parse(value);
  else if (key == "lambda") lambda_override = as_double("lambda");
  else if (key == "gamma") gamma_override = as_double("gamma");
  else if (key == "outliers") outliers_override = static_cast<Eigen::Index>(as_long("outliers"));
  else if (key == "jobs") jobs = static_cast<int>(as_long("jobs"));
  else if (key == "out_dir") out_dir = value;
  else if (key == "rng") {
    if (value != kRngName)
      throw std::invalid_argument("config requests rng '" + value +
                                  "' but this build provides '" + kRngName + "'");
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

double BatchConfig::resolved_tol() const {
  if (tol) return *tol;
  return family == Family::gaussian_dct ? 1e-8 : 1e-6;
}

std::string BatchConfig::canonical() const {
  std::ostringstream out;
  out << "family=" << to_string(family) << "\n";
  if (family == Family::gaussian_dct)
    out << "K=" << sparsity << "\nF=" << coherence << "\nD=" << dynamic_range
        << "\n";
  else
    out << "i=" << scale_i << "\n";
  out << "trials=" << n_trials << "\n";
  out << "seed=" << root_seed << "\n";
  out << "tol=" << resolved_tol() << "\n";
  out << "sigma=" << solver.sigma << "\n";
  out << "alpha_min=" << solver.alpha_min << "\n";
  out << "alpha_max=" << solver.alpha_max << "\n";
  out << "shrink=" << solver.shrink_factor << "\n";
  out << "alpha_floor=" << solver.alpha_floor << "\n";
  out << "max_iters=" << solver.max_outer_iters << "\n";
  out << "init=" << init.name() << "\n";
  if (lambda_override) out << "lambda=" << *lambda_override << "\n";
  if (gamma_override) out << "gamma=" << *gamma_override << "\n";
  if (outliers_override) out << "outliers=" << *outliers_override << "\n";
  out << "rng=" << kRngName << "\n";
  return out.str();
}

std::string BatchConfig::fingerprint() const {
  const std::string text = canonical();
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::string BatchConfig::stem() const {
  std::ostringstream out;
  out << to_string(family);
  if (family == Family::gaussian_dct)
    out << "_K" << sparsity << "_F" << coherence << "_D" << dynamic_range;
  else
    out << "_i" << scale_i;
  out << "_seed" << root_seed;
  return out.str();
}

GeneratedInstance make_trial_instance(const BatchConfig& config,
                                      int trial_index) {
  const std::uint64_t seed = config.root_seed + static_cast<std::uint64_t>(trial_index);
  GeneratedInstance inst;
  switch (config.family) {
    case Family::robust_cs:
      inst = gen_robust_instance(config.scale_i, seed);
      break;
    case Family::cauchy:
      inst = gen_cauchy_instance(config.scale_i, seed);
      break;
    case Family::gaussian_dct:
      inst = gen_gaussian_dct_instance(config.sparsity, config.coherence,
                                       config.dynamic_range, seed);
      break;
  }
  if (config.lambda_override) inst.model.lambda = *config.lambda_override;
  if (config.gamma_override) {
    if (inst.model.loss.kind() != LossKind::lorentzian)
      throw std::invalid_argument("gamma override only applies to the cauchy family");
    inst.model.loss = LossModel::lorentzian(*config.gamma_override);
  }
  if (config.outliers_override) {
    if (inst.model.loss.kind() != LossKind::robust_distance)
      throw std::invalid_argument("outliers override only applies to the robust family");
    inst.model.loss = LossModel::robust_distance(*config.outliers_override);
  }
  return inst;
}

namespace {

void accumulate(const std::vector<double>& xs, double* mean, double* sd) {
  if (xs.empty()) {
    *mean = std::numeric_limits<double>::quiet_NaN();
    *sd = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (const double x : xs) sum += x;
  const double mu = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double x : xs) ss += (x - mu) * (x - mu);
  *mean = mu;
  *sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

}  // namespace

BatchResult run_batch(const BatchConfig& config) {
  if (config.n_trials <= 0)
    throw std::invalid_argument("run_batch: trials must be positive");
  BatchResult result;
  result.config = config;
  result.config.solver.rel_step_tol = config.resolved_tol();
  result.config.solver.validate();
  result.reports.resize(static_cast<size_t>(config.n_trials));
  if (config.record_traces)
    result.traces.resize(static_cast<size_t>(config.n_trials));

  const auto work = [&](int t) {
    try {
      const GeneratedInstance inst = make_trial_instance(result.config, t);
      SolveTrace* trace =
          config.record_traces ? &result.traces[static_cast<size_t>(t)] : nullptr;
      result.reports[static_cast<size_t>(t)] =
          run_trial(inst, result.config.solver, result.config.init, trace);
    } catch (const std::exception& e) {
      TrialReport& rep = result.reports[static_cast<size_t>(t)];
      rep.seed = config.root_seed + static_cast<std::uint64_t>(t);
      rep.family = config.family;
      rep.ok = false;
      rep.error = e.what();
    }
  };

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (int t = 0; t < config.n_trials; ++t) work(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(jobs, config.n_trials);
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < config.n_trials;
             t = next.fetch_add(1))
          work(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  BatchSummary& s = result.summary;
  s.n_trials = config.n_trials;
  std::vector<double> times, objs, ratios, errs;
  for (const auto& rep : result.reports) {
    if (!rep.ok) {
      ++s.n_failed;
      continue;
    }
    times.push_back(rep.wall_time_s);
    objs.push_back(rep.objective_final);
    ratios.push_back(rep.objective_ratio);
    errs.push_back(rep.rec_err);
  }
  accumulate(times, &s.time_mean, &s.time_sd);
  accumulate(objs, &s.obj_mean, &s.obj_sd);
  accumulate(ratios, &s.ratio_mean, &s.ratio_sd);
  accumulate(errs, &s.rec_err_mean, &s.rec_err_sd);
  s.fingerprint = result.config.fingerprint();
  return result;
}

// ----------------------------------------------------------------- CSV out

namespace {

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string trials_csv(const BatchResult& result) {
  std::ostringstream out;
  out << "seed,time_s,obj,rec_err,iters,residual,termination\n";
  for (const auto& rep : result.reports) {
    out << rep.seed << ',' << fmt(rep.wall_time_s, "%.6f") << ','
        << fmt(rep.objective_final) << ',' << fmt(rep.rec_err) << ','
        << rep.iterations << ',' << fmt(rep.criticality_residual, "%.6e")
        << ',';
    if (!rep.error.empty())
      out << "error";
    else
      out << to_string(rep.termination_reason);
    out << '\n';
  }
  return out.str();
}

std::string summary_csv(const BatchResult& result) {
  const BatchSummary& s = result.summary;
  std::ostringstream out;
  out << "family,params,init,trials,failed,time_mean,time_sd,obj_mean,obj_sd,"
         "ratio_mean,ratio_sd,rec_err_mean,rec_err_sd,rng,fingerprint\n";
  out << to_string(result.config.family) << ',';
  if (result.config.family == Family::gaussian_dct)
    out << "K=" << result.config.sparsity << ";F=" << result.config.coherence
        << ";D=" << result.config.dynamic_range;
  else
    out << "i=" << result.config.scale_i;
  out << ',' << result.config.init.name();
  if (result.config.family != Family::robust_cs) out << ";protocol-modified";
  out << ',' << s.n_trials << ',' << s.n_failed << ','
      << fmt(s.time_mean, "%.6f") << ',' << fmt(s.time_sd, "%.6f") << ','
      << fmt(s.obj_mean) << ',' << fmt(s.obj_sd) << ',' << fmt(s.ratio_mean)
      << ',' << fmt(s.ratio_sd) << ',' << fmt(s.rec_err_mean) << ','
      << fmt(s.rec_err_sd) << ',' << kRngName << ',' << s.fingerprint << '\n';
  return out.str();
}

void write_batch_csv(BatchResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(result.config.out_dir);
  const std::string stem = result.config.stem();
  result.trials_csv_path =
      (fs::path(result.config.out_dir) / (stem + "_trials.csv")).string();
  result.summary_csv_path =
      (fs::path(result.config.out_dir) / (stem + "_summary.csv")).string();
  {
    std::ofstream out(result.trials_csv_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + result.trials_csv_path);
    out << trials_csv(result);
  }
  {
    std::ofstream out(result.summary_csv_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + result.summary_csv_path);
    out << summary_csv(result);
  }
}

}  // namespace sqratio
