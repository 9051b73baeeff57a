// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the sqratio C API.
//
// Exit codes: 0 success, 2 usage error, 3 invalid input or initial point,
// 4 solver or verification failure.

#include "sqratio/sqratio.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInvalidInput = 3;
constexpr int kExitSolverFailure = 4;

int exit_code_for(int status) {
  switch (status) {
    case SQR_OK:
      return kExitOk;
    case SQR_ERR_LINE_SEARCH:
      return kExitSolverFailure;
    case SQR_ERR_INTERNAL:
      return kExitSolverFailure;
    default:
      return kExitInvalidInput;
  }
}

void report_error(const char* where, int status) {
  std::cerr << "sqratio: " << where << ": " << sqr_strerror(status);
  const char* detail = sqr_last_error();
  if (detail != nullptr && detail[0] != '\0') std::cerr << " (" << detail << ")";
  std::cerr << "\n";
}

struct InstanceDeleter {
  void operator()(sqr_instance* p) const { sqr_instance_free(p); }
};
struct ResultDeleter {
  void operator()(sqr_result* p) const { sqr_result_free(p); }
};
struct BatchDeleter {
  void operator()(sqr_batch* p) const { sqr_batch_free(p); }
};

using InstancePtr = std::unique_ptr<sqr_instance, InstanceDeleter>;
using ResultPtr = std::unique_ptr<sqr_result, ResultDeleter>;
using BatchPtr = std::unique_ptr<sqr_batch, BatchDeleter>;

struct FamilyArgs {
  std::string family = "robust";
  int scale_i = 2;
  std::int64_t K = 8;
  double F = 5.0;
  double D = 2.0;
};

void add_family_options(CLI::App* cmd, FamilyArgs* args) {
  cmd->add_option("--family", args->family, "robust | cauchy | gaussian_dct")
      ->check(CLI::IsMember({"robust", "cauchy", "gaussian_dct"}));
  cmd->add_option("--i", args->scale_i, "scale for robust/cauchy families");
  cmd->add_option("--K", args->K, "sparsity for the gaussian_dct family");
  cmd->add_option("--F", args->F, "coherence for the gaussian_dct family");
  cmd->add_option("--D", args->D, "dynamic range for the gaussian_dct family");
}

int generate(const FamilyArgs& args, std::uint64_t seed, sqr_instance** out) {
  if (args.family == "robust") return sqr_gen_robust(args.scale_i, seed, out);
  if (args.family == "cauchy") return sqr_gen_cauchy(args.scale_i, seed, out);
  return sqr_gen_gaussian_dct(args.K, args.F, args.D, seed, out);
}

std::string instance_stem(const FamilyArgs& args, std::uint64_t seed) {
  std::ostringstream out;
  out << args.family;
  if (args.family == "gaussian_dct")
    out << "_K" << args.K << "_F" << args.F << "_D" << args.D;
  else
    out << "_i" << args.scale_i;
  out << "_seed" << seed;
  return out.str();
}

struct SolverFlags {
  double tol = 1e-6;
  double sigma = 1e-3;
  double alpha_min = 1e-4;
  double alpha_max = 1e4;
  double shrink = 0.5;
  std::int64_t max_iters = 50000;
  std::string init = "pseudoinverse";
};

void add_solver_options(CLI::App* cmd, SolverFlags* flags) {
  cmd->add_option("--tol", flags->tol, "relative step termination tolerance");
  cmd->add_option("--sigma", flags->sigma, "sufficient-descent constant");
  cmd->add_option("--alpha-min", flags->alpha_min, "lower trial stepsize bound");
  cmd->add_option("--alpha-max", flags->alpha_max, "upper trial stepsize bound");
  cmd->add_option("--shrink", flags->shrink, "backtracking shrink factor");
  cmd->add_option("--max-iters", flags->max_iters, "outer iteration cap");
  cmd->add_option("--init", flags->init,
                  "initialization: pseudoinverse | ridge | ridge:<mu>");
}

sqr_options to_options(const SolverFlags& flags) {
  sqr_options opts;
  sqr_options_init(&opts);
  opts.step_tol = flags.tol;
  opts.sigma = flags.sigma;
  opts.alpha_min = flags.alpha_min;
  opts.alpha_max = flags.alpha_max;
  opts.shrink = flags.shrink;
  opts.max_iters = flags.max_iters;
  return opts;
}

int run_gen(const FamilyArgs& family, std::uint64_t seed,
            const std::string& out_dir) {
  sqr_instance* raw = nullptr;
  int status = generate(family, seed, &raw);
  if (status != SQR_OK) {
    report_error("gen", status);
    return exit_code_for(status);
  }
  InstancePtr inst(raw);
  const std::string path = out_dir + "/" + instance_stem(family, seed) + ".sqi";
  status = sqr_instance_save(inst.get(), path.c_str());
  if (status != SQR_OK) {
    report_error("gen: save", status);
    return exit_code_for(status);
  }
  std::cout << "file=" << path << "\n"
            << "family=" << sqr_instance_family(inst.get()) << "\n"
            << "rows=" << sqr_instance_rows(inst.get()) << "\n"
            << "cols=" << sqr_instance_cols(inst.get()) << "\n"
            << "sparsity=" << sqr_instance_sparsity(inst.get()) << "\n"
            << "lambda=" << sqr_instance_lambda(inst.get()) << "\n"
            << "seed=" << sqr_instance_seed(inst.get()) << "\n";
  return kExitOk;
}

int run_solve(const std::string& instance_path, const SolverFlags& flags,
              double lambda, double gamma, std::int64_t outliers,
              bool have_lambda, bool have_gamma, bool have_outliers,
              bool trace, const std::string& out_dir) {
  sqr_instance* raw = nullptr;
  int status = sqr_instance_load(instance_path.c_str(), &raw);
  if (status != SQR_OK) {
    report_error("solve: load", status);
    return exit_code_for(status);
  }
  InstancePtr inst(raw);
  if (have_lambda &&
      (status = sqr_instance_set_lambda(inst.get(), lambda)) != SQR_OK) {
    report_error("solve: --lambda", status);
    return exit_code_for(status);
  }
  if (have_gamma &&
      (status = sqr_instance_set_gamma(inst.get(), gamma)) != SQR_OK) {
    report_error("solve: --gamma", status);
    return exit_code_for(status);
  }
  if (have_outliers &&
      (status = sqr_instance_set_outliers(inst.get(), outliers)) != SQR_OK) {
    report_error("solve: --outliers", status);
    return exit_code_for(status);
  }

  const sqr_options opts = to_options(flags);
  sqr_result* raw_res = nullptr;
  status = sqr_solve(inst.get(), &opts, flags.init.c_str(), nullptr, 0, &raw_res);
  if (status != SQR_OK) {
    report_error("solve", status);
    return exit_code_for(status);
  }
  ResultPtr res(raw_res);

  char line[160];
  std::snprintf(line, sizeof line, "obj=%.12g", sqr_result_objective(res.get()));
  std::cout << line << "\n";
  std::snprintf(line, sizeof line, "sparsity=%.12g", sqr_result_sparsity(res.get()));
  std::cout << line << "\n";
  std::snprintf(line, sizeof line, "rec_err=%.12g", sqr_result_rec_err(res.get()));
  std::cout << line << "\n";
  std::snprintf(line, sizeof line, "residual=%.6e", sqr_result_residual(res.get()));
  std::cout << line << "\n";
  std::cout << "iters=" << sqr_result_iterations(res.get()) << "\n"
            << "ls_trials=" << sqr_result_ls_trials(res.get()) << "\n"
            << "termination=" << sqr_result_termination(res.get()) << "\n";
  std::snprintf(line, sizeof line, "time_s=%.6f", sqr_result_seconds(res.get()));
  std::cout << line << "\n";

  if (trace) {
    const std::int64_t len = sqr_result_trace_len(res.get());
    std::vector<double> objs(static_cast<size_t>(len)),
        alphas(static_cast<size_t>(len)), steps(static_cast<size_t>(len));
    if (sqr_result_trace(res.get(), objs.data(), alphas.data(), steps.data(),
                         len) == SQR_OK) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "trace 0 %.12g initial",
                    sqr_result_initial_objective(res.get()));
      std::cout << buf << "\n";
      for (std::int64_t k = 0; k < len; ++k) {
        std::snprintf(buf, sizeof buf, "trace %lld %.12g %.6g %.6g",
                      static_cast<long long>(k + 1),
                      objs[static_cast<size_t>(k)],
                      alphas[static_cast<size_t>(k)],
                      steps[static_cast<size_t>(k)]);
        std::cout << buf << "\n";
      }
    }
  }

  if (!out_dir.empty()) {
    const std::int64_t n = sqr_instance_cols(inst.get());
    std::vector<double> x(static_cast<size_t>(n));
    if (sqr_result_solution(res.get(), x.data(), n) == SQR_OK) {
      const std::string path = out_dir + "/solution.txt";
      std::ofstream out(path);
      char buf[64];
      for (const double v : x) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
      }
      if (!out) {
        std::cerr << "sqratio: solve: cannot write " << path << "\n";
        return kExitInvalidInput;
      }
      std::cout << "solution_file=" << path << "\n";
    }
  }

  if (std::string(sqr_result_termination(res.get())) == "line_search_failure")
    return kExitSolverFailure;
  return kExitOk;
}

int run_bench(const std::string& config_path,
              const std::vector<std::string>& sets,
              const std::vector<std::pair<std::string, std::string>>& flags,
              const std::string& out_dir, int jobs) {
  sqr_batch* raw = nullptr;
  int status = SQR_OK;
  if (!config_path.empty()) {
    status = sqr_batch_load(config_path.c_str(), &raw);
  } else {
    status = sqr_batch_create(&raw);
  }
  if (status != SQR_OK) {
    report_error("bench: config", status);
    return exit_code_for(status);
  }
  BatchPtr batch(raw);

  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "sqratio: bench: --set expects key=value, got '" << kv << "'\n";
      return kExitUsage;
    }
    status = sqr_batch_set(batch.get(), kv.substr(0, eq).c_str(),
                           kv.substr(eq + 1).c_str());
    if (status != SQR_OK) {
      report_error("bench: --set", status);
      return exit_code_for(status);
    }
  }
  for (const auto& [key, value] : flags) {
    status = sqr_batch_set(batch.get(), key.c_str(), value.c_str());
    if (status != SQR_OK) {
      report_error(("bench: --" + key).c_str(), status);
      return exit_code_for(status);
    }
  }

  status = sqr_batch_run(batch.get(), out_dir.empty() ? nullptr : out_dir.c_str(),
                         jobs);
  if (status != SQR_OK) {
    report_error("bench: run", status);
    return exit_code_for(status);
  }

  char line[160];
  std::cout << "trials=" << sqr_batch_trials(batch.get()) << "\n"
            << "failed=" << sqr_batch_failed(batch.get()) << "\n";
  std::snprintf(line, sizeof line, "time_mean=%.6f", sqr_batch_mean_time(batch.get()));
  std::cout << line << "\n";
  std::snprintf(line, sizeof line, "obj_mean=%.12g", sqr_batch_mean_obj(batch.get()));
  std::cout << line << "\n";
  std::snprintf(line, sizeof line, "ratio_mean=%.12g", sqr_batch_mean_ratio(batch.get()));
  std::cout << line << "\n";
  std::snprintf(line, sizeof line, "rec_err_mean=%.12g",
                sqr_batch_mean_rec_err(batch.get()));
  std::cout << line << "\n";
  std::cout << "trials_csv=" << sqr_batch_trials_csv_path(batch.get()) << "\n"
            << "summary_csv=" << sqr_batch_summary_csv_path(batch.get()) << "\n";
  return kExitOk;
}

int run_verify() {
  char* report = nullptr;
  const int failed = sqr_self_check(&report);
  if (report != nullptr) {
    std::cout << report;
    sqr_string_free(report);
  }
  if (failed < 0) {
    report_error("verify", -failed);
    return kExitSolverFailure;
  }
  if (failed > 0) {
    std::cerr << "sqratio: verify: " << failed << " check(s) failed\n";
    return kExitSolverFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squared L1/L2 sparse recovery: solver and benchmark harness"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  FamilyArgs gen_family;
  std::uint64_t gen_seed = 0;
  std::string gen_out_dir = ".";
  add_family_options(gen, &gen_family);
  gen->add_option("--seed", gen_seed, "instance seed");
  gen->add_option("--out-dir", gen_out_dir, "output directory");

  // solve --------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "solve one instance file");
  std::string solve_path;
  SolverFlags solve_flags;
  double solve_lambda = 0.0, solve_gamma = 0.0;
  std::int64_t solve_outliers = 0;
  bool solve_trace = false;
  std::string solve_out_dir;
  solve->add_option("instance", solve_path, "instance file (.sqi)")->required();
  add_solver_options(solve, &solve_flags);
  auto* lambda_opt =
      solve->add_option("--lambda", solve_lambda, "override regularization weight");
  auto* gamma_opt =
      solve->add_option("--gamma", solve_gamma, "override Lorentzian scale");
  auto* outliers_opt =
      solve->add_option("--outliers", solve_outliers, "override outlier budget");
  solve->add_flag("--trace", solve_trace, "emit per-iteration objective lines");
  solve->add_option("--out-dir", solve_out_dir,
                    "write solution.txt into this directory");

  // bench --------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "run a seeded trial batch");
  FamilyArgs bench_family;
  SolverFlags bench_flags;
  std::string bench_config;
  std::vector<std::string> bench_sets;
  int bench_trials = 20;
  std::uint64_t bench_seed = 0;
  int bench_jobs = 1;
  std::string bench_out_dir = ".";
  double bench_lambda = 0.0, bench_gamma = 0.0;
  std::int64_t bench_outliers = 0;
  bench->add_option("--config", bench_config,
                    "key=value config file (default: $SQRATIO_CONFIG)");
  bench->add_option("--set", bench_sets, "config override key=value (repeatable)");
  add_family_options(bench, &bench_family);
  add_solver_options(bench, &bench_flags);
  bench->add_option("--trials", bench_trials, "number of trials");
  bench->add_option("--seed", bench_seed, "root seed; trial t uses seed+t");
  bench->add_option("--jobs", bench_jobs, "parallel trial workers");
  bench->add_option("--out-dir", bench_out_dir, "CSV output directory");
  auto* bl = bench->add_option("--lambda", bench_lambda, "override lambda");
  auto* bg = bench->add_option("--gamma", bench_gamma, "override gamma");
  auto* bo = bench->add_option("--outliers", bench_outliers, "override outlier budget");

  // verify -------------------------------------------------------------
  app.add_subcommand("verify", "run the built-in property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (gen->parsed()) return run_gen(gen_family, gen_seed, gen_out_dir);

  if (solve->parsed())
    return run_solve(solve_path, solve_flags, solve_lambda, solve_gamma,
                     solve_outliers, lambda_opt->count() > 0,
                     gamma_opt->count() > 0, outliers_opt->count() > 0,
                     solve_trace, solve_out_dir);

  if (bench->parsed()) {
    std::string config_path = bench_config;
    if (config_path.empty()) {
      const char* env = std::getenv("SQRATIO_CONFIG");
      if (env != nullptr) config_path = env;
    }
    // Named flags win over --set pairs, which win over the file config.
    std::vector<std::pair<std::string, std::string>> flag_sets;
    auto add_if = [&](const CLI::Option* opt, const std::string& key,
                      const std::string& value) {
      if (opt != nullptr && opt->count() > 0) flag_sets.emplace_back(key, value);
    };
    auto num = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    add_if(bench->get_option("--family"), "family", bench_family.family);
    add_if(bench->get_option("--i"), "i", std::to_string(bench_family.scale_i));
    add_if(bench->get_option("--K"), "K", std::to_string(bench_family.K));
    add_if(bench->get_option("--F"), "F", num(bench_family.F));
    add_if(bench->get_option("--D"), "D", num(bench_family.D));
    add_if(bench->get_option("--trials"), "trials", std::to_string(bench_trials));
    add_if(bench->get_option("--seed"), "seed", std::to_string(bench_seed));
    add_if(bench->get_option("--tol"), "tol", num(bench_flags.tol));
    add_if(bench->get_option("--sigma"), "sigma", num(bench_flags.sigma));
    add_if(bench->get_option("--alpha-min"), "alpha_min", num(bench_flags.alpha_min));
    add_if(bench->get_option("--alpha-max"), "alpha_max", num(bench_flags.alpha_max));
    add_if(bench->get_option("--shrink"), "shrink", num(bench_flags.shrink));
    add_if(bench->get_option("--max-iters"), "max_iters",
           std::to_string(bench_flags.max_iters));
    add_if(bench->get_option("--init"), "init", bench_flags.init);
    add_if(bl, "lambda", num(bench_lambda));
    add_if(bg, "gamma", num(bench_gamma));
    add_if(bo, "outliers", std::to_string(bench_outliers));

    const bool have_out_dir = bench->get_option("--out-dir")->count() > 0;
    const bool have_jobs = bench->get_option("--jobs")->count() > 0;
    return run_bench(config_path, bench_sets, flag_sets,
                     have_out_dir || config_path.empty() ? bench_out_dir : "",
                     have_jobs ? bench_jobs : 0);
  }

  return run_verify();
}
