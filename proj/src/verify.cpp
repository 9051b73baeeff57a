// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sqratio/verify.hpp"

#include "sqratio/harness.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sqratio {

namespace {

// Brute-force scalar minimizer of tau*|u| + 0.5*(u - v)^2 over [lo, hi]:
// iterated grid refinement, independent of the closed-form prox.
double brute_force_scalar_prox(double v, double tau, double lo, double hi) {
  double a = std::max(lo, std::min(v, hi) - 2.0 * (1.0 + tau + std::abs(v)));
  double b = std::min(hi, std::max(v, lo) + 2.0 * (1.0 + tau + std::abs(v)));
  auto value = [&](double u) { return tau * std::abs(u) + 0.5 * (u - v) * (u - v); };
  double best = a;
  for (int pass = 0; pass < 6; ++pass) {
    const int grid = 400;
    double best_val = std::numeric_limits<double>::infinity();
    double local_best = a;
    for (int k = 0; k <= grid; ++k) {
      const double u = a + (b - a) * k / grid;
      const double val = value(u);
      if (val < best_val) {
        best_val = val;
        local_best = u;
      }
    }
    // zero is a kink; always consider it when inside the window
    if (a <= 0.0 && 0.0 <= b && value(0.0) <= best_val) local_best = 0.0;
    best = local_best;
    const double width = (b - a) / grid;
    a = std::max(lo, best - 2.0 * width);
    b = std::min(hi, best + 2.0 * width);
  }
  return best;
}

double central_diff_rel_err(const FractionalObjective& obj, const Vector& x) {
  const double h = 1e-6;
  Vector num(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    num[j] = (obj.h1_value(xp) - obj.h1_value(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  const Vector ana = obj.h1_grad(x);
  return (num - ana).norm() / std::max(1.0, ana.norm());
}

SquaredRatioModel small_model(LossKind kind, std::uint64_t seed) {
  const Eigen::Index m = 20, n = 50, K = 5;
  SquaredRatioModel model;
  model.A = gen_gaussian_sensing(m, n, derive_stream_seed(seed, kStreamMatrix));
  const Vector x_true =
      gen_sparse_signal(n, K, derive_stream_seed(seed, kStreamSignal));
  RandomStream noise(derive_stream_seed(seed, kStreamNoise));
  Vector eps(m);
  for (Eigen::Index i = 0; i < m; ++i) eps[i] = noise.gaussian();
  model.b = model.A * x_true + 0.01 * eps;
  model.box = BoxBounds::unbounded(n);
  switch (kind) {
    case LossKind::quadratic:
      model.loss = LossModel::quadratic();
      model.lambda = 0.4;
      break;
    case LossKind::lorentzian:
      model.loss = LossModel::lorentzian(0.02);
      model.lambda = 0.5;
      break;
    case LossKind::robust_distance:
      model.loss = LossModel::robust_distance(4);
      model.lambda = 0.01;
      break;
  }
  return model;
}

CheckResult check_prox_oracle() {
  RandomStream rng(20260811);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(rng.uniform_index(5));
    Vector v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) v[j] = 4.0 * (rng.uniform() - 0.5);
    const double tau = 2.0 * rng.uniform();
    BoxBounds box = BoxBounds::unbounded(dim);
    if (trial % 3 == 1) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        box.lower[j] = -3.0 * rng.uniform();
        box.upper[j] = 3.0 * rng.uniform();
      }
    }
    const Vector got = prox_l1_box(v, tau, box);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double want =
          brute_force_scalar_prox(v[j], tau, box.lower[j], box.upper[j]);
      worst = std::max(worst, std::abs(got[j] - want));
    }
  }
  return {"prox_l1_box vs brute force", worst < 1e-6,
          "max coordinate error " + std::to_string(worst)};
}

CheckResult check_gradients() {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    for (const LossKind kind :
         {LossKind::quadratic, LossKind::lorentzian, LossKind::robust_distance}) {
      const std::uint64_t seed = 100 + static_cast<std::uint64_t>(trial);
      SquaredRatioModel model;
      model.A = gen_gaussian_sensing(8, 20, derive_stream_seed(seed, kStreamMatrix));
      RandomStream rng(derive_stream_seed(seed, kStreamNoise));
      model.b = Vector(8);
      for (int i = 0; i < 8; ++i) model.b[i] = rng.gaussian();
      model.box = BoxBounds::unbounded(20);
      model.lambda = 1.0;
      model.loss = kind == LossKind::quadratic ? LossModel::quadratic()
                   : kind == LossKind::lorentzian
                       ? LossModel::lorentzian(0.02)
                       : LossModel::robust_distance(2);
      Vector x(20);
      for (int j = 0; j < 20; ++j) x[j] = rng.gaussian();
      worst = std::max(worst, central_diff_rel_err(build_objective(model), x));
    }
  }
  return {"loss gradients vs central differences", worst < 1e-5,
          "max relative error " + std::to_string(worst)};
}

CheckResult check_descent_and_termination() {
  std::ostringstream detail;
  bool pass = true;
  for (const LossKind kind :
       {LossKind::quadratic, LossKind::lorentzian, LossKind::robust_distance}) {
    const SquaredRatioModel model = small_model(kind, 7);
    auto obj = build_objective(model);
    SolverConfig config;
    config.rel_step_tol = 1e-8;
    const Vector x0 = initial_point(model, InitStrategy::pseudoinverse());
    const SolveResult res = solve(obj, x0, config, bb_rule(config));
    double prev = res.trace.initial_objective;
    bool monotone = true;
    for (const auto& rec : res.trace.iterations) {
      if (rec.F_value + 0.5 * config.sigma * rec.step_norm * rec.step_norm >
          prev + 1e-10 * (1.0 + std::abs(prev)))
        monotone = false;
      prev = rec.F_value;
    }
    const bool converged =
        res.trace.termination_reason == Termination::step_tolerance;
    if (!monotone || !converged) {
      pass = false;
      detail << to_string(kind) << ": monotone=" << monotone
             << " converged=" << converged << "; ";
    }
  }
  if (pass) detail << "all three losses descend and reach the step tolerance";
  return {"solver descent and termination", pass, detail.str()};
}

CheckResult check_criticality() {
  double worst = 0.0;
  for (const LossKind kind :
       {LossKind::quadratic, LossKind::lorentzian, LossKind::robust_distance}) {
    const SquaredRatioModel model = small_model(kind, 11);
    auto obj = build_objective(model);
    SolverConfig config;
    config.rel_step_tol = 1e-9;
    const Vector x0 = initial_point(model, InitStrategy::pseudoinverse());
    const SolveResult res = solve(obj, x0, config, bb_rule(config));
    const double scaled =
        res.trace.final_residual / (1.0 + res.x.norm());
    worst = std::max(worst, scaled);
  }
  return {"criticality residual at the output", worst < 1e-4,
          "max scaled residual " + std::to_string(worst)};
}

CheckResult check_subgradient() {
  RandomStream rng(33);
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index m = 6;
    Vector y(m), w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      y[i] = 3.0 * rng.gaussian();
      w[i] = 3.0 * rng.gaussian();
    }
    const auto parts = robust_distance_loss(y, 2);
    const double lhs = 0.5 * project_sparse(w, 2).squaredNorm();
    const double rhs = parts.q2 + parts.q2_subgrad.dot(w - y);
    worst = std::max(worst, rhs - lhs);
  }
  return {"robust q2 subgradient inequality", worst <= 1e-10,
          "max violation " + std::to_string(worst)};
}

CheckResult check_surrogate_majorization() {
  const SquaredRatioModel model = small_model(LossKind::robust_distance, 21);
  auto obj = build_objective(model);
  RandomStream rng(55);
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 200; ++trial) {
    Vector x(model.cols()), x_hat(model.cols());
    for (Eigen::Index j = 0; j < model.cols(); ++j) {
      x[j] = rng.gaussian();
      x_hat[j] = rng.gaussian();
    }
    const double H = surrogate_H(obj, x_hat, x, obj.h2_subgrad(x));
    const double F = evaluate_F(obj, x_hat);
    worst = std::max(worst, (F - H) / (1.0 + std::abs(F)));
  }
  return {"surrogate majorizes the objective", worst <= 1e-12,
          "max scaled gap " + std::to_string(worst)};
}

CheckResult check_bb_clamp() {
  SolverConfig config;
  Vector x1(2), x0(2), g1(2), g0(2);
  x1 << 1.0, 0.0;
  x0 << 0.0, 0.0;
  g1 << 1e-12, 0.0;
  g0 << 0.0, 0.0;
  const double huge = bb_initial_stepsize(x1, x0, g1, g0, config);
  g1 << 1e12, 0.0;
  const double tiny = bb_initial_stepsize(x1, x0, g1, g0, config);
  const double unit = bb_initial_stepsize(x0, x0, g1, g0, config);
  const bool pass = huge == config.alpha_max && tiny == config.alpha_min && unit == 1.0;
  return {"BB stepsize clamping and fallback", pass,
          pass ? "clamped to bounds, unit fallback" : "unexpected values"};
}

CheckResult check_generator_determinism() {
  const Matrix A1 = gen_gaussian_sensing(30, 40, 99);
  const Matrix A2 = gen_gaussian_sensing(30, 40, 99);
  bool pass = A1 == A2;
  double norm_err = 0.0;
  for (Eigen::Index j = 0; j < A1.cols(); ++j)
    norm_err = std::max(norm_err, std::abs(A1.col(j).norm() - 1.0));
  pass = pass && norm_err < 1e-12;
  const Vector s1 = gen_sparse_signal(100, 10, 5);
  const Vector s2 = gen_sparse_signal(100, 10, 5);
  pass = pass && s1 == s2 && (s1.array() != 0.0).count() == 10;
  return {"generator determinism and normalization", pass,
          "column norm error " + std::to_string(norm_err)};
}

}  // namespace

std::vector<CheckResult> run_self_checks() {
  return {
      check_prox_oracle(),
      check_gradients(),
      check_subgradient(),
      check_surrogate_majorization(),
      check_descent_and_termination(),
      check_criticality(),
      check_bb_clamp(),
      check_generator_determinism(),
  };
}

std::string format_verdict_table(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  for (const auto& r : results)
    out << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail
        << ")\n";
  return out.str();
}

}  // namespace sqratio
