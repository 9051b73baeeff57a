// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sqratio/fractional.hpp"

#include <cmath>
#include <limits>

namespace sqratio {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack absorbing round-off in the descent test; strict
// floating-point comparison can spuriously fail at near-critical points.
double descent_slack(double F) { return 1e-12 * (1.0 + std::abs(F)); }

Vector candidate_from(const FractionalObjective& obj, const IterateState& state,
                      const Vector& grad_h1, const Vector& grad_g,
                      double alpha) {
  Vector v = state.x -
             alpha * (grad_h1 - (state.c * state.c) * grad_g - state.z);
  return obj.prox_scaled_f_box(v, 2.0 * alpha * state.c);
}

struct LineSearchInternal {
  IterateState next_state;
  double alpha;
  int trials;
};

LineSearchInternal line_search_internal(const FractionalObjective& obj,
                                        const IterateState& state,
                                        const Vector& grad_h1,
                                        const Vector& grad_g,
                                        double alpha_init,
                                        const SolverConfig& config) {
  const double F_x = state.F_value;
  const double h2_x = obj.h2_value(state.x);
  double alpha = alpha_init;
  int trials = 0;
  while (alpha >= config.alpha_floor) {
    ++trials;
    Vector cand = candidate_from(obj, state, grad_h1, grad_g, alpha);
    const double g_cand = obj.g_value(cand);
    if (g_cand > 0.0) {
      const double f_cand = obj.f_value(cand);
      const double step_sq = (cand - state.x).squaredNorm();
      const double H = f_cand * f_cand / g_cand + obj.h1_value(cand) - h2_x -
                       (cand - state.x).dot(state.z);
      if (H + 0.5 * config.sigma * step_sq <= F_x + descent_slack(F_x)) {
        IterateState next;
        next.c = f_cand / g_cand;
        next.z = obj.h2_subgrad(cand);
        next.F_value =
            f_cand * f_cand / g_cand + obj.h1_value(cand) - obj.h2_value(cand);
        next.x = std::move(cand);
        next.iter_index = state.iter_index + 1;
        return {std::move(next), alpha, trials};
      }
    }
    alpha *= config.shrink_factor;
  }
  throw LineSearchFailure(
      "line search exhausted: stepsize fell below floor " +
      std::to_string(config.alpha_floor) + " after " + std::to_string(trials) +
      " trials at iteration " + std::to_string(state.iter_index));
}

}  // namespace

void SolverConfig::validate() const {
  if (!(alpha_min > 0.0) || !(alpha_max > alpha_min))
    throw std::invalid_argument("SolverConfig: need 0 < alpha_min < alpha_max");
  if (!(sigma > 0.0)) throw std::invalid_argument("SolverConfig: sigma must be positive");
  if (!(shrink_factor > 0.0) || !(shrink_factor < 1.0))
    throw std::invalid_argument("SolverConfig: shrink_factor must lie in (0,1)");
  if (!(rel_step_tol > 0.0))
    throw std::invalid_argument("SolverConfig: rel_step_tol must be positive");
  if (max_outer_iters <= 0)
    throw std::invalid_argument("SolverConfig: max_outer_iters must be positive");
  if (!(alpha_floor > 0.0) || !(alpha_floor < alpha_min))
    throw std::invalid_argument("SolverConfig: need 0 < alpha_floor < alpha_min");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::step_tolerance: return "step_tolerance";
    case Termination::max_iters: return "max_iters";
    case Termination::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

long SolveTrace::total_line_search_trials() const {
  long total = 0;
  for (const auto& rec : iterations) total += rec.line_search_trials;
  return total;
}

StepsizeRule constant_stepsize(double alpha) {
  return [alpha](const StepContext&) { return alpha; };
}

double evaluate_F(const FractionalObjective& obj, const Vector& x) {
  if (!obj.in_box(x)) return kInf;
  const double g = obj.g_value(x);
  if (g == 0.0) return kInf;
  const double f = obj.f_value(x);
  return f * f / g + obj.h1_value(x) - obj.h2_value(x);
}

double surrogate_H(const FractionalObjective& obj, const Vector& x_hat,
                   const Vector& x_prev, const Vector& z) {
  const double g = obj.g_value(x_hat);
  if (g == 0.0)
    throw std::invalid_argument("surrogate_H: g(x_hat) = 0, point outside domain");
  const double f = obj.f_value(x_hat);
  return f * f / g + obj.h1_value(x_hat) - obj.h2_value(x_prev) -
         (x_hat - x_prev).dot(z);
}

Vector prox_gradient_candidate(const FractionalObjective& obj,
                               const IterateState& state, double alpha) {
  return candidate_from(obj, state, obj.h1_grad(state.x), obj.g_grad(state.x),
                        alpha);
}

LineSearchResult line_search_step(const FractionalObjective& obj,
                                  const IterateState& state, double alpha_init,
                                  const SolverConfig& config) {
  auto res = line_search_internal(obj, state, obj.h1_grad(state.x),
                                  obj.g_grad(state.x), alpha_init, config);
  return {std::move(res.next_state), res.alpha, res.trials};
}

IterateState make_state(const FractionalObjective& obj, const Vector& x,
                        long iter_index) {
  const double g = obj.g_value(x);
  if (g == 0.0)
    throw std::invalid_argument("make_state: g(x) = 0, point outside domain");
  IterateState s;
  s.x = x;
  s.z = obj.h2_subgrad(x);
  s.c = obj.f_value(x) / g;
  s.F_value = evaluate_F(obj, x);
  s.iter_index = iter_index;
  return s;
}

SolveResult solve(const FractionalObjective& obj, const Vector& x0,
                  const SolverConfig& config,
                  const StepsizeRule& stepsize_rule) {
  config.validate();
  if (!obj.in_box(x0))
    throw InvalidInitialPoint("solve: x0 violates the box constraints");
  if (obj.g_value(x0) == 0.0)
    throw InvalidInitialPoint("solve: g(x0) = 0, x0 outside the domain");
  const double F0 = evaluate_F(obj, x0);
  if (!std::isfinite(F0))
    throw InvalidInitialPoint("solve: F(x0) is not finite");

  IterateState state = make_state(obj, x0, 0);
  SolveTrace trace;
  trace.initial_objective = F0;

  Vector grad = obj.h1_grad(state.x);
  Vector grad_g = obj.g_grad(state.x);
  Vector x_prev, grad_prev;
  bool have_prev = false;
  double alpha_last = 1.0;

  for (long k = 0; k < config.max_outer_iters; ++k) {
    StepContext ctx{k, state.x, grad, have_prev ? &x_prev : nullptr,
                    have_prev ? &grad_prev : nullptr};
    double alpha_init = stepsize_rule(ctx);
    alpha_init = std::min(config.alpha_max, std::max(config.alpha_min, alpha_init));

    LineSearchInternal ls;
    try {
      ls = line_search_internal(obj, state, grad, grad_g, alpha_init, config);
    } catch (const LineSearchFailure&) {
      trace.termination_reason = Termination::line_search_failure;
      trace.final_residual = (state.x - candidate_from(obj, state, grad, grad_g,
                                                       alpha_last))
                                 .norm();
      return {std::move(state.x), std::move(trace)};
    }

    const double step_norm = (ls.next_state.x - state.x).norm();
    trace.iterations.push_back(
        {ls.next_state.F_value, ls.alpha, step_norm, ls.trials});
    alpha_last = ls.alpha;

    x_prev = std::move(state.x);
    grad_prev = std::move(grad);
    have_prev = true;
    state = std::move(ls.next_state);
    grad = obj.h1_grad(state.x);
    grad_g = obj.g_grad(state.x);

    if (step_norm <= config.rel_step_tol * std::max(state.x.norm(), 1.0)) {
      trace.termination_reason = Termination::step_tolerance;
      break;
    }
  }

  trace.final_residual =
      (state.x - candidate_from(obj, state, grad, grad_g, alpha_last)).norm();
  return {std::move(state.x), std::move(trace)};
}

double criticality_residual(const FractionalObjective& obj, const Vector& x,
                            double alpha) {
  if (obj.g_value(x) == 0.0)
    throw std::invalid_argument("criticality_residual: g(x) = 0");
  if (!(alpha > 0.0))
    throw std::invalid_argument("criticality_residual: alpha must be positive");
  IterateState state = make_state(obj, x, 0);
  return (x - prox_gradient_candidate(obj, state, alpha)).norm();
}

bool check_nontrivial_init(const FractionalObjective& obj, const Vector& x0,
                           double lambda, double q_at_minus_b) {
  const double F0 = evaluate_F(obj, x0);
  return std::isfinite(F0) && F0 < lambda + q_at_minus_b;
}

}  // namespace sqratio
