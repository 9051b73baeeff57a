// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SQRATIO_FRACTIONAL_HPP_
#define SQRATIO_FRACTIONAL_HPP_

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Proximal solver for fractional composite programs of the form
//
//     minimize  f^2(x)/g(x) + h1(x) - h2(x)   over  x in C,  g(x) != 0,
//
// where f, g >= 0, h1 is smooth, h2 is convex, and C is a box. Steps are
// prox-gradient steps on the ratio-linearized model, accepted by a
// backtracking line search on a surrogate potential.

namespace sqratio {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Initial point outside the box, g(x0) = 0, or non-finite objective.
struct InvalidInitialPoint : SolverError {
  using SolverError::SolverError;
};
// Backtracking drove the stepsize below the configured floor. Usually a
// broken oracle (wrong gradient) or an objective violating the method's
// assumptions.
struct LineSearchFailure : SolverError {
  using SolverError::SolverError;
};

/// Oracle bundle defining one fractional program instance.
///
/// Invariants expected from the oracles: f_value and g_value are
/// nonnegative everywhere, h2_subgrad returns an element of the convex
/// subdifferential of h2, and prox_scaled_f_box(v, tau) returns the exact
/// minimizer of tau*f(u) + 0.5*||u - v||^2 over the box.
struct FractionalObjective {
  std::function<double(const Vector&)> f_value;
  std::function<double(const Vector&)> g_value;
  std::function<Vector(const Vector&)> g_grad;
  std::function<double(const Vector&)> h1_value;
  std::function<Vector(const Vector&)> h1_grad;
  std::function<double(const Vector&)> h2_value;
  std::function<Vector(const Vector&)> h2_subgrad;
  // (v, tau) -> argmin_u tau*f(u) + 0.5*||u-v||^2 + box indicator.
  std::function<Vector(const Vector&, double)> prox_scaled_f_box;
  // Membership test for the box C.
  std::function<bool(const Vector&)> in_box;
};

struct SolverConfig {
  double alpha_min = 1e-4;
  double alpha_max = 1e4;
  double sigma = 1e-3;          // sufficient-descent constant
  double shrink_factor = 0.5;   // stepsize backtracking factor, in (0,1)
  double rel_step_tol = 1e-6;   // relative step tolerance for termination
  long max_outer_iters = 50000;
  double alpha_floor = 1e-20;   // below this the line search is declared failed

  void validate() const;  // throws std::invalid_argument on a bad field
};

/// One outer-iteration state: the point, its ratio coefficient
/// c = f(x)/g(x), the h2 subgradient chosen at x, and F(x).
struct IterateState {
  Vector x;
  Vector z;
  double c = 0.0;
  double F_value = 0.0;
  long iter_index = 0;
};

enum class Termination { step_tolerance, max_iters, line_search_failure };
const char* to_string(Termination t);

struct IterationRecord {
  double F_value;           // objective after the accepted step
  double alpha;             // accepted stepsize
  double step_norm;         // ||x_{k+1} - x_k||_2
  int line_search_trials;   // candidates evaluated this iteration
};

struct SolveTrace {
  double initial_objective = 0.0;
  std::vector<IterationRecord> iterations;
  double final_residual = 0.0;  // prox-map fixed-point residual at the output
  Termination termination_reason = Termination::max_iters;

  long total_line_search_trials() const;
};

/// Context handed to the initial-stepsize rule at the top of each outer
/// iteration. grad_h1 is the gradient of the smooth part at x; the _prev
/// pointers are null on the first iteration.
struct StepContext {
  long iter;
  const Vector& x;
  const Vector& grad_h1;
  const Vector* x_prev;
  const Vector* grad_h1_prev;
};
using StepsizeRule = std::function<double(const StepContext&)>;

StepsizeRule constant_stepsize(double alpha);

/// Extended objective: f^2/g + h1 - h2 on the box intersected with
/// {g != 0}, +infinity outside.
double evaluate_F(const FractionalObjective& obj, const Vector& x);

/// Line-search potential evaluated without the conjugate of h2, using the
/// subgradient identity at x_prev:
///   f^2(x_hat)/g(x_hat) + h1(x_hat) - h2(x_prev) - <x_hat - x_prev, z>.
/// Majorizes F(x_hat) whenever z is a subgradient of h2 at x_prev.
/// Throws std::invalid_argument when g(x_hat) = 0.
double surrogate_H(const FractionalObjective& obj, const Vector& x_hat,
                   const Vector& x_prev, const Vector& z);

/// Candidate step: prox of 2*alpha*c*f + box at
/// x - alpha*(grad h1(x) - c^2 grad g(x) - z).
Vector prox_gradient_candidate(const FractionalObjective& obj,
                               const IterateState& state, double alpha);

struct LineSearchResult {
  IterateState next_state;
  double alpha;
  int trials;
};

/// Backtracks alpha from alpha_init by config.shrink_factor until the
/// candidate has g > 0 and passes the sufficient-descent test
///   H(candidate) + sigma/2 ||candidate - x||^2 <= F(x)
/// (with a small relative slack for round-off). Throws LineSearchFailure
/// once alpha falls below config.alpha_floor.
LineSearchResult line_search_step(const FractionalObjective& obj,
                                  const IterateState& state,
                                  double alpha_init,
                                  const SolverConfig& config);

struct SolveResult {
  Vector x;
  SolveTrace trace;
};

/// Runs outer iterations until the relative step tolerance
///   ||x_{k+1} - x_k|| <= rel_step_tol * max(||x_{k+1}||, 1)
/// is met or max_outer_iters is reached. A line-search failure terminates
/// the run and is recorded in the trace rather than rethrown.
/// Throws InvalidInitialPoint when x0 is infeasible.
SolveResult solve(const FractionalObjective& obj, const Vector& x0,
                  const SolverConfig& config, const StepsizeRule& stepsize_rule);

/// ||x - prox_gradient_candidate(x, alpha)||_2 with c and z recomputed at
/// x; zero exactly at fixed points of the prox-gradient map.
/// Throws std::invalid_argument when g(x) = 0.
double criticality_residual(const FractionalObjective& obj, const Vector& x,
                            double alpha);

/// Level-set initialization test: F(x0) < lambda + q(-b), the strict
/// inequality that rules out the all-zeros solution. q_at_minus_b is the
/// loss value at the zero signal.
bool check_nontrivial_init(const FractionalObjective& obj, const Vector& x0,
                           double lambda, double q_at_minus_b);

/// Builds a full IterateState (c, z, F) at x.
IterateState make_state(const FractionalObjective& obj, const Vector& x,
                        long iter_index = 0);

}  // namespace sqratio

#endif  // SQRATIO_FRACTIONAL_HPP_
