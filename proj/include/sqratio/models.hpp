// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SQRATIO_MODELS_HPP_
#define SQRATIO_MODELS_HPP_

#include "sqratio/fractional.hpp"

#include <memory>
#include <utility>

// Squared L1/L2 regularized recovery models
//
//     minimize  lambda * ||x||_1^2 / ||x||_2^2 + q(A x - b)   over a box,
//
// with three losses q = q1 - q2: quadratic (Gaussian noise), Lorentzian
// (Cauchy noise), and the squared distance to the set of r-sparse vectors
// (sparse outliers). build_objective maps a model onto the generic
// fractional solver's oracle bundle.

namespace sqratio {

/// Closed hyperrectangle; entries of lower/upper may be -inf/+inf. The
/// origin must lie inside (standing assumption of the model).
struct BoxBounds {
  Vector lower;
  Vector upper;

  static BoxBounds unbounded(Eigen::Index n);

  Eigen::Index size() const { return lower.size(); }
  bool contains(const Vector& x) const;
  /// Canonical clamp max{min{x, upper}, lower}; exact pass-through for
  /// infinite bounds.
  Vector clamp(const Vector& x) const;
  void validate() const;
};

enum class LossKind { quadratic, lorentzian, robust_distance };
const char* to_string(LossKind k);

/// Loss q = q1 - q2 on the measurement residual. q1 is smooth; q2 is
/// convex (identically zero except for the robust kind).
class LossModel {
 public:
  LossModel() = default;
  static LossModel quadratic();
  static LossModel lorentzian(double gamma);
  static LossModel robust_distance(Eigen::Index outlier_count);

  LossKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  Eigen::Index outlier_count() const { return outlier_count_; }

  double q1_value(const Vector& y) const;
  Vector q1_grad(const Vector& y) const;
  double q2_value(const Vector& y) const;
  Vector q2_subgrad(const Vector& y) const;
  double q_value(const Vector& y) const { return q1_value(y) - q2_value(y); }

 private:
  LossKind kind_ = LossKind::quadratic;
  double gamma_ = 0.0;
  Eigen::Index outlier_count_ = 0;
};

/// One solvable recovery instance.
struct SquaredRatioModel {
  Matrix A;
  Vector b;
  double lambda = 1.0;
  BoxBounds box;
  LossModel loss;

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }
  void validate() const;  // throws std::invalid_argument
};

/// sqrt(lambda) * ||x||_1 / ||x||_2^2, the ratio coefficient linearizing
/// the fractional term. Rejects x = 0.
double ratio_coefficient(const Vector& x, double lambda);

/// Exact minimizer of tau*||u||_1 + 0.5*||u - v||^2 over the box:
/// entrywise soft-threshold by tau, then clamp.
Vector prox_l1_box(const Vector& v, double tau, const BoxBounds& box);

/// (0.5*||y||^2, y)
std::pair<double, Vector> quadratic_loss(const Vector& y);

/// (sum_i log(1 + y_i^2/gamma^2), gradient 2 y_i/(gamma^2 + y_i^2)).
/// Rejects gamma <= 0.
std::pair<double, Vector> lorentzian_loss(const Vector& y, double gamma);

/// Nearest vector with at most outlier_count nonzeros: keeps the largest
/// magnitudes, zeroing the rest. Magnitude ties keep the smaller index.
Vector project_sparse(const Vector& y, Eigen::Index outlier_count);

struct RobustParts {
  double q1;
  Vector q1_grad;
  double q2;
  Vector q2_subgrad;
};

/// Decomposition 0.5*dist^2(y, S_r) = 0.5*||y||^2 - 0.5*||T_r(y)||^2 with
/// q1 = 0.5*||y||^2 and q2 = 0.5*||T_r(y)||^2; T_r(y) is a subgradient of
/// q2 at y.
RobustParts robust_distance_loss(const Vector& y, Eigen::Index outlier_count);

/// Oracle bundle for the generic solver: f = sqrt(lambda)*||.||_1,
/// g = ||.||_2^2, h1 = q1(Ax-b), h2 = q2(Ax-b). The bundle owns a copy of
/// the model and caches the residual A x - b across oracle calls at the
/// same point; oracles are reentrant.
FractionalObjective build_objective(const SquaredRatioModel& model);
FractionalObjective build_objective(std::shared_ptr<const SquaredRatioModel> model);

/// ||x||_1^2 / ||x||_2^2: a continuous lower bound on the nonzero count,
/// equal to it exactly when all nonzeros share one magnitude. Rejects 0.
double effective_sparsity(const Vector& x);

}  // namespace sqratio

#endif  // SQRATIO_MODELS_HPP_
