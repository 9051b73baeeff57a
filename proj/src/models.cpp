// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sqratio/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <numeric>
#include <vector>

namespace sqratio {

BoxBounds BoxBounds::unbounded(Eigen::Index n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoxBounds box;
  box.lower = Vector::Constant(n, -inf);
  box.upper = Vector::Constant(n, inf);
  return box;
}

bool BoxBounds::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  return (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

Vector BoxBounds::clamp(const Vector& x) const {
  return x.cwiseMin(upper).cwiseMax(lower);
}

void BoxBounds::validate() const {
  if (lower.size() != upper.size())
    throw std::invalid_argument("BoxBounds: lower/upper size mismatch");
  if (!((lower.array() <= upper.array()).all()))
    throw std::invalid_argument("BoxBounds: lower > upper in some coordinate");
  if (!((lower.array() <= 0.0).all() && (upper.array() >= 0.0).all()))
    throw std::invalid_argument("BoxBounds: the origin must lie inside the box");
}

const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::quadratic: return "quadratic";
    case LossKind::lorentzian: return "lorentzian";
    case LossKind::robust_distance: return "robust_distance";
  }
  return "unknown";
}

LossModel LossModel::quadratic() {
  LossModel m;
  m.kind_ = LossKind::quadratic;
  return m;
}

LossModel LossModel::lorentzian(double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("LossModel::lorentzian: gamma must be positive");
  LossModel m;
  m.kind_ = LossKind::lorentzian;
  m.gamma_ = gamma;
  return m;
}

LossModel LossModel::robust_distance(Eigen::Index outlier_count) {
  if (outlier_count < 0)
    throw std::invalid_argument(
        "LossModel::robust_distance: outlier_count must be nonnegative");
  LossModel m;
  m.kind_ = LossKind::robust_distance;
  m.outlier_count_ = outlier_count;
  return m;
}

double LossModel::q1_value(const Vector& y) const {
  switch (kind_) {
    case LossKind::quadratic:
    case LossKind::robust_distance:
      return 0.5 * y.squaredNorm();
    case LossKind::lorentzian:
      return lorentzian_loss(y, gamma_).first;
  }
  return 0.0;
}

Vector LossModel::q1_grad(const Vector& y) const {
  switch (kind_) {
    case LossKind::quadratic:
    case LossKind::robust_distance:
      return y;
    case LossKind::lorentzian:
      return lorentzian_loss(y, gamma_).second;
  }
  return Vector::Zero(y.size());
}

double LossModel::q2_value(const Vector& y) const {
  if (kind_ != LossKind::robust_distance) return 0.0;
  return 0.5 * project_sparse(y, outlier_count_).squaredNorm();
}

Vector LossModel::q2_subgrad(const Vector& y) const {
  if (kind_ != LossKind::robust_distance) return Vector::Zero(y.size());
  return project_sparse(y, outlier_count_);
}

void SquaredRatioModel::validate() const {
  if (A.rows() != b.size())
    throw std::invalid_argument("SquaredRatioModel: A rows != b size");
  if (box.size() != A.cols())
    throw std::invalid_argument("SquaredRatioModel: box dimension != A cols");
  box.validate();
  if (!(lambda > 0.0))
    throw std::invalid_argument("SquaredRatioModel: lambda must be positive");
  if (loss.kind() == LossKind::robust_distance &&
      loss.outlier_count() > A.rows())
    throw std::invalid_argument(
        "SquaredRatioModel: outlier_count exceeds measurement count");
}

double ratio_coefficient(const Vector& x, double lambda) {
  const double g = x.squaredNorm();
  if (g == 0.0)
    throw std::invalid_argument("ratio_coefficient: x must be nonzero");
  return std::sqrt(lambda) * x.lpNorm<1>() / g;
}

Vector prox_l1_box(const Vector& v, double tau, const BoxBounds& box) {
  if (!(tau >= 0.0))
    throw std::invalid_argument("prox_l1_box: tau must be nonnegative");
  Vector out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mag = std::abs(v[j]) - tau;
    const double soft = mag > 0.0 ? (v[j] > 0.0 ? mag : -mag) : 0.0;
    out[j] = std::max(std::min(soft, box.upper[j]), box.lower[j]);
  }
  return out;
}

std::pair<double, Vector> quadratic_loss(const Vector& y) {
  return {0.5 * y.squaredNorm(), y};
}

std::pair<double, Vector> lorentzian_loss(const Vector& y, double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("lorentzian_loss: gamma must be positive");
  const double g2 = gamma * gamma;
  double value = 0.0;
  Vector grad(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    // log1p keeps precision when y_i^2/gamma^2 is tiny.
    value += std::log1p(y[i] * y[i] / g2);
    grad[i] = 2.0 * y[i] / (g2 + y[i] * y[i]);
  }
  return {value, std::move(grad)};
}

Vector project_sparse(const Vector& y, Eigen::Index outlier_count) {
  const Eigen::Index m = y.size();
  if (outlier_count < 0 || outlier_count > m)
    throw std::invalid_argument("project_sparse: outlier_count out of range");
  if (outlier_count == m) return y;
  Vector out = Vector::Zero(m);
  if (outlier_count == 0) return out;
  std::vector<Eigen::Index> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  // Magnitude descending; ties keep the smaller index.
  auto larger = [&y](Eigen::Index a, Eigen::Index b) {
    const double va = std::abs(y[a]), vb = std::abs(y[b]);
    return va != vb ? va > vb : a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + outlier_count - 1, idx.end(),
                   larger);
  for (Eigen::Index k = 0; k < outlier_count; ++k) out[idx[k]] = y[idx[k]];
  return out;
}

RobustParts robust_distance_loss(const Vector& y, Eigen::Index outlier_count) {
  Vector top = project_sparse(y, outlier_count);
  RobustParts parts;
  parts.q1 = 0.5 * y.squaredNorm();
  parts.q1_grad = y;
  parts.q2 = 0.5 * top.squaredNorm();
  parts.q2_subgrad = std::move(top);
  return parts;
}

namespace {

// Caches the residual A x - b for the two most recent points, so the
// oracles below do one matrix pass per point instead of one per call.
class ResidualCache {
 public:
  explicit ResidualCache(std::shared_ptr<const SquaredRatioModel> model)
      : model_(std::move(model)) {}

  Vector residual(const Vector& x) {
    std::lock_guard<std::mutex> lock(mu_);
    for (const Slot& s : slots_) {
      if (s.valid && s.x.size() == x.size() &&
          std::memcmp(s.x.data(), x.data(),
                      sizeof(double) * static_cast<size_t>(x.size())) == 0)
        return s.r;
    }
    Slot& s = slots_[next_];
    next_ = 1 - next_;
    s.x = x;
    s.r.noalias() = model_->A * x;
    s.r -= model_->b;
    s.valid = true;
    return s.r;
  }

 private:
  struct Slot {
    Vector x, r;
    bool valid = false;
  };
  std::mutex mu_;
  Slot slots_[2];
  int next_ = 0;
  std::shared_ptr<const SquaredRatioModel> model_;
};

}  // namespace

FractionalObjective build_objective(
    std::shared_ptr<const SquaredRatioModel> model) {
  model->validate();
  auto cache = std::make_shared<ResidualCache>(model);
  const double sqrt_lambda = std::sqrt(model->lambda);
  const bool has_h2 = model->loss.kind() == LossKind::robust_distance;

  FractionalObjective obj;
  obj.f_value = [sqrt_lambda](const Vector& x) {
    return sqrt_lambda * x.lpNorm<1>();
  };
  obj.g_value = [](const Vector& x) { return x.squaredNorm(); };
  obj.g_grad = [](const Vector& x) { return Vector(2.0 * x); };
  obj.h1_value = [model, cache](const Vector& x) {
    return model->loss.q1_value(cache->residual(x));
  };
  obj.h1_grad = [model, cache](const Vector& x) {
    return Vector(model->A.transpose() *
                  model->loss.q1_grad(cache->residual(x)));
  };
  if (has_h2) {
    obj.h2_value = [model, cache](const Vector& x) {
      return model->loss.q2_value(cache->residual(x));
    };
    obj.h2_subgrad = [model, cache](const Vector& x) {
      return Vector(model->A.transpose() *
                    model->loss.q2_subgrad(cache->residual(x)));
    };
  } else {
    obj.h2_value = [](const Vector&) { return 0.0; };
    obj.h2_subgrad = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  }
  obj.prox_scaled_f_box = [model, sqrt_lambda](const Vector& v, double tau) {
    return prox_l1_box(v, tau * sqrt_lambda, model->box);
  };
  obj.in_box = [model](const Vector& x) { return model->box.contains(x); };
  return obj;
}

FractionalObjective build_objective(const SquaredRatioModel& model) {
  return build_objective(std::make_shared<const SquaredRatioModel>(model));
}

double effective_sparsity(const Vector& x) {
  const double g = x.squaredNorm();
  if (g == 0.0)
    throw std::invalid_argument("effective_sparsity: x must be nonzero");
  const double l1 = x.lpNorm<1>();
  return l1 * l1 / g;
}

}  // namespace sqratio
