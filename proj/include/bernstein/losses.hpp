#pragma once

// Least squares, logistic and Huber losses over a linear predictor Xb, plus
// the coordinatewise pieces the solvers need.

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "bernstein/errors.hpp"

namespace bernstein {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LossKind {
  enum class Type { squared, logistic, huber };
  Type type = Type::squared;
  double delta = 1.0;  // huber only

  static LossKind squared() { return {Type::squared, 1.0}; }
  static LossKind logistic() { return {Type::logistic, 1.0}; }
  static LossKind huber(double delta) {
    LossKind k{Type::huber, delta};
    k.validate();
    return k;
  }

  void validate() const {
    if (type == Type::huber && !(std::isfinite(delta) && delta > 0.0)) {
      throw InvalidParameter("huber delta must be positive, got " + std::to_string(delta));
    }
  }

  [[nodiscard]] std::string name() const {
    switch (type) {
      case Type::squared:
        return "squared";
      case Type::logistic:
        return "logistic";
      case Type::huber:
        return "huber";
    }
    return "";
  }
};

inline constexpr double kCurvatureFloor = 1e-8;
inline constexpr double kUnitLengthTol = 1e-8;

namespace detail {

// log(1 + exp(x)) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// 1 / (1 + exp(-x)).
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double huber(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * a - 0.5 * delta * delta;
}

}  // namespace detail

inline void check_labels(const Vector& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 1.0 && y[i] != -1.0) {
      throw DataError("logistic loss needs labels in {-1, +1}; y[" + std::to_string(i) +
                      "] = " + std::to_string(y[i]));
    }
  }
}

inline void check_dims(const Vector& b, const Matrix& X, const Vector& y) {
  if (X.rows() != y.size() || X.cols() != b.size()) {
    throw DataError("dimension mismatch: X is " + std::to_string(X.rows()) + "x" +
                    std::to_string(X.cols()) + ", b has " + std::to_string(b.size()) +
                    ", y has " + std::to_string(y.size()));
  }
}

/// Loss as a function of the linear predictor eta = Xb.
inline double loss_from_predictor(const LossKind& kind, const Vector& eta, const Vector& y) {
  double total = 0.0;
  switch (kind.type) {
    case LossKind::Type::squared:
      total = 0.5 * (y - eta).squaredNorm();
      break;
    case LossKind::Type::logistic:
      for (Eigen::Index i = 0; i < y.size(); ++i) total += detail::softplus(-y[i] * eta[i]);
      break;
    case LossKind::Type::huber:
      for (Eigen::Index i = 0; i < y.size(); ++i) total += detail::huber(y[i] - eta[i], kind.delta);
      break;
  }
  return total;
}

/// d loss / d eta_i for every sample. The gradient in b is X^T of this.
inline Vector predictor_gradient(const LossKind& kind, const Vector& eta, const Vector& y) {
  Vector g(y.size());
  switch (kind.type) {
    case LossKind::Type::squared:
      g = eta - y;
      break;
    case LossKind::Type::logistic:
      // omega_i = exp(-m) / (1 + exp(-m)) with margin m = y_i eta_i
      for (Eigen::Index i = 0; i < y.size(); ++i) g[i] = -y[i] * detail::sigmoid(-y[i] * eta[i]);
      break;
    case LossKind::Type::huber:
      // C^1 at the knot, so clipping gives delta sgn(r) there.
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        g[i] = -std::clamp(y[i] - eta[i], -kind.delta, kind.delta);
      }
      break;
  }
  return g;
}

inline double loss_value(const LossKind& kind, const Vector& b, const Matrix& X, const Vector& y) {
  kind.validate();
  check_dims(b, X, y);
  if (kind.type == LossKind::Type::logistic) check_labels(y);
  return loss_from_predictor(kind, X * b, y);
}

inline Vector loss_grad(const LossKind& kind, const Vector& b, const Matrix& X, const Vector& y) {
  kind.validate();
  check_dims(b, X, y);
  if (kind.type == LossKind::Type::logistic) check_labels(y);
  return X.transpose() * predictor_gradient(kind, X * b, y);
}

/// Upper bound on the j-th diagonal of the loss Hessian, floored at 1e-8.
inline double coord_curvature_bound(const LossKind& kind, Eigen::Index j, const Matrix& X) {
  if (j < 0 || j >= X.cols()) throw InvalidParameter("column index out of range");
  double c = X.col(j).squaredNorm();
  if (kind.type == LossKind::Type::logistic) c *= 0.25;
  return std::max(c, kCurvatureFloor);
}

inline void check_unit_column(const Matrix& X, Eigen::Index j) {
  const double len = X.col(j).norm();
  if (std::abs(len - 1.0) > kUnitLengthTol) {
    throw ContractViolation("column " + std::to_string(j) + " has length " + std::to_string(len) +
                            "; standardize the design first");
  }
}

/// sum_i (y_i - sum_{k != j} x_ik b_k) x_ij, recomputed from scratch.
inline double partial_residual_inner(Eigen::Index j, const Vector& b, const Matrix& X,
                                     const Vector& y) {
  check_dims(b, X, y);
  if (j < 0 || j >= X.cols()) throw InvalidParameter("column index out of range");
  check_unit_column(X, j);
  const Vector z = X * b - X.col(j) * b[j];
  return X.col(j).dot(y - z);
}

/// Keeps r = y - Xb in step with single-coordinate updates so that the
/// partial residual inner product costs O(n). Requires unit-length columns.
class ResidualCache {
public:
  ResidualCache(const Matrix& X, const Vector& y, Vector b) : X_(X), y_(y), b_(std::move(b)) {
    check_dims(b_, X_, y_);
    for (Eigen::Index j = 0; j < X_.cols(); ++j) check_unit_column(X_, j);
    refresh();
  }

  /// x_j^T r + b_j, equal to the partial residual inner product because ||x_j|| = 1.
  [[nodiscard]] double inner(Eigen::Index j) const { return X_.col(j).dot(r_) + b_[j]; }

  void set(Eigen::Index j, double value) {
    const double delta = value - b_[j];
    if (delta == 0.0) return;
    r_.noalias() -= delta * X_.col(j);
    b_[j] = value;
  }

  void assign(const Vector& b) {
    b_ = b;
    refresh();
  }

  void refresh() { r_ = y_ - X_ * b_; }

  [[nodiscard]] const Vector& coef() const { return b_; }
  [[nodiscard]] const Vector& residual() const { return r_; }
  [[nodiscard]] const Matrix& design() const { return X_; }
  [[nodiscard]] const Vector& response() const { return y_; }

private:
  const Matrix& X_;
  const Vector& y_;
  Vector b_;
  Vector r_;
};

}  // namespace bernstein
