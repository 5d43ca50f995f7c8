#pragma once

// Proximal alternating linearized minimization: cyclic coordinate steps on a
// linearized loss followed by the exact scalar proximal map of the penalty.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bernstein/cd_solver.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/losses.hpp"
#include "bernstein/penalty.hpp"
#include "bernstein/thresholding.hpp"
#include "bernstein/trace.hpp"

namespace bernstein {

struct StepRule {
  enum class Kind { curvature_bound, fixed };
  Kind kind = Kind::curvature_bound;
  double nu = 1.0;  // fixed only

  static StepRule curvature_bound() { return {Kind::curvature_bound, 1.0}; }
  static StepRule fixed(double nu) { return {Kind::fixed, nu}; }
};

struct PalmConfig {
  double tol = 1e-6;  // on ||b(t+1) - b(t)||_inf
  int max_epochs = 5000;
  double m0 = 1e-8;
  double M0 = 1e12;
  StepRule step_rule = StepRule::curvature_bound();

  void validate() const {
    if (!(tol > 0.0)) throw InvalidParameter("tol must be positive");
    if (max_epochs < 1) throw InvalidParameter("max_epochs must be at least 1");
    if (!(m0 > 0.0 && m0 < M0 && std::isfinite(M0))) {
      throw InvalidParameter("step bounds need 0 < m0 < M0 < inf");
    }
    if (step_rule.kind == StepRule::Kind::fixed && !(step_rule.nu > 0.0 && std::isfinite(step_rule.nu))) {
      throw InvalidParameter("fixed step nu must be positive");
    }
  }
};

struct PalmResult {
  Vector coef;
  SolverTrace trace;
  bool converged = false;
  int epochs = 0;
  std::vector<double> nu;  // per-coordinate step constants
};

/// Prox step for coordinate j: prox of u = b_j - grad_j / nu.
inline double palm_coordinate_step(double b_j, double grad_j, double nu_j, double lambda,
                                   const PenaltySpec& spec) {
  if (!std::isfinite(grad_j)) {
    throw NumericalError("nonfinite gradient (" + std::to_string(grad_j) + ") at b_j = " +
                         std::to_string(b_j));
  }
  return prox(b_j - grad_j / nu_j, nu_j, lambda, spec);
}

namespace detail {

// d loss / d eta for one sample.
inline double predictor_grad_1(const LossKind& loss, double eta, double y) {
  switch (loss.type) {
    case LossKind::Type::squared:
      return eta - y;
    case LossKind::Type::logistic:
      return -y * sigmoid(-y * eta);
    case LossKind::Type::huber:
      return -std::clamp(y - eta, -loss.delta, loss.delta);
  }
  return 0.0;
}

// Second derivative in eta, used only for diagnostics.
inline double predictor_curv_1(const LossKind& loss, double eta, double y) {
  switch (loss.type) {
    case LossKind::Type::squared:
      return 1.0;
    case LossKind::Type::logistic: {
      const double s = sigmoid(y * eta);
      return s * (1.0 - s);
    }
    case LossKind::Type::huber:
      return std::abs(y - eta) <= loss.delta ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace detail

/// Minimizes L(b) + lambda sum_j Phi(alpha |b_j|) for squared, logistic or
/// Huber loss, starting from zero or from `start`.
inline PalmResult fit_palm(const Matrix& X, const Vector& y, const LossKind& loss, double lambda,
                           const PenaltySpec& spec, const PalmConfig& config = {},
                           const std::optional<Vector>& start = std::nullopt) {
  config.validate();
  spec.validate();
  loss.validate();
  if (!(std::isfinite(lambda) && lambda > 0.0)) throw InvalidParameter("lambda must be positive");
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw DataError("X and y have different row counts");
  if (loss.type == LossKind::Type::logistic) check_labels(y);

  PalmResult out;
  out.coef = start ? *start : Vector::Zero(p);
  if (out.coef.size() != p) throw DataError("warm start has the wrong length");

  out.nu.resize(static_cast<std::size_t>(p));
  std::vector<Thresholder> ops;
  ops.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    double nu = config.step_rule.kind == StepRule::Kind::fixed ? config.step_rule.nu
                                                               : coord_curvature_bound(loss, j, X);
    nu = std::clamp(nu, config.m0, config.M0);
    out.nu[static_cast<std::size_t>(j)] = nu;
    ops.emplace_back(spec, lambda / nu);
  }

  const double concavity = lambda * spec.alpha * spec.alpha * std::abs(phi_double_prime(spec, 0.0));
  const double nu_min = *std::min_element(out.nu.begin(), out.nu.end());
  SolverTrace& trace = out.trace;
  trace.c0 = config.step_rule.kind == StepRule::Kind::curvature_bound
                 ? std::max(0.0, nu_min - concavity)
                 : 0.0;

  Vector eta = X * out.coef;
  auto objective = [&] { return loss_from_predictor(loss, eta, y) + penalty_sum(out.coef, lambda, spec); };
  trace.start(objective());

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    double sq = 0.0;
    double mx = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto xj = X.col(j);
      double g = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) g += xj[i] * detail::predictor_grad_1(loss, eta[i], y[i]);
      const double old = out.coef[j];
      if (!std::isfinite(g)) {
        throw NumericalError("nonfinite gradient at coordinate " + std::to_string(j) + ", epoch " +
                             std::to_string(epoch));
      }
      const double nu = out.nu[static_cast<std::size_t>(j)];
      const double updated = ops[static_cast<std::size_t>(j)](old - g / nu);
      const double d = updated - old;
      if (d != 0.0) {
        out.coef[j] = updated;
        eta.noalias() += d * xj;
        sq += d * d;
        mx = std::max(mx, std::abs(d));
      }
    }
    out.epochs = epoch;
    trace.push(objective(), sq, mx);
    if (mx <= config.tol) {
      out.converged = true;
      break;
    }
  }

  trace.kkt = kkt_residual(loss, out.coef, X, y, lambda, spec);
  if (!out.converged) {
    trace.warnings.push_back("stopped at max_epochs = " + std::to_string(config.max_epochs));
  }
  // The descent analysis asks the penalty's concavity to stay below the
  // loss curvature along every coordinate; logistic loss can violate this.
  eta = X * out.coef;
  double gamma_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < p; ++j) {
    double gj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      gj += X(i, j) * X(i, j) * detail::predictor_curv_1(loss, eta[i], y[i]);
    }
    gamma_min = std::min(gamma_min, gj);
  }
  if (concavity >= gamma_min) {
    trace.warnings.push_back("penalty concavity " + std::to_string(concavity) +
                             " is not below the smallest coordinate curvature " +
                             std::to_string(gamma_min) + "; descent constant may be zero");
  }
  return out;
}

}  // namespace bernstein
