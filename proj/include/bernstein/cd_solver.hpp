#pragma once

// Pathwise coordinate descent for penalized least squares on a standardized
// design, with KKT and second-order diagnostics.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bernstein/errors.hpp"
#include "bernstein/losses.hpp"
#include "bernstein/penalty.hpp"
#include "bernstein/standardize.hpp"
#include "bernstein/thresholding.hpp"
#include "bernstein/trace.hpp"

namespace bernstein {

/// etas strictly increasing, alphas strictly decreasing (the last alpha is the
/// lasso-like end). Cells are indexed (k, l) into (alphas, etas).
struct PathGrid {
  std::vector<double> etas;
  std::vector<double> alphas;

  void validate() const {
    if (etas.empty() || alphas.empty()) throw InvalidParameter("path grid is empty");
    for (std::size_t i = 0; i < etas.size(); ++i) {
      if (!(std::isfinite(etas[i]) && etas[i] > 0.0)) throw InvalidParameter("etas must be positive");
      if (i > 0 && !(etas[i] > etas[i - 1])) throw InvalidParameter("etas must be strictly increasing");
    }
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      if (!(std::isfinite(alphas[i]) && alphas[i] > 0.0)) {
        throw InvalidParameter("alphas must be positive");
      }
      if (i > 0 && !(alphas[i] < alphas[i - 1])) {
        throw InvalidParameter("alphas must be strictly decreasing");
      }
    }
  }

  [[nodiscard]] std::size_t size() const { return etas.size() * alphas.size(); }

  static std::vector<double> default_alphas() { return {8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 1e-3}; }

  /// n_eta geometric points from ratio * eta_max up to eta_max = ||X^T y||_inf,
  /// where the all-zero fit is already stationary.
  static PathGrid make_default(const Matrix& X, const Vector& y, int n_eta = 50,
                               double ratio = 1e-3,
                               std::vector<double> alphas = default_alphas()) {
    if (n_eta < 1) throw InvalidParameter("need at least one eta");
    const double eta_max = (X.transpose() * y).cwiseAbs().maxCoeff();
    if (!(eta_max > 0.0)) throw DataError("X^T y is zero; no path to fit");
    PathGrid grid;
    grid.alphas = std::move(alphas);
    grid.etas.resize(static_cast<std::size_t>(n_eta));
    for (int i = 0; i < n_eta; ++i) {
      const double frac = n_eta == 1 ? 1.0 : static_cast<double>(i) / (n_eta - 1);
      grid.etas[static_cast<std::size_t>(i)] = eta_max * std::pow(ratio, 1.0 - frac);
    }
    grid.etas.back() = eta_max;
    grid.validate();
    return grid;
  }
};

enum class SkipPolicy { paper_faithful, compute_case2 };
enum class CellStatus { converged, skipped_condition, max_sweeps };

inline const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::converged:
      return "converged";
    case CellStatus::skipped_condition:
      return "skipped_condition";
    case CellStatus::max_sweeps:
      return "max_sweeps";
  }
  return "";
}

struct CDConfig {
  double tol = 1e-7;  // on the max coefficient change of a sweep
  int max_sweeps = 10000;
  SkipPolicy skip_policy = SkipPolicy::paper_faithful;
  bool record_trace = false;

  void validate() const {
    if (!(tol > 0.0)) throw InvalidParameter("tol must be positive");
    if (max_sweeps < 1) throw InvalidParameter("max_sweeps must be at least 1");
  }
};

/// lambda = eta / Phi(alpha), the weight on Phi(alpha |b|) in the objective.
inline double path_lambda(const PenaltySpec& spec, double eta) {
  return eta / phi(spec, spec.alpha);
}

/// Largest eta for which the coordinate subproblems stay convex,
/// Phi(alpha) / (alpha^2 |Phi''(0)|). Infinite for l1.
inline double convexity_limit(const PenaltySpec& spec) {
  const double c = std::abs(phi_double_prime(spec, 0.0));
  if (c == 0.0) return std::numeric_limits<double>::infinity();
  return phi(spec, spec.alpha) / (spec.alpha * spec.alpha * c);
}

inline double penalty_sum(const Vector& b, double lambda, const PenaltySpec& spec) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) s += phi(spec, spec.alpha * std::abs(b[j]));
  return lambda * s;
}

/// 1/2 ||y - Xb||^2 + lambda sum_j Phi(alpha |b_j|).
inline double ls_objective(const Vector& b, const Matrix& X, const Vector& y, double lambda,
                           const PenaltySpec& spec) {
  return 0.5 * (y - X * b).squaredNorm() + penalty_sum(b, lambda, spec);
}

inline void check_standardized(const Matrix& X, const Vector& y, double tol = 1e-8) {
  if (X.rows() != y.size()) throw DataError("X and y have different row counts");
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double m = X.col(j).mean();
    const double len = X.col(j).norm();
    if (std::abs(m) > tol || std::abs(len - 1.0) > tol) {
      throw ContractViolation("column " + std::to_string(j) + " is not standardized (mean " +
                              std::to_string(m) + ", length " + std::to_string(len) + ")");
    }
  }
  if (std::abs(y.mean()) > tol * std::max(1.0, y.norm())) {
    throw ContractViolation("response is not centered");
  }
}

struct SweepResult {
  double max_change = 0.0;
  double sq_change = 0.0;
};

/// One cyclic pass j = 0..p-1 of b_j <- S(partial residual inner product).
inline SweepResult cd_sweep(ResidualCache& cache, const Thresholder& op) {
  SweepResult out;
  const Eigen::Index p = cache.coef().size();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double old = cache.coef()[j];
    const double updated = op(cache.inner(j));
    const double d = updated - old;
    if (d != 0.0) {
      cache.set(j, updated);
      out.max_change = std::max(out.max_change, std::abs(d));
      out.sq_change += d * d;
    }
  }
  return out;
}

inline double cache_objective(const ResidualCache& cache, double lambda, const PenaltySpec& spec) {
  return 0.5 * cache.residual().squaredNorm() + penalty_sum(cache.coef(), lambda, spec);
}

struct CellFit {
  CellStatus status = CellStatus::converged;
  int sweeps = 0;
  double objective = 0.0;
  std::optional<SolverTrace> trace;
};

/// Runs sweeps from the cache's current coefficients until the max change is
/// at most tol.
inline CellFit fit_cell(ResidualCache& cache, const PenaltySpec& spec, double eta,
                        const CDConfig& config) {
  const double lambda = path_lambda(spec, eta);
  const Thresholder op(spec, lambda);
  CellFit fit;
  if (config.record_trace) {
    fit.trace.emplace();
    fit.trace->c0 = std::max(0.0, 1.0 - lambda * spec.alpha * spec.alpha *
                                            std::abs(phi_double_prime(spec, 0.0)));
    fit.trace->start(cache_objective(cache, lambda, spec));
  }
  fit.status = CellStatus::max_sweeps;
  for (int s = 1; s <= config.max_sweeps; ++s) {
    const SweepResult r = cd_sweep(cache, op);
    fit.sweeps = s;
    if (fit.trace) fit.trace->push(cache_objective(cache, lambda, spec), r.sq_change, r.max_change);
    if (r.max_change <= config.tol) {
      fit.status = CellStatus::converged;
      break;
    }
  }
  // The cached residual drifts by rounding over many updates.
  cache.refresh();
  fit.objective = cache_objective(cache, lambda, spec);
  return fit;
}

struct PathCell {
  double alpha = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  CellStatus status = CellStatus::skipped_condition;
  int sweeps = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  bool nonconvex = false;  // fitted with case-II coordinate operators
  Vector coef_std;         // empty for skipped cells
  Vector coef;             // raw scale when a back transform was supplied
  double intercept = 0.0;
  std::optional<SolverTrace> trace;

  [[nodiscard]] bool fitted() const { return status != CellStatus::skipped_condition; }
  [[nodiscard]] Eigen::Index nnz() const {
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < coef_std.size(); ++j) c += coef_std[j] != 0.0;
    return c;
  }
};

struct PathSolution {
  PathGrid grid;
  PenaltySpec spec;  // family and rho; alpha varies per cell
  std::vector<PathCell> cells;  // row-major in (alpha index k, eta index l)
  std::optional<BackTransform> back;
  std::vector<std::string> warnings;

  [[nodiscard]] const PathCell& cell(std::size_t k, std::size_t l) const {
    return cells.at(k * grid.etas.size() + l);
  }
  PathCell& cell(std::size_t k, std::size_t l) { return cells.at(k * grid.etas.size() + l); }
};

/// Warm-started path: eta from largest to smallest; each eta row starts from
/// the fit at (smallest alpha, next larger eta) and carries the working vector
/// from the smallest alpha to the largest.
inline PathSolution fit_path(const Matrix& X, const Vector& y, const PathGrid& grid,
                             const PenaltySpec& family, const CDConfig& config = {},
                             std::optional<BackTransform> back = std::nullopt) {
  grid.validate();
  config.validate();
  family.validate();
  check_standardized(X, y);
  if (back && (back->mean.size() != X.cols() || back->scale.size() != X.cols())) {
    throw InvalidParameter("back transform does not match the design width");
  }

  const std::size_t K = grid.alphas.size();
  const std::size_t L = grid.etas.size();
  PathSolution sol;
  sol.grid = grid;
  sol.spec = family;
  sol.back = back;
  sol.cells.resize(K * L);

  ResidualCache cache(X, y, Vector::Zero(X.cols()));
  Vector row_start = Vector::Zero(X.cols());
  bool warned = false;

  for (std::size_t l = L; l-- > 0;) {
    cache.assign(row_start);
    for (std::size_t k = K; k-- > 0;) {
      const PenaltySpec spec = family.with_alpha(grid.alphas[k]);
      const double eta = grid.etas[l];
      PathCell& c = sol.cell(k, l);
      c.alpha = spec.alpha;
      c.eta = eta;
      c.lambda = path_lambda(spec, eta);
      const bool convex = eta <= convexity_limit(spec);
      if (!convex && config.skip_policy == SkipPolicy::paper_faithful) {
        c.status = CellStatus::skipped_condition;
        continue;
      }
      if (!convex && !warned) {
        sol.warnings.push_back(
            "cells beyond the convexity limit use nonconvex coordinate subproblems; "
            "descent guarantees may not hold");
        warned = true;
      }
      c.nonconvex = !convex;
      CellFit fit = fit_cell(cache, spec, eta, config);
      c.status = fit.status;
      c.sweeps = fit.sweeps;
      c.objective = fit.objective;
      c.trace = std::move(fit.trace);
      c.coef_std = cache.coef();
      if (back) {
        c.coef = back->coef(c.coef_std);
        c.intercept = back->intercept(c.coef_std);
      } else {
        c.coef = c.coef_std;
      }
      if (k + 1 == K) row_start = c.coef_std;
    }
  }
  return sol;
}

/// Max violation of 0 in grad L + lambda alpha Phi'(alpha |b_j|) d|b_j|.
inline double kkt_residual(const LossKind& loss, const Vector& b, const Matrix& X,
                           const Vector& y, double lambda, const PenaltySpec& spec) {
  const Vector g = loss_grad(loss, b, X, y);
  const double a = spec.alpha;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    double v;
    if (b[j] != 0.0) {
      const double sgn = b[j] > 0.0 ? 1.0 : -1.0;
      v = std::abs(g[j] + lambda * a * phi_prime(spec, a * std::abs(b[j])) * sgn);
    } else {
      v = std::max(0.0, std::abs(g[j]) - lambda * a * phi_prime(spec, 0.0));
    }
    worst = std::max(worst, v);
  }
  return worst;
}

/// Squared-loss version, gradient X^T X b - X^T y.
inline double kkt_residual(const Vector& b, const Matrix& X, const Vector& y, double lambda,
                           const PenaltySpec& spec) {
  return kkt_residual(LossKind::squared(), b, X, y, lambda, spec);
}

struct LocalMinReport {
  /// lambda_min(H_S) + lambda alpha^2 Phi''(0): matches the objective
  /// lambda Phi(alpha |b|) that the solvers minimize.
  double eigen_margin = std::numeric_limits<double>::infinity();
  /// The same with the penalty term divided by Phi(alpha).
  double eigen_margin_normalized = std::numeric_limits<double>::infinity();
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  bool strict_dual_feasible = true;
  Eigen::Index support_size = 0;

  /// Sufficient condition for a strict local minimizer.
  [[nodiscard]] bool strict() const { return eigen_margin > 0.0 && strict_dual_feasible; }
};

/// Second-order check at a stationary point. H_S is X_S^T D X_S with D the
/// loss curvature weights (identity for squared loss).
inline LocalMinReport check_local_min(const Vector& b, const Matrix& X, const Vector& y,
                                      double lambda, const PenaltySpec& spec,
                                      const LossKind& loss = LossKind::squared(),
                                      double stationarity_tol = 1e-6) {
  const double kkt = kkt_residual(loss, b, X, y, lambda, spec);
  if (kkt > stationarity_tol) {
    throw ContractViolation("check_local_min needs a stationary point; KKT residual is " +
                            std::to_string(kkt));
  }
  LocalMinReport report;
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (b[j] != 0.0) support.push_back(j);
  }
  report.support_size = static_cast<Eigen::Index>(support.size());

  const Vector eta = X * b;
  Vector weight = Vector::Ones(y.size());
  if (loss.type == LossKind::Type::logistic) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double w = detail::sigmoid(y[i] * eta[i]);
      weight[i] = w * (1.0 - w);
    }
  } else if (loss.type == LossKind::Type::huber) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      weight[i] = std::abs(y[i] - eta[i]) <= loss.delta ? 1.0 : 0.0;
    }
  }

  const Vector g = loss_grad(loss, b, X, y);
  const double dual_cap = lambda * spec.alpha * phi_prime(spec, 0.0);
  double off = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (b[j] == 0.0) off = std::max(off, std::abs(g[j]));
  }
  report.strict_dual_feasible = off < dual_cap || support.size() == static_cast<std::size_t>(b.size());

  if (support.empty()) return report;
  Matrix XS(X.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t s = 0; s < support.size(); ++s) {
    XS.col(static_cast<Eigen::Index>(s)) = X.col(support[s]);
  }
  const Matrix H = XS.transpose() * weight.asDiagonal() * XS;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = eig.eigenvalues().minCoeff();
  const double a2d2 = spec.alpha * spec.alpha * phi_double_prime(spec, 0.0);
  report.eigen_margin = report.min_eigenvalue + lambda * a2d2;
  report.eigen_margin_normalized = report.min_eigenvalue + lambda * a2d2 / phi(spec, spec.alpha);
  return report;
}

}  // namespace bernstein
