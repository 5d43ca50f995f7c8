#pragma once

// Exact scalar minimizers of J(b) = 1/2 (z - b)^2 + lambda * Phi(alpha |b|).
//
// For the Bernstein family the nonzero branch solves
//   b + lambda * alpha * Phi'(alpha b) = |z|,
// which is increasing and convex in b on the bracket used here, so a Newton
// iteration safeguarded by bisection converges from the right end.
//
// Case I (lambda alpha^2 |Phi''(0)| <= 1) is the continuous regime: the estimate
// is zero exactly when |z| <= lambda alpha. In case II a second stationary point
// appears once |z| exceeds s* + lambda alpha Phi'(alpha s*), but it only becomes
// the global minimizer past a larger jump threshold T. T is located by solving
//   lambda (Phi(alpha b) - alpha b Phi'(alpha b)) = b^2 / 2,
// the condition J(b) = J(0) at a stationary point b, and equals
// b_T + lambda alpha Phi'(alpha b_T).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "bernstein/errors.hpp"
#include "bernstein/penalty.hpp"

namespace bernstein {

enum class ThresholdCase { I, II };

inline const char* to_string(ThresholdCase c) { return c == ThresholdCase::I ? "I" : "II"; }

/// Scalar problem data. lambda multiplies Phi(alpha |b|).
struct ThresholdQuery {
  double z = 0.0;
  PenaltySpec spec;
  double lambda = 1.0;

  /// lambda = eta / Phi(alpha), the normalized scaling used along a path.
  static ThresholdQuery with_eta(double z, const PenaltySpec& spec, double eta) {
    spec.validate();
    return {z, spec, eta / phi(spec, spec.alpha)};
  }
};

struct ThresholdResult {
  double estimate = 0.0;
  ThresholdCase regime = ThresholdCase::I;
  /// |z| must exceed this for a nonzero estimate (ties give zero).
  double boundary = 0.0;
  /// Case II only: the inflection point s* of the subproblem.
  std::optional<double> s_star;
  /// Where a nonzero stationary point first appears. Equals boundary in case I.
  double stationary_boundary = 0.0;
  int iterations = 0;
  bool converged = true;
};

namespace detail {

struct RootResult {
  double x = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Newton on [lo, hi] with a maintained sign-change bracket; bisects whenever
// the Newton iterate leaves the bracket.
template <class F, class DF>
RootResult safeguarded_newton(F&& f, DF&& df, double lo, double hi, double start, double ftol,
                              int max_iter = 200) {
  const double flo = f(lo);
  if (flo == 0.0) return {lo, 0, true};
  const bool increasing = flo < 0.0;
  double x = std::clamp(start, lo, hi);
  for (int it = 1; it <= max_iter; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= ftol) return {x, it, true};
    if ((fx < 0.0) == increasing) {
      lo = x;
    } else {
      hi = x;
    }
    const double width_tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
    if (hi - lo <= width_tol) return {x, it, true};
    const double d = df(x);
    double next = x - fx / d;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= width_tol * 0.25) return {next, it, true};
    x = next;
  }
  return {x, max_iter, false};
}

inline void check_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw InvalidParameter("lambda must be positive and finite, got " + std::to_string(lambda));
  }
}

}  // namespace detail

/// sgn(z) max(|z| - eta, 0).
inline double soft_threshold(double z, double eta) {
  if (eta < 0.0) throw InvalidParameter("soft threshold level must be nonnegative");
  const double a = std::abs(z) - eta;
  return a > 0.0 ? std::copysign(a, z) : 0.0;
}

/// LOG closed form: larger root of alpha b^2 + (1 - alpha|z|) b + (lambda alpha - |z|) = 0.
/// Returns 0 below the case-I boundary; throws NoRootError when no real root exists.
inline double kappa_log(double z, double lambda, double alpha) {
  detail::check_lambda(lambda);
  const double az = alpha * std::abs(z);
  const double disc = (1.0 + az) * (1.0 + az) - 4.0 * lambda * alpha * alpha;
  if (disc < 0.0) throw NoRootError("kappa_log: |z| is below the region with a nonzero root");
  return std::max(0.0, (az - 1.0 + std::sqrt(disc)) / (2.0 * alpha));
}

/// LFR closed form. With w = alpha b + 2 and c = alpha|z| + 2 the stationarity
/// condition is the cubic w^3 - c w^2 + 4 lambda alpha^2 = 0; its largest root in
/// trigonometric form gives
///   b = [c/3 + (2c/3) cos(acos(1 - 2 lambda alpha^2 (3/c)^3) / 3) - 2] / alpha.
inline double kappa_lfr(double z, double lambda, double alpha) {
  detail::check_lambda(lambda);
  const double c = alpha * std::abs(z) + 2.0;
  const double r = 3.0 / c;
  double arg = 1.0 - 2.0 * lambda * alpha * alpha * r * r * r;
  constexpr double slack = 1e-12;
  if (arg < -1.0 - slack || arg > 1.0 + slack) {
    throw NoRootError("kappa_lfr: |z| is below the region with a nonzero root");
  }
  arg = std::clamp(arg, -1.0, 1.0);
  const double w = c / 3.0 + (2.0 * c / 3.0) * std::cos(std::acos(arg) / 3.0);
  return std::max(0.0, (w - 2.0) / alpha);
}

/// KEP closed form. With u = sqrt(2 alpha b + 1) and c = 2 alpha|z| + 1 the
/// stationarity condition is u^3 - c u + 2 lambda alpha^2 = 0, so
///   u = 2 sqrt(c/3) cos(acos(-lambda alpha^2 (3/c)^(3/2)) / 3),  b = (u^2 - 1) / (2 alpha).
inline double kappa_kep(double z, double lambda, double alpha) {
  detail::check_lambda(lambda);
  const double c = 2.0 * alpha * std::abs(z) + 1.0;
  double arg = -lambda * alpha * alpha * std::pow(3.0 / c, 1.5);
  constexpr double slack = 1e-12;
  if (arg < -1.0 - slack) {
    throw NoRootError("kappa_kep: |z| is below the region with a nonzero root");
  }
  arg = std::max(arg, -1.0);
  const double cs = std::cos(std::acos(arg) / 3.0);
  const double u2 = 4.0 * (c / 3.0) * cs * cs;
  return std::max(0.0, (u2 - 1.0) / (2.0 * alpha));
}

/// Thresholding operator for a fixed (penalty, lambda), with the regime,
/// boundaries and root bracket precomputed. Cheap to apply repeatedly.
class Thresholder {
public:
  /// use_closed_form dispatches LOG, LFR and KEP to their analytic roots.
  Thresholder(const PenaltySpec& spec, double lambda, bool use_closed_form = false)
      : spec_(spec), lambda_(lambda), closed_form_(use_closed_form) {
    spec_.validate();
    detail::check_lambda(lambda_);
    const double alpha = spec_.alpha;
    slope_ = lambda_ * alpha;
    curvature_ = lambda_ * alpha * alpha * std::abs(phi_double_prime(spec_, 0.0));

    if (spec_.family == Family::l1 || curvature_ <= 1.0) {
      regime_ = ThresholdCase::I;
      boundary_ = slope_ * phi_prime(spec_, 0.0);
      stationary_boundary_ = boundary_;
      return;
    }
    regime_ = ThresholdCase::II;
    if (spec_.family == Family::mcp) {
      // Concave on [0, 1/alpha): the nonzero candidate is b = |z| >= 1/alpha and
      // it beats zero once z^2 / 2 > lambda / 2.
      boundary_ = std::sqrt(lambda_);
      stationary_boundary_ = boundary_;
      return;
    }
    init_case_two();
  }

  [[nodiscard]] const PenaltySpec& spec() const { return spec_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] ThresholdCase regime() const { return regime_; }
  [[nodiscard]] double boundary() const { return boundary_; }
  [[nodiscard]] double stationary_boundary() const { return stationary_boundary_; }
  [[nodiscard]] std::optional<double> s_star() const {
    if (regime_ == ThresholdCase::II && spec_.family == Family::bernstein) return s_star_;
    return std::nullopt;
  }

  double operator()(double z) const { return apply(z).estimate; }

  [[nodiscard]] ThresholdResult apply(double z) const {
    if (!std::isfinite(z)) throw DomainError("threshold input z must be finite");
    ThresholdResult out;
    out.regime = regime_;
    out.boundary = boundary_;
    out.stationary_boundary = stationary_boundary_;
    out.s_star = s_star();
    const double az = std::abs(z);
    if (az <= boundary_) return out;
    double mag = 0.0;
    switch (spec_.family) {
      case Family::l1:
        mag = az - slope_;
        break;
      case Family::mcp:
        mag = mcp_magnitude(az);
        break;
      case Family::bernstein: {
        const auto root = kappa(az);
        mag = root.x;
        out.iterations = root.iterations;
        out.converged = root.converged;
        break;
      }
    }
    out.estimate = std::copysign(mag, z);
    return out;
  }

  /// J(b) for this operator at input z.
  [[nodiscard]] double objective(double z, double b) const {
    const double d = z - b;
    return 0.5 * d * d + lambda_ * phi(spec_, spec_.alpha * std::abs(b));
  }

private:
  void init_case_two() {
    const double alpha = spec_.alpha;
    const double rho = spec_.rho;
    // alpha s* solves 1 + lambda alpha^2 Phi''(alpha s) = 0.
    double scaled;
    if (detail::log_branch(rho)) {
      scaled = std::sqrt(curvature_) - 1.0;
    } else if (detail::exp_branch(rho)) {
      scaled = std::log(curvature_);
    } else {
      scaled = std::expm1((1.0 - rho) / (2.0 - rho) * std::log(curvature_)) / (1.0 - rho);
    }
    s_star_ = scaled / alpha;
    stationary_boundary_ = s_star_ + slope_ * phi_prime(spec_, scaled);

    const double lam = lambda_;
    const PenaltySpec& spec = spec_;
    auto gap = [&](double b) {
      const double x = alpha * b;
      return lam * (phi(spec, x) - x * phi_prime(spec, x)) - 0.5 * b * b;
    };
    auto gap_deriv = [&](double b) {
      return -b * (1.0 + lam * alpha * alpha * phi_double_prime(spec, alpha * b));
    };
    // gap > 0 on (0, b_T) and gap < 0 beyond; Phi(x) <= x makes 2 lambda alpha an upper bound.
    const double cap = 2.0 * slope_;
    double hi = std::min(2.0 * s_star_, cap);
    while (gap(hi) >= 0.0) hi = hi < cap ? std::min(2.0 * hi, cap) : 2.0 * hi;
    const double lo = std::max(s_star_, 0.5 * hi);
    const auto root = detail::safeguarded_newton(gap, gap_deriv, gap(lo) > 0.0 ? lo : s_star_, hi, hi, 0.0);
    jump_point_ = root.x;
    boundary_ = std::max(stationary_boundary_, jump_point_ + slope_ * phi_prime(spec_, alpha * jump_point_));
  }

  [[nodiscard]] detail::RootResult kappa(double az) const {
    if (closed_form_) {
      if (spec_.rho == 0.0) return {kappa_log(az, lambda_, spec_.alpha), 0, true};
      if (spec_.rho == 0.5) return {kappa_lfr(az, lambda_, spec_.alpha), 0, true};
      if (spec_.rho == -1.0) return {kappa_kep(az, lambda_, spec_.alpha), 0, true};
    }
    const double alpha = spec_.alpha;
    const double slope = slope_;
    const double lam = lambda_;
    const PenaltySpec& spec = spec_;
    auto h = [&](double b) { return b + slope * phi_prime(spec, alpha * b) - az; };
    auto dh = [&](double b) { return 1.0 + lam * alpha * alpha * phi_double_prime(spec, alpha * b); };
    const double lo = regime_ == ThresholdCase::I ? 0.0 : jump_point_;
    return detail::safeguarded_newton(h, dh, lo, az, az, 1e-12 * std::max(1.0, az));
  }

  // Exact minimizer of 1/2 (|z| - b)^2 + lambda M(alpha b) over b >= 0 by
  // enumerating the stationary points of each quadratic piece.
  [[nodiscard]] double mcp_magnitude(double az) const {
    const double alpha = spec_.alpha;
    const double knot = 1.0 / alpha;
    double best = 0.0;
    double best_val = objective(az, 0.0);
    auto consider = [&](double b) {
      const double v = objective(az, b);
      if (v < best_val) {
        best_val = v;
        best = b;
      }
    };
    const double denom = 1.0 - lambda_ * alpha * alpha;
    if (denom > 0.0) consider(std::clamp((az - slope_) / denom, 0.0, knot));
    consider(knot);
    consider(std::max(az, knot));
    return best;
  }

  PenaltySpec spec_;
  double lambda_;
  bool closed_form_;
  double slope_ = 0.0;
  double curvature_ = 0.0;
  ThresholdCase regime_ = ThresholdCase::I;
  double boundary_ = 0.0;
  double stationary_boundary_ = 0.0;
  double s_star_ = 0.0;
  double jump_point_ = 0.0;
};

/// General thresholding operator (root-finding route for every family member).
inline ThresholdResult threshold(const ThresholdQuery& query) {
  if (!std::isfinite(query.z)) throw DomainError("threshold input z must be finite");
  return Thresholder(query.spec, query.lambda).apply(query.z);
}

/// Exact MCP thresholding: global minimizer of 1/2 (z - b)^2 + lambda M(alpha |b|),
/// ties broken toward zero.
inline double mcp_threshold(double z, double lambda, double alpha) {
  return Thresholder(PenaltySpec::mcp(alpha), lambda)(z);
}

/// argmin_x (nu/2)(x - u)^2 + lambda Phi(alpha |x|). lambda = 0 is the identity.
inline double prox(double u, double nu, double lambda, const PenaltySpec& spec) {
  if (!std::isfinite(nu) || nu <= 0.0) throw InvalidParameter("prox step nu must be positive");
  if (lambda < 0.0) throw InvalidParameter("prox lambda must be nonnegative");
  if (lambda == 0.0) return u;
  return Thresholder(spec, lambda / nu)(u);
}

}  // namespace bernstein
