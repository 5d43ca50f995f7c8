#pragma once

// Generalized-Gamma Bernstein penalties Phi_rho, the MCP and l1 baselines,
// and the scaled forms Phi(alpha |b|) / Phi(alpha) consumed by the solvers.

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "bernstein/errors.hpp"

namespace bernstein {

enum class Family { bernstein, mcp, l1 };

/// Which penalty and its scale alpha.
///
/// For the Bernstein family rho <= 1 selects the member; the named presets are
/// KEP (rho = -1), LOG (rho = 0), LFR (rho = 1/2) and EXP (rho = 1). The penalty
/// applied by every solver is lambda * Phi(alpha |b|), where Phi is Phi_rho, the
/// MCP function M, or the identity for l1.
struct PenaltySpec {
  Family family = Family::bernstein;
  double rho = 0.0;
  double alpha = 1.0;

  static PenaltySpec bernstein(double rho, double alpha = 1.0) {
    PenaltySpec spec{Family::bernstein, rho, alpha};
    spec.validate();
    return spec;
  }
  static PenaltySpec kep(double alpha = 1.0) { return bernstein(-1.0, alpha); }
  static PenaltySpec log(double alpha = 1.0) { return bernstein(0.0, alpha); }
  static PenaltySpec lfr(double alpha = 1.0) { return bernstein(0.5, alpha); }
  static PenaltySpec exp(double alpha = 1.0) { return bernstein(1.0, alpha); }
  static PenaltySpec mcp(double alpha = 1.0) {
    PenaltySpec spec{Family::mcp, 0.0, alpha};
    spec.validate();
    return spec;
  }
  static PenaltySpec l1(double alpha = 1.0) {
    PenaltySpec spec{Family::l1, 0.0, alpha};
    spec.validate();
    return spec;
  }

  /// Same family, different alpha.
  [[nodiscard]] PenaltySpec with_alpha(double new_alpha) const {
    PenaltySpec spec = *this;
    spec.alpha = new_alpha;
    spec.validate();
    return spec;
  }

  void validate() const {
    if (!std::isfinite(alpha) || alpha <= 0.0) {
      throw InvalidParameter("penalty alpha must be positive and finite, got " +
                             std::to_string(alpha));
    }
    if (family == Family::bernstein && (!std::isfinite(rho) || rho > 1.0)) {
      throw InvalidParameter("Bernstein family requires rho <= 1, got " + std::to_string(rho));
    }
  }

  /// Short display name: kep, log, lfr, exp, mcp, l1, or bernstein(<rho>).
  [[nodiscard]] std::string name() const {
    switch (family) {
      case Family::mcp:
        return "mcp";
      case Family::l1:
        return "l1";
      case Family::bernstein:
        break;
    }
    if (rho == -1.0) return "kep";
    if (rho == 0.0) return "log";
    if (rho == 0.5) return "lfr";
    if (rho == 1.0) return "exp";
    return "bernstein(" + std::to_string(rho) + ")";
  }
};

/// Parses kep|log|lfr|exp|mcp|l1|lasso. Throws InvalidParameter otherwise.
inline PenaltySpec parse_penalty(std::string_view name, double alpha = 1.0) {
  if (name == "kep") return PenaltySpec::kep(alpha);
  if (name == "log") return PenaltySpec::log(alpha);
  if (name == "lfr") return PenaltySpec::lfr(alpha);
  if (name == "exp") return PenaltySpec::exp(alpha);
  if (name == "mcp") return PenaltySpec::mcp(alpha);
  if (name == "l1" || name == "lasso") return PenaltySpec::l1(alpha);
  throw InvalidParameter("unknown penalty '" + std::string(name) + "'");
}

struct PenaltyEval {
  double value = 0.0;
  double first_deriv = 0.0;
  double second_deriv = 0.0;
};

namespace detail {

// The general rho formula is 0/0 at rho = 0 and degenerates at rho = 1.
inline constexpr double kBranchTol = 1e-8;

inline bool log_branch(double rho) { return std::abs(rho) < kBranchTol; }
inline bool exp_branch(double rho) { return std::abs(rho - 1.0) < kBranchTol; }

inline void check_rho(double rho) {
  if (!std::isfinite(rho) || rho > 1.0) {
    throw InvalidParameter("Bernstein family requires rho <= 1, got " + std::to_string(rho));
  }
}

inline void check_arg(double s) {
  if (std::isnan(s) || s < 0.0) {
    throw DomainError("penalty argument must be nonnegative, got " + std::to_string(s));
  }
}

// log(1 + (1 - rho) s); every power of the base is taken through exp/log so
// that large s never overflows.
inline double log_base(double rho, double s) { return std::log1p((1.0 - rho) * s); }

}  // namespace detail

/// Phi_rho(s) for rho <= 1, s >= 0.
inline double bernstein_phi(double rho, double s) {
  detail::check_rho(rho);
  detail::check_arg(s);
  if (detail::log_branch(rho)) return std::log1p(s);
  if (detail::exp_branch(rho)) return -std::expm1(-s);
  const double t = detail::log_base(rho, s);
  return -std::expm1(-rho / (1.0 - rho) * t) / rho;
}

/// Phi'_rho(s) = (1 + (1 - rho) s)^(-1/(1 - rho)).
inline double bernstein_phi_prime(double rho, double s) {
  detail::check_rho(rho);
  detail::check_arg(s);
  if (detail::log_branch(rho)) return 1.0 / (1.0 + s);
  if (detail::exp_branch(rho)) return std::exp(-s);
  return std::exp(-detail::log_base(rho, s) / (1.0 - rho));
}

/// Phi''_rho(s) = -(1 + (1 - rho) s)^(-(2 - rho)/(1 - rho)).
inline double bernstein_phi_double_prime(double rho, double s) {
  detail::check_rho(rho);
  detail::check_arg(s);
  if (detail::log_branch(rho)) return -1.0 / ((1.0 + s) * (1.0 + s));
  if (detail::exp_branch(rho)) return -std::exp(-s);
  return -std::exp(-(2.0 - rho) / (1.0 - rho) * detail::log_base(rho, s));
}

/// MCP base function M(t) = t - t^2/2 for t < 1, 1/2 otherwise.
inline double mcp_base(double t) { return t < 1.0 ? t - 0.5 * t * t : 0.5; }

/// M(alpha |b|).
inline double mcp_value(double b, double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw InvalidParameter("MCP alpha must be positive");
  }
  return mcp_base(alpha * std::abs(b));
}

/// Unscaled base function of the spec's family evaluated at s >= 0.
inline double phi(const PenaltySpec& spec, double s) {
  switch (spec.family) {
    case Family::bernstein:
      return bernstein_phi(spec.rho, s);
    case Family::mcp:
      detail::check_arg(s);
      return mcp_base(s);
    case Family::l1:
      detail::check_arg(s);
      return s;
  }
  return 0.0;
}

inline double phi_prime(const PenaltySpec& spec, double s) {
  switch (spec.family) {
    case Family::bernstein:
      return bernstein_phi_prime(spec.rho, s);
    case Family::mcp:
      detail::check_arg(s);
      return s < 1.0 ? 1.0 - s : 0.0;
    case Family::l1:
      detail::check_arg(s);
      return 1.0;
  }
  return 0.0;
}

/// MCP has no second derivative at s = 1; the left limit -1 is used on [0, 1).
inline double phi_double_prime(const PenaltySpec& spec, double s) {
  switch (spec.family) {
    case Family::bernstein:
      return bernstein_phi_double_prime(spec.rho, s);
    case Family::mcp:
      detail::check_arg(s);
      return s < 1.0 ? -1.0 : 0.0;
    case Family::l1:
      detail::check_arg(s);
      return 0.0;
  }
  return 0.0;
}

inline PenaltyEval evaluate(const PenaltySpec& spec, double s) {
  return {phi(spec, s), phi_prime(spec, s), phi_double_prime(spec, s)};
}

/// Phi(alpha |b|) / Phi(alpha): 0 at b = 0 and 1 at |b| = 1.
inline double scaled_penalty(const PenaltySpec& spec, double b) {
  spec.validate();
  return phi(spec, spec.alpha * std::abs(b)) / phi(spec, spec.alpha);
}

/// Maximum concavity of the scaled penalty, alpha^2 |Phi''(0)| / Phi(alpha).
/// Valid for the implemented families, whose -Phi'' peaks at the origin.
inline double max_concavity(const PenaltySpec& spec) {
  spec.validate();
  return spec.alpha * spec.alpha * std::abs(phi_double_prime(spec, 0.0)) / phi(spec, spec.alpha);
}

/// Density of the Levy measure at u, or an atom flag.
struct LevyValue {
  double density = 0.0;
  /// rho = 1: the measure is a unit point mass at u = 1 and has no density.
  bool atomic = false;
};

/// Generalized Gamma Levy density
///   (1-rho)^(-1/(1-rho)) / Gamma(1/(1-rho)) * u^(rho/(1-rho) - 1) * exp(-u/(1-rho)).
inline LevyValue levy_density(const PenaltySpec& spec, double u) {
  if (spec.family != Family::bernstein) {
    throw InvalidParameter("Levy density is defined for the Bernstein family only");
  }
  detail::check_rho(spec.rho);
  if (std::isnan(u) || u <= 0.0) {
    throw DomainError("Levy density requires u > 0, got " + std::to_string(u));
  }
  if (detail::exp_branch(spec.rho)) return {0.0, true};
  const double rho = spec.rho;
  const double shape = 1.0 / (1.0 - rho);
  const double log_norm = -shape * std::log(1.0 - rho) - std::lgamma(shape);
  const double log_density = log_norm + (rho * shape - 1.0) * std::log(u) - u * shape;
  return {std::exp(log_density), false};
}

}  // namespace bernstein
