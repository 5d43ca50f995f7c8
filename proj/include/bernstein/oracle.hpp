#pragma once

// Brute-force minimizer of the scalar problem 1/2 (z - b)^2 + lambda Phi(alpha |b|).
// It shares nothing with the thresholding operators beyond the penalty
// evaluation and is used to check them.

#include <cmath>
#include <vector>

#include "bernstein/errors.hpp"
#include "bernstein/penalty.hpp"

namespace bernstein {

namespace detail {

template <class F>
double golden_section(F&& f, double lo, double hi, double xtol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Dense scan of [-grid_radius, grid_radius] on grid_points nodes, then golden
/// section refinement inside the cells around every grid-local minimum. The
/// origin is always a candidate. Ties go to the smaller |b|.
inline double oracle_minimize(double z, double lambda, const PenaltySpec& spec, double grid_radius,
                              long grid_points) {
  if (grid_points < 10000) throw InvalidParameter("oracle needs at least 1e4 grid points");
  if (!(grid_radius > 0.0)) throw InvalidParameter("oracle grid radius must be positive");
  spec.validate();
  auto objective = [&](double b) {
    const double d = z - b;
    return 0.5 * d * d + lambda * phi(spec, spec.alpha * std::abs(b));
  };

  const double step = 2.0 * grid_radius / static_cast<double>(grid_points - 1);
  std::vector<double> values(static_cast<std::size_t>(grid_points));
  for (long i = 0; i < grid_points; ++i) {
    values[static_cast<std::size_t>(i)] = objective(-grid_radius + step * static_cast<double>(i));
  }

  double best = 0.0;
  double best_val = objective(0.0);
  auto consider = [&](double b) {
    const double v = objective(b);
    if (v < best_val || (v == best_val && std::abs(b) < std::abs(best))) {
      best_val = v;
      best = b;
    }
  };
  const double xtol = 1e-13 * std::max(1.0, grid_radius);
  for (long i = 0; i < grid_points; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const bool left_ok = i == 0 || values[k] <= values[k - 1];
    const bool right_ok = i == grid_points - 1 || values[k] <= values[k + 1];
    if (!left_ok || !right_ok) continue;
    const double lo = -grid_radius + step * static_cast<double>(std::max(i - 1, 0L));
    const double hi = -grid_radius + step * static_cast<double>(std::min(i + 1, grid_points - 1));
    consider(detail::golden_section(objective, lo, hi, xtol));
  }
  return best;
}

}  // namespace bernstein
