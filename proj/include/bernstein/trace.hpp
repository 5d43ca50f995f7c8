#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace bernstein {

/// Per-epoch record of an iterative fit. objective[0] is F at the starting
/// point, so objective has one more entry than the step vectors.
struct SolverTrace {
  std::vector<double> objective;
  std::vector<double> step_norm;  // ||b(t+1) - b(t)||_2
  std::vector<double> step_max;   // ||b(t+1) - b(t)||_inf
  std::vector<double> decrease_margin;
  double c0 = 0.0;  // sufficient-decrease constant used for decrease_margin
  double kkt = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;

  void start(double f0) {
    objective.assign(1, f0);
    step_norm.clear();
    step_max.clear();
    decrease_margin.clear();
  }

  void push(double f, double sq_step, double max_step) {
    const double prev = objective.back();
    objective.push_back(f);
    step_norm.push_back(std::sqrt(sq_step));
    step_max.push_back(max_step);
    decrease_margin.push_back(prev - f - 0.5 * c0 * sq_step);
  }

  [[nodiscard]] std::size_t epochs() const { return step_norm.size(); }
};

struct DescentReport {
  bool monotone = true;
  double min_margin = std::numeric_limits<double>::infinity();
  double square_sum = 0.0;
};

/// monotone: F never rises by more than slack (1 + |F|). min_margin is the
/// smallest observed decrease per unit squared step.
inline DescentReport verify_descent(const SolverTrace& trace, double slack = 1e-10) {
  DescentReport report;
  for (std::size_t t = 0; t < trace.epochs(); ++t) {
    const double before = trace.objective[t];
    const double after = trace.objective[t + 1];
    if (after > before + slack * (1.0 + std::abs(before))) report.monotone = false;
    const double sq = trace.step_norm[t] * trace.step_norm[t];
    report.min_margin = std::min(report.min_margin, (before - after) / std::max(sq, 1e-30));
    report.square_sum += sq;
  }
  return report;
}

/// True when the partial sums of step norms grew by less than rel_growth over
/// the last `window` epochs. Runs shorter than the window are compared against
/// their first step.
inline bool length_plateaued(const SolverTrace& trace, std::size_t window = 10,
                             double rel_growth = 1e-6) {
  const std::size_t n = trace.epochs();
  if (n == 0) return true;
  double total = 0.0;
  double head = 0.0;
  const std::size_t cut = n > window ? n - window : 1;
  for (std::size_t t = 0; t < n; ++t) {
    total += trace.step_norm[t];
    if (t + 1 == cut) head = total;
  }
  if (total == 0.0) return true;
  return (total - head) / total < rel_growth;
}

}  // namespace bernstein
