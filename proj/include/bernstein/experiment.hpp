#pragma once

// Simulation study: CV-tuned path fits of several penalties over seeded repeats.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bernstein/cd_solver.hpp"
#include "bernstein/cv.hpp"
#include "bernstein/data.hpp"
#include "bernstein/penalty.hpp"

namespace bernstein {

struct MethodSpec {
  std::string label;
  PenaltySpec family;
  std::vector<double> alphas;
};

/// Row order LOG, EXP, LFR, MCP, Lasso. The lasso objective does not depend
/// on alpha, so it gets a single alpha column.
inline std::vector<MethodSpec> table2_methods() {
  const auto a = PathGrid::default_alphas();
  return {{"LOG", PenaltySpec::log(), a},
          {"EXP", PenaltySpec::exp(), a},
          {"LFR", PenaltySpec::lfr(), a},
          {"MCP", PenaltySpec::mcp(), a},
          {"Lasso", PenaltySpec::l1(), {1.0}}};
}

struct StudyOptions {
  std::string scenario = "data1";
  int repeats = 25;
  std::uint64_t seed = 0;  // repeat r uses seed + r for data and folds
  int folds = 5;
  int n_test = 10000;
  int n_eta = 50;
  double eta_ratio = 0.0;  // 0 picks 1e-2 when p > n and 1e-3 otherwise
  CDConfig cd;
  std::vector<MethodSpec> methods = table2_methods();
};

struct RepeatResult {
  int repeat = 0;
  std::string method;
  double spe = 0.0;
  double fse = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  Eigen::Index nnz = 0;
};

struct StudyRow {
  std::string method;
  double spe_mean = 0.0;
  double spe_std = 0.0;  // sample standard deviation over repeats
  double fse_mean = 0.0;
  int repeats = 0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<RepeatResult> runs;  // sorted by repeat, then method order
};

/// One repeat for one method: CV on the training set, refit the path on all
/// training rows, evaluate the selected cell on the test set.
inline RepeatResult run_method(const Simulation& sim, const SimScenario& sc, const MethodSpec& m,
                               const StudyOptions& opt, std::uint64_t fold_seed) {
  const Standardized st = standardize(sim.train.X, sim.train.y);
  const double ratio = opt.eta_ratio > 0.0 ? opt.eta_ratio : (st.X.cols() > st.X.rows() ? 1e-2 : 1e-3);
  const PathGrid grid = PathGrid::make_default(st.X, st.y, opt.n_eta, ratio, m.alphas);
  CvOptions cv;
  cv.folds = opt.folds;
  cv.seed = fold_seed;
  cv.cd = opt.cd;
  const CvResult pick = cv_select(sim.train.X, sim.train.y, grid, LossKind::squared(), m.family, cv);
  const PathSolution sol = fit_path(st.X, st.y, grid, m.family, opt.cd, st.back);
  const PathCell& c = sol.cell(pick.k, pick.l);
  if (!c.fitted()) throw NumericalError("selected cell was not fitted on the full training set");
  RepeatResult r;
  r.method = m.label;
  r.spe = spe(c.coef, sim.test, sim.sigma, c.intercept);
  r.fse = fse(c.coef, sc.true_b);
  r.alpha = c.alpha;
  r.eta = c.eta;
  r.nnz = c.nnz();
  return r;
}

inline StudyResult run_study(const StudyOptions& opt,
                             const std::function<void(const RepeatResult&)>& progress = {}) {
  if (opt.repeats < 1) throw InvalidParameter("repeats must be at least 1");
  StudyResult out;
  for (int rep = 0; rep < opt.repeats; ++rep) {
    const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(rep);
    const SimScenario sc = scenario_by_name(opt.scenario, seed);
    const Simulation sim = simulate(sc, opt.n_test);
    for (const auto& m : opt.methods) {
      RepeatResult r = run_method(sim, sc, m, opt, seed);
      r.repeat = rep;
      if (progress) progress(r);
      out.runs.push_back(r);
    }
  }
  for (const auto& m : opt.methods) {
    StudyRow row;
    row.method = m.label;
    double s = 0.0, s2 = 0.0, f = 0.0;
    for (const auto& r : out.runs) {
      if (r.method != m.label) continue;
      s += r.spe;
      s2 += r.spe * r.spe;
      f += r.fse;
      ++row.repeats;
    }
    const double n = row.repeats;
    row.spe_mean = s / n;
    row.fse_mean = f / n;
    row.spe_std = row.repeats > 1 ? std::sqrt(std::max(0.0, (s2 - n * row.spe_mean * row.spe_mean) / (n - 1))) : 0.0;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace bernstein
