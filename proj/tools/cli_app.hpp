#pragma once

// Command-line front end: simulate, fit-path, fit-classify,
// reproduce-table2, emit-curves, threshold-sweep.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bernstein/cd_solver.hpp"
#include "bernstein/cv.hpp"
#include "bernstein/data.hpp"
#include "bernstein/experiment.hpp"
#include "bernstein/io.hpp"
#include "bernstein/palm_solver.hpp"
#include "bernstein/penalty.hpp"
#include "bernstein/thresholding.hpp"
#include "bernstein/trace.hpp"

namespace bernstein::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

inline constexpr const char* kVersion = "0.1.0";

namespace detail {

inline std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

inline SkipPolicy parse_skip_policy(const std::string& s) {
  if (s == "skip") return SkipPolicy::paper_faithful;
  if (s == "case2") return SkipPolicy::compute_case2;
  throw InvalidParameter("unknown skip policy '" + s + "' (expected skip or case2)");
}

inline LossKind parse_loss(const std::string& s, double delta) {
  if (s == "logistic") return LossKind::logistic();
  if (s == "huber") return LossKind::huber(delta);
  if (s == "squared") return LossKind::squared();
  throw InvalidParameter("unknown loss '" + s + "' (expected logistic, huber or squared)");
}

// lambda from either --lambda or --eta (lambda = eta / Phi(alpha)).
inline double resolve_lambda(const PenaltySpec& spec, std::optional<double> lambda, std::optional<double> eta) {
  if (lambda && eta) throw InvalidParameter("give --lambda or --eta, not both");
  if (lambda) return *lambda;
  if (eta) return path_lambda(spec, *eta);
  throw InvalidParameter("one of --lambda or --eta is required");
}

// sigma recorded by `simulate` next to a test file, if any.
inline std::optional<double> sidecar_sigma(const std::string& data_path) {
  const fs::path meta = fs::path(data_path).parent_path() / "metadata.json";
  std::ifstream in(meta);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    if (j.contains("sigma")) return j["sigma"].get<double>();
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

inline json grid_json(const PathGrid& g) { return {{"alphas", g.alphas}, {"etas", g.etas}}; }

}  // namespace detail

struct SimulateArgs {
  std::string scenario = "data1";
  std::uint64_t seed = 0;
  int n_test = 10000;
  std::string out_dir;
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& log) {
  const SimScenario sc = scenario_by_name(a.scenario, a.seed);
  const Simulation sim = simulate(sc, a.n_test);
  const fs::path dir(a.out_dir);
  write_dataset_csv(detail::join(dir, "train.csv"), sim.train);
  write_dataset_csv(detail::join(dir, "test.csv"), sim.test);
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < sc.p; ++j)
    if (sc.true_b[j] != 0.0) support.push_back(j + 1);
  std::vector<json> blocks;
  for (const auto& b : sc.cov_blocks) blocks.push_back({{"size", b.size}, {"ar", b.ar}});
  detail::write_json(detail::join(dir, "metadata.json"),
                     {{"command", "simulate"},
                      {"scenario", sc.name},
                      {"n", sc.n},
                      {"p", sc.p},
                      {"n_test", a.n_test},
                      {"seed", a.seed},
                      {"snr", sc.snr},
                      {"sigma", sim.sigma},
                      {"cov_blocks", blocks},
                      {"true_support", support},
                      {"true_values", std::vector<double>(support.size(), 1.0)}});
  log << "wrote " << sc.n << " x " << sc.p << " training and " << a.n_test << " test rows to " << a.out_dir
      << '\n';
  return kOk;
}

struct FitPathArgs {
  std::string train;
  std::string format = "csv";
  std::string penalty = "lfr";
  std::vector<double> alphas;
  std::vector<double> etas;
  int n_eta = 50;
  double eta_ratio = 1e-3;
  double tol = 1e-7;
  int max_sweeps = 10000;
  std::string skip_policy = "skip";
  std::string out_dir;
  std::string evaluate;
  bool cv = false;
  int folds = 5;
  std::uint64_t seed = 0;
  std::optional<double> sigma;
};

inline int cmd_fit_path(const FitPathArgs& a, std::ostream& log) {
  const PenaltySpec family = parse_penalty(a.penalty);
  CDConfig cfg;
  cfg.tol = a.tol;
  cfg.max_sweeps = a.max_sweeps;
  cfg.skip_policy = detail::parse_skip_policy(a.skip_policy);
  cfg.validate();

  const LoadedTable table = load_table(a.train, parse_table_format(a.format), LabelHint::continuous);
  for (const auto& n : table.notices) log << "note: " << n << '\n';
  const Standardized st = standardize(table.data.X, table.data.y);

  std::vector<double> alphas = a.alphas;
  if (alphas.empty()) alphas = family.family == Family::l1 ? std::vector<double>{1.0} : PathGrid::default_alphas();
  PathGrid grid;
  if (a.etas.empty()) {
    grid = PathGrid::make_default(st.X, st.y, a.n_eta, a.eta_ratio, alphas);
  } else {
    grid.etas = a.etas;
    grid.alphas = alphas;
  }
  grid.validate();

  const PathSolution sol = fit_path(st.X, st.y, grid, family, cfg, st.back);
  const fs::path dir(a.out_dir);
  const Eigen::Index p = st.X.cols();

  CsvWriter path_csv(detail::join(dir, "path.csv"), {"alpha", "eta", "status", "sweeps", "objective", "nnz"});
  std::vector<std::string> coef_header{"alpha", "eta", "intercept"};
  for (Eigen::Index j = 0; j < p; ++j) {
    coef_header.push_back(table.columns.size() == static_cast<std::size_t>(p) ? table.columns[static_cast<std::size_t>(j)]
                                                                             : "b" + std::to_string(j + 1));
  }
  CsvWriter coef_csv(detail::join(dir, "coefficients.csv"), coef_header);
  CsvWriter diag_csv(detail::join(dir, "diagnostics.csv"),
                     {"alpha", "eta", "lambda", "kkt", "eigen_margin", "eigen_margin_normalized",
                      "strict_dual_feasible", "support_size", "strict_local_min"});

  for (std::size_t k = 0; k < grid.alphas.size(); ++k) {
    for (std::size_t l = 0; l < grid.etas.size(); ++l) {
      const PathCell& c = sol.cell(k, l);
      path_csv.row({format_double(c.alpha), format_double(c.eta), to_string(c.status), std::to_string(c.sweeps),
                    format_double(c.objective), std::to_string(c.fitted() ? c.nnz() : 0)});
      if (!c.fitted()) continue;
      std::vector<double> row{c.alpha, c.eta, c.intercept};
      for (Eigen::Index j = 0; j < p; ++j) row.push_back(c.coef[j]);
      coef_csv.row(row);
      const PenaltySpec spec = family.with_alpha(c.alpha);
      const double kkt = kkt_residual(c.coef_std, st.X, st.y, c.lambda, spec);
      std::vector<std::string> d{format_double(c.alpha), format_double(c.eta), format_double(c.lambda),
                                 format_double(kkt)};
      try {
        const LocalMinReport r = check_local_min(c.coef_std, st.X, st.y, c.lambda, spec);
        d.insert(d.end(), {format_double(r.eigen_margin), format_double(r.eigen_margin_normalized),
                           r.strict_dual_feasible ? "true" : "false", std::to_string(r.support_size),
                           r.strict() ? "true" : "false"});
      } catch (const ContractViolation&) {
        // not stationary to the checker's tolerance (max_sweeps cells)
        d.insert(d.end(), {"nan", "nan", "false", "0", "false"});
      }
      diag_csv.row(d);
    }
  }

  json meta{{"command", "fit-path"}, {"train", a.train}, {"penalty", family.name()}, {"n", st.X.rows()},
            {"p", p}, {"tol", cfg.tol}, {"max_sweeps", cfg.max_sweeps}, {"skip_policy", a.skip_policy},
            {"grid", detail::grid_json(grid)}, {"warnings", sol.warnings}};

  if (a.cv || !a.evaluate.empty()) {
    CvOptions opt;
    opt.folds = a.folds;
    opt.seed = a.seed;
    opt.cd = cfg;
    const CvResult pick = cv_select(table.data.X, table.data.y, grid, LossKind::squared(), family, opt);
    const PathCell& c = sol.cell(pick.k, pick.l);
    json sel{{"alpha", pick.best_alpha}, {"eta", pick.best_eta}, {"folds", a.folds}, {"seed", a.seed},
             {"cv_loss", pick.mean_loss(static_cast<Eigen::Index>(pick.k), static_cast<Eigen::Index>(pick.l))},
             {"nnz", c.fitted() ? c.nnz() : 0}};
    if (!a.evaluate.empty()) {
      if (!c.fitted()) throw NumericalError("selected cell was not fitted on the full data");
      const LoadedTable test = load_table(a.evaluate, parse_table_format(a.format), LabelHint::continuous);
      if (test.data.p() != p) throw DataError("test file has " + std::to_string(test.data.p()) + " features, expected " + std::to_string(p));
      const Vector resid = (test.data.y - test.data.X * c.coef).array() - c.intercept;
      sel["test_mse"] = resid.squaredNorm() / static_cast<double>(test.data.n());
      const std::optional<double> sigma = a.sigma ? a.sigma : detail::sidecar_sigma(a.evaluate);
      if (sigma) {
        sel["spe"] = spe(c.coef, test.data, *sigma, c.intercept);
        sel["sigma"] = *sigma;
      }
      log << "selected alpha=" << format_double(pick.best_alpha) << " eta=" << format_double(pick.best_eta);
      if (sigma) log << " SPE=" << format_double(sel["spe"].get<double>());
      log << '\n';
    }
    detail::write_json(detail::join(dir, "selection.json"), sel);
    meta["selection"] = sel;
  }
  for (const auto& w : sol.warnings) log << "warning: " << w << '\n';
  detail::write_json(detail::join(dir, "metadata.json"), meta);
  return kOk;
}

struct FitClassifyArgs {
  std::string train;
  std::string test;
  std::string format = "csv";
  std::string loss = "logistic";
  double delta = 1.0;
  std::string penalty = "lfr";
  double alpha = 1.0;
  std::optional<double> eta;
  std::optional<double> lambda;
  double tol = 1e-6;
  int max_epochs = 5000;
  std::string out_dir;
};

inline int cmd_fit_classify(const FitClassifyArgs& a, std::ostream& log) {
  const LossKind loss = detail::parse_loss(a.loss, a.delta);
  const PenaltySpec spec = parse_penalty(a.penalty, a.alpha);
  const double lambda = detail::resolve_lambda(spec, a.lambda, a.eta);
  PalmConfig cfg;
  cfg.tol = a.tol;
  cfg.max_epochs = a.max_epochs;
  cfg.validate();

  const LabelHint hint = loss.type == LossKind::Type::logistic ? LabelHint::binary : LabelHint::continuous;
  const TableFormat format = parse_table_format(a.format);
  const LoadedTable train = load_table(a.train, format, hint);
  for (const auto& n : train.notices) log << "note: " << n << '\n';
  const Standardized st = standardize_for(loss, train.data.X, train.data.y);
  const PalmResult res = fit_palm(st.X, st.y, loss, lambda, spec, cfg);

  const fs::path dir(a.out_dir);
  const Vector coef = st.back.coef(res.coef);
  const double intercept = st.back.intercept(res.coef);
  {
    CsvWriter w(detail::join(dir, "coefficients.csv"), {"feature", "coefficient"});
    w.row({std::string("intercept"), format_double(intercept)});
    for (Eigen::Index j = 0; j < coef.size(); ++j) {
      const std::string name = train.columns.size() == static_cast<std::size_t>(coef.size())
                                   ? train.columns[static_cast<std::size_t>(j)]
                                   : "b" + std::to_string(j + 1);
      w.row({name, format_double(coef[j])});
    }
  }
  {
    CsvWriter w(detail::join(dir, "trace.csv"), {"epoch", "objective", "step_norm", "decrease_margin"});
    const SolverTrace& t = res.trace;
    w.row({"0", format_double(t.objective[0]), "nan", "nan"});
    for (std::size_t e = 0; e < t.step_norm.size(); ++e) {
      w.row({std::to_string(e + 1), format_double(t.objective[e + 1]), format_double(t.step_norm[e]),
             format_double(t.decrease_margin[e])});
    }
  }
  const DescentReport descent = verify_descent(res.trace);
  json summary{{"command", "fit-classify"}, {"train", a.train}, {"loss", loss.name()},
               {"penalty", spec.name()},    {"alpha", spec.alpha}, {"lambda", lambda},
               {"tol", cfg.tol},            {"converged", res.converged}, {"epochs", res.epochs},
               {"kkt", res.trace.kkt},      {"monotone", descent.monotone},
               {"nnz", (res.coef.array() != 0.0).count()}, {"warnings", res.trace.warnings}};
  if (loss.type == LossKind::Type::huber) summary["delta"] = loss.delta;
  if (!a.test.empty()) {
    const LoadedTable test = load_table(a.test, format, hint);
    if (test.data.p() != coef.size()) throw DataError("test file width does not match the training data");
    if (test.data.label_kind == LabelKind::binary) {
      summary["accuracy"] = accuracy(coef, test.data, intercept);
      log << "test accuracy " << format_double(summary["accuracy"].get<double>()) << '\n';
    } else {
      const Vector r = (test.data.y - test.data.X * coef).array() - intercept;
      summary["test_mse"] = r.squaredNorm() / static_cast<double>(test.data.n());
    }
  }
  for (const auto& w : res.trace.warnings) log << "warning: " << w << '\n';
  detail::write_json(detail::join(dir, "summary.json"), summary);
  return kOk;
}

struct Table2Args {
  std::vector<std::string> scenarios{"data1"};
  int repeats = 25;
  std::uint64_t seed = 0;
  int folds = 5;
  int n_test = 10000;
  int n_eta = 50;
  double eta_ratio = 0.0;
  std::string skip_policy = "skip";
  std::string out_dir;
};

inline int cmd_reproduce_table2(const Table2Args& a, std::ostream& log) {
  if (a.repeats < 1) throw InvalidParameter("--repeats must be at least 1");
  const fs::path dir(a.out_dir);
  CsvWriter table(detail::join(dir, "table2.csv"), {"scenario", "method", "spe_mean", "spe_std", "fse_mean", "repeats"});
  CsvWriter runs(detail::join(dir, "runs.csv"), {"scenario", "repeat", "method", "spe", "fse", "alpha", "eta", "nnz"});
  json meta{{"command", "reproduce-table2"}, {"repeats", a.repeats}, {"seed", a.seed},     {"folds", a.folds},
            {"n_test", a.n_test},            {"n_eta", a.n_eta},     {"eta_ratio", a.eta_ratio},
            {"skip_policy", a.skip_policy},  {"scenarios", a.scenarios}};
  for (const auto& name : a.scenarios) {
    scenario_by_name(name);  // reject unknown names before any work
  }
  for (const auto& name : a.scenarios) {
    StudyOptions opt;
    opt.scenario = name;
    opt.repeats = a.repeats;
    opt.seed = a.seed;
    opt.folds = a.folds;
    opt.n_test = a.n_test;
    opt.n_eta = a.n_eta;
    opt.eta_ratio = a.eta_ratio;
    opt.cd.skip_policy = detail::parse_skip_policy(a.skip_policy);
    const StudyResult res = run_study(opt, [&](const RepeatResult& r) {
      log << name << " repeat " << r.repeat << ' ' << r.method << " SPE " << format_double(r.spe) << '\n';
      runs.row({name, std::to_string(r.repeat), r.method, format_double(r.spe), format_double(r.fse),
                format_double(r.alpha), format_double(r.eta), std::to_string(r.nnz)});
    });
    for (const auto& row : res.rows) {
      table.row({name, row.method, format_double(row.spe_mean), format_double(row.spe_std),
                 format_double(row.fse_mean), std::to_string(row.repeats)});
    }
  }
  detail::write_json(detail::join(dir, "metadata.json"), meta);
  return kOk;
}

struct CurvesArgs {
  std::vector<double> rhos{-1.0, 0.0, 0.5, 1.0};
  double s_min = 0.0;
  double s_max = 10.0;
  double step = 0.01;
  std::string out_dir;
};

// Phi_2(s) = (1 - (1 - s)^2) / 2, the polynomial MCP caps at s = 1.
inline double phi2(double s) { return 0.5 * (1.0 - (1.0 - s) * (1.0 - s)); }

inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) throw InvalidParameter("grid needs finite lo <= hi");
  if (!(step > 0.0)) throw InvalidParameter("grid step must be positive");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 10'000'000) throw InvalidParameter("grid has more than 1e7 points");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo + static_cast<double>(i) * step;
  return g;
}

inline int cmd_emit_curves(const CurvesArgs& a, std::ostream& log) {
  if (a.s_min < 0.0) throw InvalidParameter("--s-min must be nonnegative, got " + format_double(a.s_min));
  for (double r : a.rhos) PenaltySpec::bernstein(r);
  const std::vector<double> s = linear_grid(a.s_min, a.s_max, a.step);
  const fs::path dir(a.out_dir);
  std::vector<std::string> files;
  for (double r : a.rhos) {
    const std::string name = "curve_rho_" + format_double(r) + ".csv";
    CsvWriter w(detail::join(dir, name), {"s", "phi", "dphi"});
    for (double v : s) w.row(std::vector<double>{v, bernstein_phi(r, v), bernstein_phi_prime(r, v)});
    files.push_back(name);
  }
  {
    CsvWriter w(detail::join(dir, "phi2_vs_mcp.csv"), {"s", "phi2", "mcp"});
    for (double v : s) w.row(std::vector<double>{v, phi2(v), mcp_base(v)});
    files.push_back("phi2_vs_mcp.csv");
  }
  detail::write_json(detail::join(dir, "metadata.json"),
                     {{"command", "emit-curves"}, {"rhos", a.rhos}, {"s_min", a.s_min}, {"s_max", a.s_max},
                      {"step", a.step}, {"files", files}});
  log << "wrote " << files.size() << " files with " << s.size() << " points each\n";
  return kOk;
}

struct SweepArgs {
  std::string penalty = "lfr";
  double alpha = 1.0;
  std::optional<double> eta;
  std::optional<double> lambda;
  double z_min = -5.0;
  double z_max = 5.0;
  double step = 0.01;
  std::string out;
};

inline int cmd_threshold_sweep(const SweepArgs& a, std::ostream& log) {
  const PenaltySpec spec = parse_penalty(a.penalty, a.alpha);
  const double lambda = detail::resolve_lambda(spec, a.lambda, a.eta);
  const Thresholder op(spec, lambda);
  const std::vector<double> z = linear_grid(a.z_min, a.z_max, a.step);
  {
    CsvWriter w(a.out, {"z", "estimate", "case"});
    for (double v : z) {
      const ThresholdResult r = op.apply(v);
      w.row({format_double(v), format_double(r.estimate), to_string(r.regime)});
    }
  }
  json meta{{"command", "threshold-sweep"}, {"penalty", spec.name()}, {"alpha", spec.alpha},
            {"lambda", lambda},             {"case", to_string(op.regime())}, {"boundary", op.boundary()},
            {"stationary_boundary", op.stationary_boundary()}};
  if (op.s_star()) meta["s_star"] = *op.s_star();
  detail::write_json(fs::path(a.out).replace_extension(".json").string(), meta);
  log << "case " << to_string(op.regime()) << ", zero for |z| <= " << format_double(op.boundary()) << '\n';
  return kOk;
}

/// Parses argv and runs one subcommand. Messages go to `log`, errors to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Sparse regression and classification with Bernstein-function penalties", "bernstein"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "INI file with one [section] per subcommand; flags win");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Draw a block-AR(1) training/test pair");
  c_sim->add_option("--scenario", sim.scenario, "data1, data2 or data3")->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->capture_default_str();
  c_sim->add_option("--n-test", sim.n_test, "Test rows")->capture_default_str();
  c_sim->add_option("--out-dir", sim.out_dir)->required()->check(CLI::ExistingDirectory);

  FitPathArgs fp;
  auto* c_fp = app.add_subcommand("fit-path", "Coordinate descent over an (alpha, eta) grid, squared loss");
  c_fp->add_option("--train", fp.train)->required()->check(CLI::ExistingFile);
  c_fp->add_option("--format", fp.format, "csv or svmlight")->capture_default_str();
  c_fp->add_option("--penalty", fp.penalty, "kep, log, lfr, exp, mcp, l1")->capture_default_str();
  c_fp->add_option("--alphas", fp.alphas, "Comma-separated alpha grid")->delimiter(',');
  c_fp->add_option("--etas", fp.etas, "Comma-separated eta grid (default: geometric)")->delimiter(',');
  c_fp->add_option("--n-eta", fp.n_eta)->capture_default_str();
  c_fp->add_option("--eta-ratio", fp.eta_ratio, "Smallest eta / largest")->capture_default_str();
  c_fp->add_option("--tol", fp.tol)->capture_default_str();
  c_fp->add_option("--max-sweeps", fp.max_sweeps)->capture_default_str();
  c_fp->add_option("--skip-policy", fp.skip_policy, "skip (leave nonconvex cells unfitted) or case2")->capture_default_str();
  c_fp->add_option("--out-dir", fp.out_dir)->required()->check(CLI::ExistingDirectory);
  c_fp->add_option("--evaluate", fp.evaluate, "Test file scored at the CV-selected cell")->check(CLI::ExistingFile);
  c_fp->add_flag("--cv", fp.cv, "Run cross validation without a test file");
  c_fp->add_option("--folds", fp.folds)->capture_default_str();
  c_fp->add_option("--seed", fp.seed, "Fold assignment seed")->capture_default_str();
  c_fp->add_option("--sigma", fp.sigma, "Noise level for SPE (default: from metadata.json)");

  FitClassifyArgs fc;
  auto* c_fc = app.add_subcommand("fit-classify", "PALM fit with logistic or Huber loss");
  c_fc->add_option("--train", fc.train)->required()->check(CLI::ExistingFile);
  c_fc->add_option("--test", fc.test)->check(CLI::ExistingFile);
  c_fc->add_option("--format", fc.format)->capture_default_str();
  c_fc->add_option("--loss", fc.loss, "logistic or huber")->capture_default_str();
  c_fc->add_option("--delta", fc.delta, "Huber knot")->capture_default_str();
  c_fc->add_option("--penalty", fc.penalty)->capture_default_str();
  c_fc->add_option("--alpha", fc.alpha)->capture_default_str();
  c_fc->add_option("--eta", fc.eta, "lambda = eta / Phi(alpha)");
  c_fc->add_option("--lambda", fc.lambda);
  c_fc->add_option("--tol", fc.tol)->capture_default_str();
  c_fc->add_option("--max-epochs", fc.max_epochs)->capture_default_str();
  c_fc->add_option("--out-dir", fc.out_dir)->required()->check(CLI::ExistingDirectory);

  Table2Args t2;
  auto* c_t2 = app.add_subcommand("reproduce-table2", "Repeated simulation study over five penalties");
  c_t2->add_option("--scenario", t2.scenarios, "data1, data2, data3 (repeatable)")->delimiter(',')->capture_default_str();
  c_t2->add_option("--repeats", t2.repeats)->capture_default_str();
  c_t2->add_option("--seed", t2.seed, "Repeat r uses seed + r")->capture_default_str();
  c_t2->add_option("--folds", t2.folds)->capture_default_str();
  c_t2->add_option("--n-test", t2.n_test)->capture_default_str();
  c_t2->add_option("--n-eta", t2.n_eta)->capture_default_str();
  c_t2->add_option("--eta-ratio", t2.eta_ratio, "0 picks 1e-2 when p > n, else 1e-3")->capture_default_str();
  c_t2->add_option("--skip-policy", t2.skip_policy)->capture_default_str();
  c_t2->add_option("--out-dir", t2.out_dir)->required()->check(CLI::ExistingDirectory);

  CurvesArgs cu;
  auto* c_cu = app.add_subcommand("emit-curves", "Tabulate Phi_rho, Phi'_rho and the MCP comparison");
  c_cu->add_option("--rho", cu.rhos, "Comma-separated rho values")->delimiter(',')->capture_default_str();
  c_cu->add_option("--s-min", cu.s_min)->capture_default_str();
  c_cu->add_option("--s-max", cu.s_max)->capture_default_str();
  c_cu->add_option("--step", cu.step)->capture_default_str();
  c_cu->add_option("--out-dir", cu.out_dir)->required()->check(CLI::ExistingDirectory);

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("threshold-sweep", "Scalar thresholding operator over a z grid");
  c_sw->add_option("--penalty", sw.penalty)->capture_default_str();
  c_sw->add_option("--alpha", sw.alpha)->capture_default_str();
  c_sw->add_option("--eta", sw.eta);
  c_sw->add_option("--lambda", sw.lambda);
  c_sw->add_option("--z-min", sw.z_min)->capture_default_str();
  c_sw->add_option("--z-max", sw.z_max)->capture_default_str();
  c_sw->add_option("--step", sw.step)->capture_default_str();
  c_sw->add_option("--out", sw.out, "CSV path; a .json sidecar is written next to it")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    log << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    log << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim, log);
    if (c_fp->parsed()) return cmd_fit_path(fp, log);
    if (c_fc->parsed()) return cmd_fit_classify(fc, log);
    if (c_t2->parsed()) return cmd_reproduce_table2(t2, log);
    if (c_cu->parsed()) return cmd_emit_curves(cu, log);
    if (c_sw->parsed()) {
      const fs::path parent = fs::path(sw.out).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) {
        throw InvalidParameter("output directory '" + parent.string() + "' does not exist");
      }
      return cmd_threshold_sweep(sw, log);
    }
  } catch (const InvalidParameter& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const ContractViolation& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace bernstein::cli
