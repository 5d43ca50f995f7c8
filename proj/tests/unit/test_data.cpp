#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "bernstein/cv.hpp"
#include "bernstein/data.hpp"
#include "bernstein/io.hpp"
#include "random_design.hpp"

using namespace bernstein;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("bernstein_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content = {}) const {
    const auto p = (path_ / name).string();
    if (!content.empty()) std::ofstream(p) << content;
    return p;
  }
  const fs::path& path() const { return path_; }

private:
  fs::path path_;
  static inline int counter_ = 0;
};

}  // namespace

TEST(Simulate, Data1Shape) {
  const auto sc = SimScenario::data1(7);
  EXPECT_EQ(sc.n, 100);
  EXPECT_EQ(sc.p, 200);
  std::vector<Eigen::Index> nz;
  for (Eigen::Index j = 0; j < sc.p; ++j)
    if (sc.true_b[j] != 0.0) nz.push_back(j);
  ASSERT_EQ(nz.size(), 10u);
  for (std::size_t i = 0; i < nz.size(); ++i) EXPECT_EQ(nz[i], static_cast<Eigen::Index>(20 * i));
  const auto sim = simulate(sc, 50);
  EXPECT_EQ(sim.train.X.rows(), 100);
  EXPECT_EQ(sim.train.X.cols(), 200);
  EXPECT_EQ(sim.test.X.rows(), 50);
}

TEST(Simulate, Data2And3) {
  const auto d2 = SimScenario::data2();
  EXPECT_EQ(d2.n, 500);
  EXPECT_EQ(d2.p, 1000);
  EXPECT_EQ(d2.cov_blocks.size(), 5u);
  EXPECT_EQ((d2.true_b.array() != 0.0).count(), 50);
  const auto d3 = SimScenario::data3();
  EXPECT_EQ(d3.p, 2000);
  EXPECT_EQ(d3.cov_blocks.size(), 10u);
  EXPECT_EQ((d3.true_b.array() != 0.0).count(), 100);
  EXPECT_THROW(scenario_by_name("data4"), InvalidParameter);
}

TEST(Simulate, Validation) {
  auto sc = SimScenario::data1();
  sc.cov_blocks[0].ar = 1.0;
  EXPECT_THROW(simulate(sc, 10), InvalidParameter);
  sc = SimScenario::data1();
  sc.cov_blocks[0].size = 199;
  EXPECT_THROW(simulate(sc, 10), InvalidParameter);
  sc = SimScenario::data1();
  sc.snr = 0.0;
  EXPECT_THROW(simulate(sc, 10), InvalidParameter);
}

TEST(Simulate, Reproducible) {
  const auto a = simulate(SimScenario::data1(42), 20);
  const auto b = simulate(SimScenario::data1(42), 20);
  const auto c = simulate(SimScenario::data1(43), 20);
  EXPECT_TRUE(a.train.X == b.train.X);
  EXPECT_TRUE(a.train.y == b.train.y);
  EXPECT_TRUE(a.test.y == b.test.y);
  EXPECT_FALSE(a.train.X == c.train.X);
}

TEST(Simulate, CovarianceAndSnr) {
  SimScenario sc;
  sc.n = 50000;
  sc.p = 10;
  sc.true_b = Vector::Zero(10);
  sc.true_b[0] = 1.0;
  sc.true_b[5] = -0.5;
  sc.cov_blocks = {{10, 0.7}};
  sc.seed = 3;
  const auto sim = simulate(sc, 0);
  const Matrix& X = sim.train.X;
  const Matrix C = (X.transpose() * X) / static_cast<double>(X.rows());
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) EXPECT_NEAR(C(i, j), std::pow(0.7, std::abs(i - j)), 0.02);

  const auto d1 = simulate(SimScenario::data1(5), 10000);
  const Vector signal = d1.test.X * SimScenario::data1().true_b;
  const double snr = std::sqrt(signal.squaredNorm() / 10000.0) / d1.sigma;
  EXPECT_NEAR(snr, 3.0, 0.15);
  EXPECT_NEAR(d1.sigma, std::sqrt(signal_variance(SimScenario::data1())) / 3.0, 1e-15);
}

TEST(Metrics, Spe) {
  // The truth scores 1 up to Monte-Carlo error; average a few seeds.
  double avg = 0.0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto s = SimScenario::data1(seed);
    const auto d = simulate(s, 10000);
    avg += spe(s.true_b, d.test, d.sigma) / 8.0;
  }
  EXPECT_NEAR(avg, 1.0, 0.02);
  const auto sc = SimScenario::data1(9);
  const auto sim = simulate(sc, 10000);
  EXPECT_NEAR(spe(Vector::Zero(200), sim.test, sim.sigma), 10.0, 0.5);
  Dataset empty;
  empty.X.resize(0, 200);
  empty.y.resize(0);
  EXPECT_THROW(spe(sc.true_b, empty, sim.sigma), DataError);
  EXPECT_THROW(spe(sc.true_b, sim.test, 0.0), InvalidParameter);
  // An intercept is subtracted from every prediction residual.
  Dataset one;
  one.X = Matrix::Zero(2, 1);
  one.y = Vector::Constant(2, 3.0);
  EXPECT_DOUBLE_EQ(spe(Vector::Zero(1), one, 1.0, 3.0), 0.0);
}

TEST(Metrics, Fse) {
  const Vector truth = SimScenario::data1().true_b;
  EXPECT_EQ(fse(truth, truth), 0.0);
  EXPECT_DOUBLE_EQ(fse(Vector::Zero(200), truth), 0.05);
  EXPECT_DOUBLE_EQ(fse(Vector::Constant(200, 0.3), truth), 0.95);
  Vector b = truth;
  b[1] = 1e-11;  // below the zero threshold
  EXPECT_EQ(fse(b, truth), 0.0);
  // False zeros and false nonzeros count the same.
  Vector fz = truth, fn = truth;
  fz[0] = 0.0;
  fn[1] = 2.0;
  EXPECT_EQ(fse(fz, truth), fse(fn, truth));
  EXPECT_THROW(fse(Vector::Zero(3), truth), DataError);
}

TEST(Metrics, Accuracy) {
  Dataset d;
  d.X.resize(4, 2);
  d.X << 1, 0, 2, 1, -1, 0, -3, 1;
  d.y.resize(4);
  d.y << 1, 1, -1, -1;
  d.label_kind = LabelKind::binary;
  const Vector bayes = (Vector(2) << 1.0, 0.0).finished();
  EXPECT_EQ(accuracy(bayes, d), 1.0);
  EXPECT_EQ(accuracy(-bayes, d), 0.0);
  EXPECT_EQ(accuracy(Vector::Zero(2), d), 0.5);  // sgn(0) = +1
  d.label_kind = LabelKind::continuous;
  EXPECT_THROW(accuracy(bayes, d), ContractViolation);
}

TEST(Standardize, AlreadyStandardizedIsIdentity) {
  std::mt19937_64 rng(1);
  const Matrix X = testsupport::standardized(testsupport::gaussian_matrix(30, 5, rng));
  Vector y = testsupport::gaussian_vector(30, rng);
  y.array() -= y.mean();
  const auto st = standardize(X, y);
  EXPECT_LE((st.X - X).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((st.y - y).cwiseAbs().maxCoeff(), 1e-12);
  for (Eigen::Index j = 0; j < 5; ++j) {
    EXPECT_LE(std::abs(st.X.col(j).mean()), 1e-10);
    EXPECT_LE(std::abs(st.X.col(j).norm() - 1.0), 1e-10);
  }
}

TEST(Standardize, RoundTripPredictions) {
  std::mt19937_64 rng(2);
  Matrix raw = testsupport::gaussian_matrix(25, 4, rng) * 3.0;
  raw.col(2).array() += 10.0;
  const Vector y = testsupport::gaussian_vector(25, rng).array() + 5.0;
  const auto st = standardize(raw, y);
  const Vector b = testsupport::gaussian_vector(4, rng);
  const Vector std_pred = (st.X * b).array() + st.back.y_mean;
  EXPECT_LE((st.back.predict(raw, b) - std_pred).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((st.back.apply(raw) - st.X).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Standardize, ZeroVarianceColumnNamed) {
  Matrix X(4, 3);
  X << 1, 5, 2, 2, 5, 1, 3, 5, 0, 4, 5, 1;
  const Vector y = Vector::LinSpaced(4, 0, 1);
  try {
    standardize(X, y);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
  }
}

TEST(LoadTable, CsvWithHeader) {
  TempDir dir;
  const auto p = dir.file("a.csv", "y,x1,x2\n1.5,2,3\n-1,0.5,1e-3\n2,4,5\n");
  const auto t = load_table(p, TableFormat::csv);
  EXPECT_EQ(t.data.n(), 3);
  EXPECT_EQ(t.data.p(), 2);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(t.data.label_kind, LabelKind::continuous);
  EXPECT_DOUBLE_EQ(t.data.X(1, 1), 1e-3);
  EXPECT_DOUBLE_EQ(t.data.y[0], 1.5);
}

TEST(LoadTable, CsvBinaryRemap) {
  TempDir dir;
  const auto p = dir.file("b.csv", "0,1,2\n1,3,4\n");
  const auto t = load_table(p, TableFormat::csv);
  EXPECT_EQ(t.data.label_kind, LabelKind::binary);
  EXPECT_EQ(t.data.y[0], -1.0);
  EXPECT_EQ(t.data.y[1], 1.0);
  ASSERT_EQ(t.notices.size(), 1u);
  const auto c = load_table(p, TableFormat::csv, LabelHint::continuous);
  EXPECT_EQ(c.data.y[0], 0.0);
}

TEST(LoadTable, CsvErrorsNameTheLine) {
  TempDir dir;
  const auto ragged = dir.file("r.csv", "y,x1,x2\n1,2,3\n1,2\n");
  try {
    load_table(ragged, TableFormat::csv);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  const auto text = dir.file("t.csv", "1,2,3\n1,abc,3\n");
  try {
    load_table(text, TableFormat::csv);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_table(dir.file("missing.csv"), TableFormat::csv), DataError);
}

TEST(LoadTable, Svmlight) {
  TempDir dir;
  const auto p = dir.file("s.txt", "+1 3:0.5\n-1 1:2 2:-1 # comment\n");
  const auto t = load_table(p, TableFormat::svmlight);
  EXPECT_EQ(t.data.n(), 2);
  EXPECT_EQ(t.data.p(), 3);
  EXPECT_EQ(t.data.X(0, 2), 0.5);
  EXPECT_EQ(t.data.X(0, 0), 0.0);
  EXPECT_EQ(t.data.X(0, 1), 0.0);
  EXPECT_EQ(t.data.X(1, 1), -1.0);
  EXPECT_EQ(t.data.label_kind, LabelKind::binary);
  const auto wide = load_svmlight(p, LabelHint::automatic, 5);
  EXPECT_EQ(wide.data.p(), 5);
  EXPECT_THROW(load_svmlight(p, LabelHint::automatic, 2), DataError);
  const auto bad = dir.file("bad.txt", "1 1:1\n1 0:3\n");
  try {
    load_table(bad, TableFormat::svmlight);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(Io, FormatAndWriter) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  TempDir dir;
  {
    CsvWriter w(dir.file("out.csv"), {"a", "b"});
    w.row(std::vector<double>{1.0 / 3.0, 2.0});
  }
  std::ifstream in(dir.file("out.csv"));
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  EXPECT_EQ(l1, "a,b");
  EXPECT_EQ(l2, "0.33333333333333331,2");
  EXPECT_THROW(CsvWriter((dir.path() / "no_such_dir" / "x.csv").string(), {"a"}), DataError);
}

TEST(Io, DatasetRoundTrip) {
  TempDir dir;
  const auto sim = simulate(SimScenario::data1(1), 5);
  const auto p = dir.file("train.csv");
  write_dataset_csv(p, sim.train);
  const auto t = load_table(p, TableFormat::csv, LabelHint::continuous);
  EXPECT_TRUE(t.data.X == sim.train.X);
  EXPECT_TRUE(t.data.y == sim.train.y);
}

TEST(Cv, FoldAssignment) {
  const auto f = fold_assignment(23, 5, 11);
  std::vector<int> counts(5, 0);
  for (int v : f) counts[static_cast<std::size_t>(v)]++;
  for (int c : counts) EXPECT_TRUE(c == 4 || c == 5);
  EXPECT_EQ(f, fold_assignment(23, 5, 11));
  EXPECT_NE(f, fold_assignment(23, 5, 12));
  EXPECT_THROW(fold_assignment(10, 11, 0), InvalidParameter);
  EXPECT_THROW(fold_assignment(10, 1, 0), InvalidParameter);
}

TEST(Cv, SingleCellGrid) {
  std::mt19937_64 rng(3);
  const Matrix X = testsupport::gaussian_matrix(30, 5, rng);
  const Vector y = X.col(0) + testsupport::gaussian_vector(30, rng, 0.1);
  const PathGrid grid{{0.3}, {1.0}};
  const auto r = cv_select(X, y, grid, LossKind::squared(), PenaltySpec::lfr());
  EXPECT_EQ(r.best_alpha, 1.0);
  EXPECT_EQ(r.best_eta, 0.3);
  EXPECT_THROW(cv_select(X, y, grid, LossKind::squared(), PenaltySpec::lfr(), {31, 0, {}, {}}),
               InvalidParameter);
}

TEST(Cv, TiesGoToLargerEtaThenAlpha) {
  // With eta above ||X^T y||_inf every fit is zero and the losses tie exactly.
  std::mt19937_64 rng(4);
  const Matrix X = testsupport::gaussian_matrix(20, 3, rng);
  const Vector y = testsupport::gaussian_vector(20, rng, 0.01);
  const PathGrid grid{{1e3, 2e3}, {0.5, 1e-3}};
  const auto r = cv_select(X, y, grid, LossKind::squared(), PenaltySpec::l1());
  EXPECT_EQ(r.best_eta, 2e3);
  EXPECT_EQ(r.best_alpha, 0.5);
}

TEST(Cv, PureNoiseSelectsEmptyModel) {
  int empty = 0;
  for (int rep = 0; rep < 20; ++rep) {
    std::mt19937_64 rng(100 + rep);
    const Matrix X = testsupport::gaussian_matrix(100, 10, rng);
    const Vector y = testsupport::gaussian_vector(100, rng);
    const auto st = standardize(X, y);
    const auto grid = PathGrid::make_default(st.X, st.y);
    CvOptions opt;
    opt.seed = static_cast<std::uint64_t>(rep);
    const auto r = cv_select(X, y, grid, LossKind::squared(), PenaltySpec::lfr(), opt);
    const auto sol = fit_path(st.X, st.y, grid, PenaltySpec::lfr());
    empty += sol.cell(r.k, r.l).nnz() == 0;
  }
  EXPECT_GE(empty, 16) << "empty model chosen in " << empty << " of 20 runs";
}

TEST(Cv, ClassificationUsesPalm) {
  std::mt19937_64 rng(5);
  const Matrix X = testsupport::gaussian_matrix(60, 6, rng);
  Vector y(60);
  for (Eigen::Index i = 0; i < 60; ++i) y[i] = X(i, 0) - X(i, 1) > 0 ? 1.0 : -1.0;
  const auto st = standardize(X, y, false);
  const auto grid = PathGrid::make_default(st.X, y, 8, 1e-2, {1.0, 0.25});
  const auto r = cv_select(X, y, grid, LossKind::logistic(), PenaltySpec::lfr());
  EXPECT_TRUE(std::isfinite(r.mean_loss(static_cast<Eigen::Index>(r.k), static_cast<Eigen::Index>(r.l))));
  EXPECT_LT(r.best_eta, grid.etas.back());
}
