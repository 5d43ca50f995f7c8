#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bernstein/cd_solver.hpp"
#include "bernstein/palm_solver.hpp"
#include "random_design.hpp"

using namespace bernstein;
using testsupport::gaussian_matrix;
using testsupport::gaussian_vector;

namespace {

Vector centered(Vector v) {
  v.array() -= v.mean();
  return v;
}

std::vector<Eigen::Index> support(const Vector& b) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index j = 0; j < b.size(); ++j)
    if (b[j] != 0.0) s.push_back(j);
  return s;
}

}  // namespace

TEST(PalmStep, Examples) {
  const auto spec = PenaltySpec::lfr(2.0);
  EXPECT_EQ(palm_coordinate_step(0.0, 0.0, 1.0, 0.4, spec), 0.0);
  EXPECT_DOUBLE_EQ(palm_coordinate_step(0.3, -1.2, 4.0, 0.0, spec), 0.3 + 1.2 / 4.0);
  EXPECT_THROW(palm_coordinate_step(0.0, std::numeric_limits<double>::infinity(), 1.0, 0.4, spec),
               NumericalError);
}

TEST(PalmStep, MatchesCdUpdateOnStandardizedSquaredLoss) {
  std::mt19937_64 rng(21);
  const Matrix X = testsupport::standardized(gaussian_matrix(30, 6, rng));
  const Vector y = centered(gaussian_vector(30, rng, 2.0));
  const auto spec = PenaltySpec::log(1.5);
  const double lambda = 0.3;
  const Thresholder op(spec, lambda);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector b = gaussian_vector(6, rng);
    const Vector g = loss_grad(LossKind::squared(), b, X, y);
    for (Eigen::Index j = 0; j < 6; ++j) {
      const double cd = op(partial_residual_inner(j, b, X, y));
      EXPECT_NEAR(palm_coordinate_step(b[j], g[j], 1.0, lambda, spec), cd, 1e-10);
    }
  }
}

TEST(Palm, ZeroIsStationaryForLargeLambda) {
  Matrix X(2, 1);
  X << 1.0, -1.0;
  Vector y(2);
  y << 1.0, -1.0;
  const auto spec = PenaltySpec::lfr(1.0);
  const double grad0 = std::abs(loss_grad(LossKind::logistic(), Vector::Zero(1), X, y)[0]);
  // Zero is stationary once lambda alpha Phi'(0) >= |grad L(0)|, but the prox is
  // a global minimizer and can still jump away until lambda is larger.
  EXPECT_EQ(kkt_residual(LossKind::logistic(), Vector::Zero(1), X, y, 1.01 * grad0, spec), 0.0);
  const auto res = fit_palm(X, y, LossKind::logistic(), 10.0 * grad0, spec);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.epochs, 1);
  EXPECT_EQ(res.coef[0], 0.0);
  EXPECT_EQ(res.trace.kkt, 0.0);
}

TEST(Palm, AgreesWithCdOnSquaredLoss) {
  std::mt19937_64 rng(22);
  PalmConfig pc;
  pc.tol = 1e-10;
  pc.max_epochs = 100000;
  CDConfig cc;
  cc.tol = 1e-12;
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix X = testsupport::standardized(gaussian_matrix(80, 10, rng));
    Vector b = Vector::Zero(10);
    b.head(3) << 2.0, -1.0, 1.5;
    const Vector y = centered(X * b + gaussian_vector(80, rng, 0.5));
    for (const auto& fam : {PenaltySpec::lfr(), PenaltySpec::log(), PenaltySpec::mcp()}) {
      const auto spec = fam.with_alpha(1.0);
      const double eta = 0.5 * std::min(1.0, convexity_limit(spec));
      const auto path = fit_path(X, y, PathGrid{{eta}, {1.0}}, fam, cc);
      const auto res = fit_palm(X, y, LossKind::squared(), path_lambda(spec, eta), spec, pc);
      EXPECT_TRUE(res.converged);
      EXPECT_LE((res.coef - path.cell(0, 0).coef_std).cwiseAbs().maxCoeff(), 1e-5) << fam.name();
    }
  }
  const Matrix Q = testsupport::orthonormal(50, 7, rng);
  const Vector yq = centered(gaussian_vector(50, rng, 2.0));
  const auto spec = PenaltySpec::kep(1.0);
  const auto path = fit_path(Q, yq, PathGrid{{0.4}, {1.0}}, PenaltySpec::kep(), cc);
  const auto res = fit_palm(Q, yq, LossKind::squared(), path_lambda(spec, 0.4), spec, pc);
  EXPECT_LE((res.coef - path.cell(0, 0).coef_std).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Palm, DescentStepsAndKkt) {
  std::mt19937_64 rng(23);
  PalmConfig pc;
  pc.max_epochs = 20000;  // one near-separable logistic/MCP case needs ~5300
  for (int rep = 0; rep < 8; ++rep) {
    const Matrix X = gaussian_matrix(40, 15, rng);
    Vector b = Vector::Zero(15);
    b.head(3) << 1.0, -0.8, 0.6;
    const Vector lin = X * b;
    Vector labels(40);
    std::uniform_real_distribution<double> u;
    for (Eigen::Index i = 0; i < 40; ++i) labels[i] = u(rng) < 1.0 / (1.0 + std::exp(-lin[i])) ? 1.0 : -1.0;
    const Vector yc = lin + gaussian_vector(40, rng, 0.5);
    for (const auto& spec : {PenaltySpec::lfr(1.0), PenaltySpec::log(2.0), PenaltySpec::mcp(1.0),
                             PenaltySpec::exp(0.5)}) {
      for (const auto& loss : {LossKind::logistic(), LossKind::huber(1.0), LossKind::squared()}) {
        const Vector& y = loss.type == LossKind::Type::logistic ? labels : yc;
        const auto res = fit_palm(X, y, loss, 1.5, spec, pc);
        ASSERT_TRUE(res.converged) << loss.name() << " " << spec.name();
        const auto d = verify_descent(res.trace);
        EXPECT_TRUE(d.monotone) << loss.name() << " " << spec.name();
        EXPECT_LE(res.trace.step_max.back(), pc.tol);
        EXPECT_LE(res.trace.kkt, 100 * pc.tol) << loss.name() << " " << spec.name();
        for (double m : res.trace.decrease_margin) {
          EXPECT_GE(m, -1e-10 * (1.0 + std::abs(res.trace.objective.front())));
        }
      }
    }
  }
}

TEST(Palm, TraceShapeAndSingleEpoch) {
  std::mt19937_64 rng(24);
  const Matrix X = gaussian_matrix(20, 5, rng);
  const Vector y = gaussian_vector(20, rng);
  PalmConfig pc;
  pc.max_epochs = 1;
  const auto res = fit_palm(X, y, LossKind::squared(), 0.5, PenaltySpec::lfr(), pc);
  ASSERT_EQ(res.trace.epochs(), 1u);
  ASSERT_EQ(res.trace.objective.size(), 2u);
  const auto d = verify_descent(res.trace);
  EXPECT_NEAR(d.square_sum, res.coef.squaredNorm(), 1e-12);
  EXPECT_FALSE(res.trace.warnings.empty());
}

TEST(Palm, TinyFixedStepIsReportedNotAsserted) {
  std::mt19937_64 rng(25);
  const Matrix X = gaussian_matrix(20, 5, rng);
  const Vector y = gaussian_vector(20, rng);
  PalmConfig pc;
  pc.step_rule = StepRule::fixed(1e-12);
  pc.max_epochs = 5;
  const auto res = fit_palm(X, y, LossKind::squared(), 0.5, PenaltySpec::lfr(), pc);
  ASSERT_EQ(res.nu.front(), pc.m0);
  const auto d = verify_descent(res.trace);
  EXPECT_FALSE(d.monotone);
}

TEST(Palm, HuberResistsOutlier) {
  std::mt19937_64 rng(26);
  int agree = 0;
  // eta well above the noise level of x_j^T e so the clean support is stable.
  const auto spec = PenaltySpec::lfr(0.5);
  const double eta = 1.0;
  ASSERT_LT(eta, convexity_limit(spec));
  const double lambda = path_lambda(spec, eta);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix X = testsupport::standardized(gaussian_matrix(50, 10, rng));
    Vector b = Vector::Zero(10);
    b.head(3) << 4.0, -3.0, 3.0;
    const Vector clean = centered(X * b + gaussian_vector(50, rng, 0.3));
    Vector dirty = clean;
    dirty[7] += 50.0;
    const auto cd = fit_path(X, clean, PathGrid{{eta}, {0.5}}, PenaltySpec::lfr());
    const auto res = fit_palm(X, dirty, LossKind::huber(1.0), lambda, spec);
    agree += support(res.coef) == support(cd.cell(0, 0).coef_std);
  }
  EXPECT_GE(agree, 18);
}

TEST(Palm, ConcavityWarningForLogistic) {
  std::mt19937_64 rng(27);
  const Matrix X = gaussian_matrix(30, 4, rng) * 0.1;
  const Vector y = testsupport::random_labels(30, rng);
  const auto res = fit_palm(X, y, LossKind::logistic(), 2.0, PenaltySpec::log(3.0));
  bool found = false;
  for (const auto& w : res.trace.warnings) found |= w.find("concavity") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Palm, Errors) {
  std::mt19937_64 rng(28);
  Matrix X = gaussian_matrix(10, 3, rng);
  const Vector y = gaussian_vector(10, rng);
  EXPECT_THROW(fit_palm(X, y, LossKind::squared(), 0.0, PenaltySpec::lfr()), InvalidParameter);
  EXPECT_THROW(fit_palm(X, y, LossKind::logistic(), 1.0, PenaltySpec::lfr()), DataError);
  PalmConfig bad;
  bad.m0 = 2.0;
  bad.M0 = 1.0;
  EXPECT_THROW(fit_palm(X, y, LossKind::squared(), 1.0, PenaltySpec::lfr(), bad), InvalidParameter);
  X(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(fit_palm(X, y, LossKind::squared(), 1.0, PenaltySpec::lfr()), Error);
}
