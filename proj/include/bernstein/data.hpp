#pragma once

// Block AR(1) Gaussian simulation and the SPE / FSE / accuracy metrics.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include "bernstein/errors.hpp"
#include "bernstein/losses.hpp"
#include "bernstein/standardize.hpp"

namespace bernstein {

enum class LabelKind { continuous, binary };

struct Dataset {
  Matrix X;
  Vector y;
  LabelKind label_kind = LabelKind::continuous;
  std::optional<BackTransform> standardization;

  [[nodiscard]] Eigen::Index n() const { return X.rows(); }
  [[nodiscard]] Eigen::Index p() const { return X.cols(); }
};

struct CovBlock {
  int size = 0;
  double ar = 0.0;  // Sigma_ij = ar^|i - j| within the block
};

struct SimScenario {
  std::string name = "custom";
  int n = 0;
  int p = 0;
  Vector true_b;
  std::vector<CovBlock> cov_blocks;
  double snr = 3.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1 || p < 1) throw InvalidParameter("scenario needs n >= 1 and p >= 1");
    if (true_b.size() != p) throw InvalidParameter("true_b must have length p");
    long total = 0;
    for (const auto& blk : cov_blocks) {
      if (blk.size < 1) throw InvalidParameter("covariance blocks must be nonempty");
      if (!(std::abs(blk.ar) < 1.0)) {
        throw InvalidParameter("AR coefficient must lie in (-1, 1), got " + std::to_string(blk.ar));
      }
      total += blk.size;
    }
    if (total != p) throw InvalidParameter("covariance block sizes must sum to p");
    if (!(std::isfinite(snr) && snr > 0.0)) throw InvalidParameter("snr must be positive");
  }

  /// `blocks` copies of a 200-wide AR(0.7) block with b_{20i+1} = 1 in each.
  static SimScenario replicated(std::string name, int n, int blocks, std::uint64_t seed) {
    SimScenario s;
    s.name = std::move(name);
    s.n = n;
    s.p = 200 * blocks;
    s.true_b = Vector::Zero(s.p);
    for (int b = 0; b < blocks; ++b) {
      for (int i = 0; i < 10; ++i) s.true_b[200 * b + 20 * i] = 1.0;
      s.cov_blocks.push_back({200, 0.7});
    }
    s.snr = 3.0;
    s.seed = seed;
    return s;
  }
  static SimScenario data1(std::uint64_t seed = 0) { return replicated("data1", 100, 1, seed); }
  static SimScenario data2(std::uint64_t seed = 0) { return replicated("data2", 500, 5, seed); }
  static SimScenario data3(std::uint64_t seed = 0) { return replicated("data3", 500, 10, seed); }
};

inline SimScenario scenario_by_name(const std::string& name, std::uint64_t seed = 0) {
  if (name == "data1") return SimScenario::data1(seed);
  if (name == "data2") return SimScenario::data2(seed);
  if (name == "data3") return SimScenario::data3(seed);
  throw InvalidParameter("unknown scenario '" + name + "' (expected data1, data2 or data3)");
}

inline Matrix ar1_block(int size, double ar) {
  Matrix S(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) S(i, j) = std::pow(ar, std::abs(i - j));
  return S;
}

/// b^T Sigma b for the scenario's block covariance.
inline double signal_variance(const SimScenario& s) {
  double v = 0.0;
  int offset = 0;
  for (const auto& blk : s.cov_blocks) {
    const Vector bb = s.true_b.segment(offset, blk.size);
    v += bb.dot(ar1_block(blk.size, blk.ar) * bb);
    offset += blk.size;
  }
  return v;
}

struct Simulation {
  Dataset train;
  Dataset test;
  double sigma = 0.0;
};

/// Rows x ~ N(0, Sigma) through per-block Cholesky factors, y = x^T b + sigma e
/// with sigma = sqrt(b^T Sigma b) / snr. Draw order: train X row by row, train
/// noise, test X, test noise, all from one mt19937_64 seeded with scenario.seed.
inline Simulation simulate(const SimScenario& s, int n_test = 10000) {
  s.validate();
  if (n_test < 0) throw InvalidParameter("n_test must be nonnegative");
  std::vector<Matrix> factors;
  for (const auto& blk : s.cov_blocks) {
    Eigen::LLT<Matrix> llt(ar1_block(blk.size, blk.ar));
    if (llt.info() != Eigen::Success) throw InvalidParameter("covariance block is not positive definite");
    factors.push_back(llt.matrixL());
  }

  std::mt19937_64 rng(s.seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Simulation out;
  out.sigma = std::sqrt(signal_variance(s)) / s.snr;

  auto draw = [&](int rows) {
    Dataset d;
    d.X.resize(rows, s.p);
    Vector z;
    for (int i = 0; i < rows; ++i) {
      int offset = 0;
      for (std::size_t b = 0; b < factors.size(); ++b) {
        const int m = s.cov_blocks[b].size;
        z.resize(m);
        for (int k = 0; k < m; ++k) z[k] = normal(rng);
        d.X.row(i).segment(offset, m) = (factors[b].triangularView<Eigen::Lower>() * z).transpose();
        offset += m;
      }
    }
    d.y = d.X * s.true_b;
    for (int i = 0; i < rows; ++i) d.y[i] += out.sigma * normal(rng);
    return d;
  };
  out.train = draw(s.n);
  out.test = draw(n_test);
  return out;
}

/// sum_i (y_i - intercept - x_i^T b)^2 / (m sigma^2).
inline double spe(const Vector& b_hat, const Dataset& test, double sigma, double intercept = 0.0) {
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  if (test.n() == 0) throw DataError("SPE needs at least one test row");
  if (b_hat.size() != test.p()) throw DataError("coefficient length does not match test width");
  const Vector r = (test.y - test.X * b_hat).array() - intercept;
  return r.squaredNorm() / (static_cast<double>(test.n()) * sigma * sigma);
}

inline constexpr double kZeroThreshold = 1e-10;

/// Fraction of coordinates whose zero / nonzero status disagrees with true_b.
inline double fse(const Vector& b_hat, const Vector& true_b) {
  if (b_hat.size() != true_b.size()) throw DataError("fse: length mismatch");
  if (b_hat.size() == 0) throw DataError("fse: empty vectors");
  Eigen::Index wrong = 0;
  for (Eigen::Index j = 0; j < b_hat.size(); ++j) {
    wrong += (std::abs(b_hat[j]) <= kZeroThreshold) != (std::abs(true_b[j]) <= kZeroThreshold);
  }
  return static_cast<double>(wrong) / static_cast<double>(b_hat.size());
}

/// Fraction of rows with sgn(intercept + x^T b) = y, where sgn(0) = +1.
inline double accuracy(const Vector& b_hat, const Dataset& test, double intercept = 0.0) {
  if (test.label_kind != LabelKind::binary) {
    throw ContractViolation("accuracy needs binary labels");
  }
  if (b_hat.size() != test.p()) throw DataError("coefficient length does not match test width");
  if (test.n() == 0) throw DataError("accuracy needs at least one test row");
  const Vector score = (test.X * b_hat).array() + intercept;
  Eigen::Index hit = 0;
  for (Eigen::Index i = 0; i < test.n(); ++i) hit += (score[i] >= 0.0 ? 1.0 : -1.0) == test.y[i];
  return static_cast<double>(hit) / static_cast<double>(test.n());
}

}  // namespace bernstein
