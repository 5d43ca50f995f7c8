#pragma once

// K-fold selection of (alpha, eta) on a fixed grid.

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/uniform_int_distribution.hpp>

#include "bernstein/cd_solver.hpp"
#include "bernstein/errors.hpp"
#include "bernstein/losses.hpp"
#include "bernstein/palm_solver.hpp"
#include "bernstein/standardize.hpp"

namespace bernstein {

/// Fold label of every row: a seeded Fisher-Yates permutation dealt round robin.
inline std::vector<int> fold_assignment(Eigen::Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidParameter("cross validation needs at least 2 folds");
  if (folds > n) {
    throw InvalidParameter("folds (" + std::to_string(folds) + ") exceed the number of rows (" +
                           std::to_string(n) + ")");
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    boost::random::uniform_int_distribution<Eigen::Index> pick(0, i);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    fold[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] = static_cast<int>(pos % folds);
  }
  return fold;
}

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  CDConfig cd;
  PalmConfig palm;
};

struct CvResult {
  double best_alpha = 0.0;
  double best_eta = 0.0;
  std::size_t k = 0;  // index into grid.alphas
  std::size_t l = 0;  // index into grid.etas
  Matrix mean_loss;   // K x L validation loss per row, +inf where a cell was never fitted
};

namespace detail {

inline Matrix take_rows(const Matrix& X, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

inline Vector take(const Vector& y, const std::vector<Eigen::Index>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[rows[i]];
  return out;
}

inline double median(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  const Eigen::Index m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

/// PALM over a grid for logistic or Huber loss on a standardized design:
/// each alpha column runs eta from largest to smallest with warm starts.
/// Returns coefficient vectors indexed like PathSolution::cells.
inline std::vector<Vector> palm_grid(const Matrix& X, const Vector& y, const PathGrid& grid,
                                     const LossKind& loss, const PenaltySpec& family,
                                     const PalmConfig& config) {
  grid.validate();
  const std::size_t K = grid.alphas.size();
  const std::size_t L = grid.etas.size();
  std::vector<Vector> out(K * L);
  for (std::size_t k = 0; k < K; ++k) {
    const PenaltySpec spec = family.with_alpha(grid.alphas[k]);
    Vector warm = Vector::Zero(X.cols());
    for (std::size_t l = L; l-- > 0;) {
      const auto res = fit_palm(X, y, loss, path_lambda(spec, grid.etas[l]), spec, config, warm);
      warm = res.coef;
      out[k * L + l] = res.coef;
    }
  }
  return out;
}

/// Response centering used with a loss: mean for squared, median for Huber
/// (robust to the outliers it is meant for), none for class labels.
inline double response_center(const LossKind& loss, const Vector& y) {
  switch (loss.type) {
    case LossKind::Type::squared:
      return y.mean();
    case LossKind::Type::huber:
      return detail::median(y);
    case LossKind::Type::logistic:
      return 0.0;
  }
  return 0.0;
}

inline Standardized standardize_for(const LossKind& loss, const Matrix& X, const Vector& y) {
  Standardized st = standardize(X, y, false);
  st.back.y_mean = response_center(loss, y);
  st.y = y.array() - st.back.y_mean;
  return st;
}

/// Selects the cell with the smallest pooled validation loss. Ties go to the
/// larger eta, then the larger alpha. X and y are on the raw scale; every
/// training fold is standardized on its own.
inline CvResult cv_select(const Matrix& X, const Vector& y, const PathGrid& grid, const LossKind& loss,
                          const PenaltySpec& family, const CvOptions& opt = {}) {
  grid.validate();
  loss.validate();
  if (X.rows() != y.size()) throw DataError("X and y have different row counts");
  if (loss.type == LossKind::Type::logistic) check_labels(y);
  const auto fold = fold_assignment(X.rows(), opt.folds, opt.seed);
  const std::size_t K = grid.alphas.size();
  const std::size_t L = grid.etas.size();
  Matrix total = Matrix::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(L));
  Eigen::MatrixXi fitted = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(L));

  for (int f = 0; f < opt.folds; ++f) {
    std::vector<Eigen::Index> tr, va;
    for (Eigen::Index i = 0; i < X.rows(); ++i) (fold[static_cast<std::size_t>(i)] == f ? va : tr).push_back(i);
    const Standardized st = standardize_for(loss, detail::take_rows(X, tr), detail::take(y, tr));
    const Matrix Xv = detail::take_rows(X, va);
    const Vector yv = detail::take(y, va);

    std::vector<Vector> coefs;
    if (loss.type == LossKind::Type::squared) {
      const PathSolution sol = fit_path(st.X, st.y, grid, family, opt.cd, st.back);
      coefs.resize(K * L);
      for (std::size_t c = 0; c < K * L; ++c) coefs[c] = sol.cells[c].coef_std;
    } else {
      coefs = palm_grid(st.X, st.y, grid, loss, family, opt.palm);
    }
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t l = 0; l < L; ++l) {
        const Vector& b = coefs[k * L + l];
        if (b.size() == 0) continue;
        const Vector pred = st.back.predict(Xv, b);
        const auto kk = static_cast<Eigen::Index>(k), ll = static_cast<Eigen::Index>(l);
        total(kk, ll) += loss_from_predictor(loss, pred, yv);
        fitted(kk, ll) += 1;
      }
    }
  }

  CvResult res;
  res.mean_loss = Matrix::Constant(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(L),
                                   std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t l = L; l-- > 0;) {
    for (std::size_t k = 0; k < K; ++k) {
      const auto kk = static_cast<Eigen::Index>(k), ll = static_cast<Eigen::Index>(l);
      if (fitted(kk, ll) != opt.folds) continue;
      const double m = total(kk, ll) / static_cast<double>(X.rows());
      res.mean_loss(kk, ll) = m;
      if (m < best) {
        best = m;
        res.k = k;
        res.l = l;
        found = true;
      }
    }
  }
  if (!found) throw InvalidParameter("no grid cell could be fitted on every fold");
  res.best_alpha = grid.alphas[res.k];
  res.best_eta = grid.etas[res.l];
  return res;
}

}  // namespace bernstein
