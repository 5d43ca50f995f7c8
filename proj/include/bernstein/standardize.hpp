#pragma once

// Column centering and unit-length scaling, and the map back to raw units.

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "bernstein/errors.hpp"

namespace bernstein {

/// Standardized-scale coefficients to raw scale: coef_j = b_j / scale_j and
/// intercept = y_mean - sum_j coef_j mean_j.
struct BackTransform {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  double y_mean = 0.0;

  [[nodiscard]] Eigen::VectorXd coef(const Eigen::VectorXd& b_std) const {
    return b_std.cwiseQuotient(scale);
  }
  [[nodiscard]] double intercept(const Eigen::VectorXd& b_std) const {
    return y_mean - coef(b_std).dot(mean);
  }
  [[nodiscard]] Eigen::VectorXd predict(const Eigen::MatrixXd& X_raw,
                                        const Eigen::VectorXd& b_std) const {
    return (X_raw * coef(b_std)).array() + intercept(b_std);
  }
  /// Applies the stored centering and scaling to new rows.
  [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& X_raw) const {
    Eigen::MatrixXd X = X_raw.rowwise() - mean.transpose();
    return X * scale.cwiseInverse().asDiagonal();
  }
};

struct Standardized {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  BackTransform back;
};

/// Centers and unit-scales the columns of X. y is centered when center_y
/// (regression) and left alone otherwise (class labels).
inline Standardized standardize(const Eigen::MatrixXd& X_raw, const Eigen::VectorXd& y_raw,
                                bool center_y = true) {
  if (X_raw.rows() != y_raw.size()) throw DataError("X and y have different row counts");
  if (X_raw.rows() < 2) throw DataError("standardization needs at least two rows");
  Standardized out;
  out.back.mean = X_raw.colwise().mean().transpose();
  out.X = X_raw.rowwise() - out.back.mean.transpose();
  out.back.scale.resize(X_raw.cols());
  for (Eigen::Index j = 0; j < X_raw.cols(); ++j) {
    const double len = out.X.col(j).norm();
    // Relative test so that a constant column with rounding residue is caught.
    const double ref = std::sqrt(static_cast<double>(X_raw.rows())) *
                       std::max(1.0, std::abs(out.back.mean[j]));
    if (!(len > 1e-12 * ref)) {
      throw DataError("column " + std::to_string(j) + " has zero variance");
    }
    out.back.scale[j] = len;
    out.X.col(j) /= len;
  }
  out.back.y_mean = center_y ? y_raw.mean() : 0.0;
  out.y = y_raw.array() - out.back.y_mean;
  return out;
}

}  // namespace bernstein
