#pragma once

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <string>

#include "mmpkit/error.hpp"

namespace mmpkit {

enum class Expansion { identity, quadratic_with_interactions };

/// Degree-2 expansion of a length-P input in fixed order:
///   [1, x1..xP, x1^2..xP^2, x1x2, x1x3, ..., x1xP, x2x3, ..., x(P-1)xP]
/// giving 1 + 2P + P(P-1)/2 terms (21 for P = 5).
inline Eigen::VectorXd poly_expand(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index p = x.size();
  if (p < 1) throw ArgumentError("poly_expand requires at least one input");
  Eigen::VectorXd out(1 + 2 * p + p * (p - 1) / 2);
  Eigen::Index k = 0;
  out[k++] = 1.0;
  for (Eigen::Index i = 0; i < p; ++i) out[k++] = x[i];
  for (Eigen::Index i = 0; i < p; ++i) out[k++] = x[i] * x[i];
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) out[k++] = x[i] * x[j];
  }
  return out;
}

/// Row-wise design matrix for the chosen expansion; identity prepends the
/// intercept column.
inline Eigen::MatrixXd design_matrix(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                     Expansion expansion) {
  if (expansion == Expansion::identity) {
    Eigen::MatrixXd a(x.rows(), x.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(x.cols()) = x;
    return a;
  }
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd a(x.rows(), 1 + 2 * p + p * (p - 1) / 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    a.row(i) = poly_expand(x.row(i).transpose()).transpose();
  }
  return a;
}

/// Least-squares solution of A b = y through column-pivoted QR.
/// Throws SingularityError when the design is numerically rank deficient
/// (condition estimate above 1e12).
inline Eigen::VectorXd least_squares(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                     const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (a.rows() != y.size()) {
    throw ArgumentError("design rows must match target length");
  }
  if (a.rows() < a.cols()) {
    throw ArgumentError("least squares requires rows >= columns");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd r_diag = qr.matrixR().diagonal().cwiseAbs();
  const double r_max = r_diag.maxCoeff();
  const double r_min = r_diag.minCoeff();
  const double condition = r_min > 0.0
                               ? r_max / r_min
                               : std::numeric_limits<double>::infinity();
  if (!(condition < 1e12)) {
    throw SingularityError("design matrix is rank deficient (condition ~ " +
                           std::to_string(condition) + ")");
  }
  return qr.solve(y);
}

/// Linear-in-parameters regressor: plain multiple linear regression or the
/// quadratic-with-interactions polynomial expansion.
struct LinearModel {
  Expansion expansion = Expansion::identity;
  Eigen::VectorXd coefficients;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (expansion == Expansion::identity) {
      if (x.size() + 1 != coefficients.size()) {
        throw ArgumentError("input size does not match coefficient count");
      }
      return coefficients[0] + coefficients.tail(x.size()).dot(x);
    }
    const Eigen::VectorXd expanded = poly_expand(x);
    if (expanded.size() != coefficients.size()) {
      throw ArgumentError("input size does not match coefficient count");
    }
    return coefficients.dot(expanded);
  }

  Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    return design_matrix(x, expansion) * coefficients;
  }
};

/// Fits by least squares on the expanded design.
inline LinearModel ls_fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          Expansion expansion) {
  LinearModel model;
  model.expansion = expansion;
  model.coefficients = least_squares(design_matrix(x, expansion), y);
  return model;
}

inline LinearModel fit_mlr(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& y) {
  return ls_fit(x, y, Expansion::identity);
}

inline LinearModel fit_pr(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y) {
  return ls_fit(x, y, Expansion::quadratic_with_interactions);
}

}  // namespace mmpkit
