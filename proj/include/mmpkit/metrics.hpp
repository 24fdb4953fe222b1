#pragma once

#include <Eigen/Core>

#include <cmath>

#include "mmpkit/error.hpp"

namespace mmpkit {

struct Metrics {
  double r_squared = 0.0;
  double rmse = 0.0;
};

inline double mse(const Eigen::Ref<const Eigen::VectorXd>& y,
                  const Eigen::Ref<const Eigen::VectorXd>& y_hat) {
  if (y.size() != y_hat.size() || y.size() < 1) {
    throw ArgumentError("mse requires equal-length non-empty vectors");
  }
  return (y - y_hat).squaredNorm() / static_cast<double>(y.size());
}

inline double rmse(const Eigen::Ref<const Eigen::VectorXd>& y,
                   const Eigen::Ref<const Eigen::VectorXd>& y_hat) {
  return std::sqrt(mse(y, y_hat));
}

/// Coefficient of determination, 1 - SS_res / SS_tot. May be negative for
/// predictors worse than the mean baseline.
inline double r2(const Eigen::Ref<const Eigen::VectorXd>& y,
                 const Eigen::Ref<const Eigen::VectorXd>& y_hat) {
  if (y.size() != y_hat.size() || y.size() < 2) {
    throw ArgumentError("r2 requires equal-length vectors of size >= 2");
  }
  const double ss_tot = (y.array() - y.mean()).square().sum();
  if (ss_tot <= 0.0) {
    throw InsufficientDataError("r2 undefined for zero-variance targets");
  }
  const double ss_res = (y - y_hat).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

inline Metrics evaluate(const Eigen::Ref<const Eigen::VectorXd>& y,
                        const Eigen::Ref<const Eigen::VectorXd>& y_hat) {
  return Metrics{r2(y, y_hat), rmse(y, y_hat)};
}

}  // namespace mmpkit
