#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <vector>

#include "mmpkit/dataset.hpp"
#include "mmpkit/error.hpp"

namespace mmpkit {

/// Per-column descriptive statistics plus the Pearson correlation matrix of
/// the five inputs. Columns with zero variance are flagged as degenerate and
/// their off-diagonal correlations are reported as 0 rather than NaN.
struct SummaryStats {
  std::array<double, kColumnCount> min{};
  std::array<double, kColumnCount> max{};
  std::array<double, kColumnCount> mean{};
  std::array<double, kColumnCount> stddev{};  // N-1 divisor
  Eigen::Matrix<double, kFeatureCount, kFeatureCount> input_correlation;
  std::vector<int> degenerate_columns;  // canonical column indices
};

/// Pearson correlation of two equally sized vectors.
/// Returns 0 when either vector has zero variance (degenerate).
inline double pearson(const Eigen::Ref<const Eigen::VectorXd>& a,
                      const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ArgumentError("pearson requires two vectors of equal length >= 2");
  }
  const double ma = a.mean();
  const double mb = b.mean();
  const Eigen::ArrayXd da = a.array() - ma;
  const Eigen::ArrayXd db = b.array() - mb;
  const double ssa = (da * da).sum();
  const double ssb = (db * db).sum();
  if (ssa <= 0.0 || ssb <= 0.0) return 0.0;
  return (da * db).sum() / std::sqrt(ssa * ssb);
}

inline SummaryStats describe(const Dataset& data) {
  if (data.size() < 2) {
    throw InsufficientDataError(
        "describe requires at least 2 samples for standard deviation");
  }
  SummaryStats s;
  const double n = static_cast<double>(data.size());
  for (int c = 0; c < kColumnCount; ++c) {
    const Eigen::VectorXd col = c < kFeatureCount
                                    ? Eigen::VectorXd(data.inputs().col(c))
                                    : data.targets();
    s.min[c] = col.minCoeff();
    s.max[c] = col.maxCoeff();
    s.mean[c] = col.mean();
    const double ss = (col.array() - s.mean[c]).square().sum();
    s.stddev[c] = std::sqrt(ss / (n - 1.0));
    if (s.stddev[c] <= 0.0) s.degenerate_columns.push_back(c);
  }
  for (int i = 0; i < kFeatureCount; ++i) {
    s.input_correlation(i, i) = 1.0;
    for (int j = i + 1; j < kFeatureCount; ++j) {
      const double r = pearson(data.inputs().col(i), data.inputs().col(j));
      s.input_correlation(i, j) = r;
      s.input_correlation(j, i) = r;
    }
  }
  return s;
}

}  // namespace mmpkit
