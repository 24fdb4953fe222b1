#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mmpkit/dataset.hpp"
#include "mmpkit/error.hpp"

namespace mmpkit {

enum class ScalerMode { zscore, minmax };

inline const char* to_string(ScalerMode m) {
  return m == ScalerMode::zscore ? "zscore" : "minmax";
}

/// Normalized view of a dataset: inputs and target after a Scaler transform.
/// Carries no domain invariants (values are centred/rescaled).
struct NormalizedData {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd target;
};

/// Fitted per-column normalization for the five inputs and the target.
///
/// zscore maps each column to zero mean, unit standard deviation; minmax maps
/// the training minimum to -1 and the training maximum to +1. Parameters are
/// estimated from training rows only and the object is immutable afterwards.
class Scaler {
 public:
  Scaler() = default;

  /// Fits on every row of `data`.
  static Scaler fit(const Dataset& data, ScalerMode mode) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.size()));
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      rows[static_cast<std::size_t>(i)] = i;
    }
    return fit(data, rows, mode);
  }

  /// Fits on the given training rows only; test rows are never read.
  static Scaler fit(const Dataset& data, const std::vector<Eigen::Index>& rows,
                    ScalerMode mode) {
    if (rows.size() < 2) {
      throw InsufficientDataError("scaler requires at least 2 training rows");
    }
    Scaler s;
    s.mode_ = mode;
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    for (int c = 0; c < kColumnCount; ++c) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      double sum = 0.0;
      for (const auto r : rows) {
        const double v = column_value(data, r, c);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (const auto r : rows) {
        const double d = column_value(data, r, c) - mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (mode == ScalerMode::zscore && sd <= 0.0) {
        throw UnfittableScalerError(std::string("column '") + kColumnNames[c] +
                                    "' has zero variance");
      }
      if (mode == ScalerMode::minmax && hi <= lo) {
        throw UnfittableScalerError(std::string("column '") + kColumnNames[c] +
                                    "' has min == max");
      }
      // offset/scale such that normalized = (raw - offset) / scale
      if (mode == ScalerMode::zscore) {
        s.offset_[c] = mean;
        s.scale_[c] = sd;
      } else {
        s.offset_[c] = 0.5 * (lo + hi);
        s.scale_[c] = 0.5 * (hi - lo);
      }
    }
    s.fitted_ = true;
    return s;
  }

  ScalerMode mode() const { return mode_; }
  bool fitted() const { return fitted_; }

  double apply_column(double raw, int column) const {
    check_column(column);
    return (raw - offset_[column]) / scale_[column];
  }
  double invert_column(double normalized, int column) const {
    check_column(column);
    return normalized * scale_[column] + offset_[column];
  }

  Eigen::VectorXd apply_input_row(const Eigen::Ref<const Eigen::VectorXd>& raw) const {
    if (raw.size() != kFeatureCount) {
      throw ArgumentError("expected 5 input values");
    }
    Eigen::VectorXd out(kFeatureCount);
    for (int c = 0; c < kFeatureCount; ++c) out[c] = apply_column(raw[c], c);
    return out;
  }

  Eigen::MatrixXd apply_inputs(const Eigen::Ref<const Eigen::MatrixXd>& raw) const {
    if (raw.cols() != kFeatureCount) {
      throw ArgumentError("expected 5 input columns");
    }
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    for (int c = 0; c < kFeatureCount; ++c) {
      out.col(c) = (raw.col(c).array() - offset_[c]) / scale_[c];
    }
    return out;
  }

  double apply_target(double raw) const { return apply_column(raw, kFeatureCount); }
  double invert_target(double normalized) const {
    return invert_column(normalized, kFeatureCount);
  }

  Eigen::VectorXd apply_targets(const Eigen::Ref<const Eigen::VectorXd>& raw) const {
    return (raw.array() - offset_[kFeatureCount]) / scale_[kFeatureCount];
  }
  Eigen::VectorXd invert_targets(
      const Eigen::Ref<const Eigen::VectorXd>& normalized) const {
    return normalized.array() * scale_[kFeatureCount] + offset_[kFeatureCount];
  }

  Eigen::MatrixXd invert_inputs(const Eigen::Ref<const Eigen::MatrixXd>& normalized) const {
    if (normalized.cols() != kFeatureCount) {
      throw ArgumentError("expected 5 input columns");
    }
    Eigen::MatrixXd out(normalized.rows(), normalized.cols());
    for (int c = 0; c < kFeatureCount; ++c) {
      out.col(c) = normalized.col(c).array() * scale_[c] + offset_[c];
    }
    return out;
  }

  /// Normalizes the whole dataset (inputs + target).
  NormalizedData apply(const Dataset& data) const {
    return NormalizedData{apply_inputs(data.inputs()),
                          apply_targets(data.targets())};
  }

  /// Multiplier that converts a variance on the normalized target scale back
  /// to MPa^2.
  double target_variance_factor() const {
    return scale_[kFeatureCount] * scale_[kFeatureCount];
  }

  const std::array<double, kColumnCount>& offsets() const { return offset_; }
  const std::array<double, kColumnCount>& scales() const { return scale_; }

  /// Restores a scaler from serialized parameters.
  static Scaler from_parameters(ScalerMode mode,
                                const std::array<double, kColumnCount>& offsets,
                                const std::array<double, kColumnCount>& scales) {
    Scaler s;
    s.mode_ = mode;
    s.offset_ = offsets;
    s.scale_ = scales;
    for (const double sc : scales) {
      if (!(sc > 0.0) || !std::isfinite(sc)) {
        throw ConfigError("scaler scale parameters must be positive");
      }
    }
    s.fitted_ = true;
    return s;
  }

 private:
  static double column_value(const Dataset& data, Eigen::Index row, int c) {
    return c < kFeatureCount ? data.inputs()(row, c) : data.targets()[row];
  }
  void check_column(int column) const {
    if (!fitted_) throw ConfigError("scaler is not fitted");
    if (column < 0 || column >= kColumnCount) {
      throw ArgumentError("column index out of range");
    }
  }

  ScalerMode mode_ = ScalerMode::zscore;
  std::array<double, kColumnCount> offset_{};
  std::array<double, kColumnCount> scale_{};
  bool fitted_ = false;
};

}  // namespace mmpkit
