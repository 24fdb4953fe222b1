#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mmpkit/error.hpp"

namespace mmpkit {

inline constexpr int kFeatureCount = 5;
inline constexpr int kColumnCount = kFeatureCount + 1;  // inputs + target

/// Column names in canonical order (CSV header order).
inline constexpr std::array<const char*, kColumnCount> kColumnNames = {
    "tcm", "volatile", "intermediate", "mwc7plus", "temperature", "mmp"};

/// Reference databank statistics per column, canonical order.
/// Used for ingest range warnings and for synthetic data generation.
struct ReferenceStats {
  static constexpr std::array<double, kColumnCount> kMin = {
      126.1, 0.0, 0.1167, 140.0, 333.1667, 22.10};
  static constexpr std::array<double, kColumnCount> kMax = {
      268.7372, 0.6055, 0.6376, 290.0, 464.2167, 64.8107};
  static constexpr std::array<double, kColumnCount> kMean = {
      165.8122, 0.3574, 0.2335, 212.2841, 387.3606, 37.8111};
  static constexpr std::array<double, kColumnCount> kStd = {
      47.3308, 0.1641, 0.0968, 46.2212, 27.8338, 9.4333};
};

/// Non-fatal findings raised during ingestion or partitioning.
using Warnings = std::vector<std::string>;

/// One row of model inputs: gas critical temperature (K), volatile and
/// intermediate mole fractions, heptane-plus molecular weight (g/mol) and
/// reservoir temperature (K).
struct FeatureVector {
  double tcm = 0.0;
  double volatile_frac = 0.0;
  double intermediate = 0.0;
  double mwc7plus = 0.0;
  double temperature = 0.0;

  Eigen::Matrix<double, kFeatureCount, 1> to_vector() const {
    Eigen::Matrix<double, kFeatureCount, 1> v;
    v << tcm, volatile_frac, intermediate, mwc7plus, temperature;
    return v;
  }

  static FeatureVector from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() != kFeatureCount) {
      throw ArgumentError("feature vector must have 5 entries");
    }
    return FeatureVector{v[0], v[1], v[2], v[3], v[4]};
  }

  /// Throws ArgumentError when a hard domain invariant is violated.
  /// `context` is prefixed to the message (e.g. "row 12").
  void validate(const std::string& context = {}) const {
    const auto fail = [&](const std::string& what) {
      throw ArgumentError(context.empty() ? what : context + ": " + what);
    };
    const auto v = to_vector();
    for (int i = 0; i < kFeatureCount; ++i) {
      if (!std::isfinite(v[i])) {
        fail(std::string(kColumnNames[i]) + " is not finite");
      }
    }
    if (volatile_frac < 0.0 || volatile_frac > 1.0) {
      fail("volatile must lie in [0, 1]");
    }
    if (intermediate <= 0.0 || intermediate > 1.0) {
      fail("intermediate must lie in (0, 1]");
    }
    if (tcm <= 0.0) fail("tcm must be positive");
    if (mwc7plus <= 0.0) fail("mwc7plus must be positive");
    if (temperature <= 0.0) fail("temperature must be positive");
  }
};

/// A labelled observation: inputs plus measured MMP (MPa).
struct Sample {
  FeatureVector features;
  double mmp = 0.0;

  void validate(const std::string& context = {}) const {
    features.validate(context);
    if (!std::isfinite(mmp) || mmp <= 0.0) {
      throw ArgumentError((context.empty() ? std::string() : context + ": ") +
                          "mmp must be positive and finite");
    }
  }
};

/// Immutable table of samples. Row order is stable; indices returned by the
/// partitioners refer to rows of this table.
class Dataset {
 public:
  Dataset() = default;

  static Dataset from_samples(const std::vector<Sample>& samples) {
    if (samples.empty()) {
      throw EmptyDatasetError("dataset requires at least one sample");
    }
    Dataset d;
    d.inputs_.resize(static_cast<Eigen::Index>(samples.size()), kFeatureCount);
    d.targets_.resize(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i].validate("row " + std::to_string(i + 1));
      d.inputs_.row(static_cast<Eigen::Index>(i)) =
          samples[i].features.to_vector().transpose();
      d.targets_[static_cast<Eigen::Index>(i)] = samples[i].mmp;
    }
    return d;
  }

  Eigen::Index size() const { return targets_.size(); }

  /// N x 5 matrix of raw inputs.
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  /// Length-N vector of raw MMP targets (MPa).
  const Eigen::VectorXd& targets() const { return targets_; }

  Sample sample(Eigen::Index i) const {
    return Sample{FeatureVector::from_vector(inputs_.row(i).transpose()),
                  targets_[i]};
  }

  /// New dataset holding the given rows, in the given order.
  Dataset subset(const std::vector<Eigen::Index>& rows) const {
    if (rows.empty()) {
      throw EmptyDatasetError("subset requires at least one row");
    }
    Dataset d;
    d.inputs_.resize(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
    d.targets_.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] < 0 || rows[i] >= size()) {
        throw ArgumentError("subset row index out of range");
      }
      d.inputs_.row(static_cast<Eigen::Index>(i)) = inputs_.row(rows[i]);
      d.targets_[static_cast<Eigen::Index>(i)] = targets_[rows[i]];
    }
    return d;
  }

 private:
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
};

}  // namespace mmpkit
