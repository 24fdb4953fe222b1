#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mmpkit/error.hpp"
#include "mmpkit/rng.hpp"
#include "mmpkit/tree.hpp"

namespace mmpkit {

enum class EnsembleKind { bagging, random_forest, boosting };

inline const char* to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::bagging: return "bagging";
    case EnsembleKind::random_forest: return "random_forest";
    default: return "boosting";
  }
}

// Seed streams for the two independent draws a forest member makes.
inline constexpr std::uint64_t kBootstrapStream = 0;
inline constexpr std::uint64_t kFeatureStream = 1;

/// Tree ensemble. Bagged kinds predict the unweighted mean of their members;
/// the boosted kind predicts the learning-rate-weighted sum of shallow trees
/// fit to running residuals.
struct Ensemble {
  EnsembleKind kind = EnsembleKind::bagging;
  std::vector<RegressionTree> members;
  // rows drawn by each member's bootstrap (bagged kinds only)
  std::vector<std::vector<Eigen::Index>> bootstrap_rows;
  int feature_subset = -1;     // random forest m
  double learning_rate = 0.0;  // boosting only
  std::uint64_t seed = 0;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (members.empty()) throw ArgumentError("ensemble has no members");
    double sum = 0.0;
    for (const auto& tree : members) sum += tree.predict(x);
    return kind == EnsembleKind::boosting
               ? learning_rate * sum
               : sum / static_cast<double>(members.size());
  }

  Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out[i] = predict(x.row(i).transpose());
    }
    return out;
  }
};

namespace detail {

inline std::vector<Eigen::Index> bootstrap_draw(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  for (auto& r : rows) {
    r = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n)));
  }
  return rows;
}

inline Ensemble fit_bagged(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& y, int b,
                           int feature_subset, std::uint64_t seed,
                           EnsembleKind kind) {
  if (b < 1) throw ArgumentError("ensemble size must be >= 1");
  if (x.rows() < 1) throw ArgumentError("ensemble requires training rows");
  Ensemble ensemble;
  ensemble.kind = kind;
  ensemble.feature_subset = feature_subset;
  ensemble.seed = seed;
  for (int member = 0; member < b; ++member) {
    const std::uint64_t member_seed =
        derive_seed(seed, static_cast<std::uint64_t>(member));
    Rng bootstrap_rng(derive_seed(member_seed, kBootstrapStream));
    auto rows = bootstrap_draw(x.rows(), bootstrap_rng);

    Eigen::MatrixXd xb(static_cast<Eigen::Index>(rows.size()), x.cols());
    Eigen::VectorXd yb(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      xb.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
      yb[static_cast<Eigen::Index>(i)] = y[rows[i]];
    }
    TreeFitOptions options;
    options.min_leaf_size = 1;  // members are grown deep
    Rng feature_rng(derive_seed(member_seed, kFeatureStream));
    if (feature_subset > 0) {
      options.feature_subset = feature_subset;
      options.feature_rng = &feature_rng;
    }
    ensemble.members.push_back(RegressionTree::fit(xb, yb, options));
    ensemble.bootstrap_rows.push_back(std::move(rows));
  }
  return ensemble;
}

}  // namespace detail

/// Bootstrap-aggregated deep trees.
inline Ensemble bagging_fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y, int b,
                            std::uint64_t seed) {
  return detail::fit_bagged(x, y, b, /*feature_subset=*/-1, seed,
                            EnsembleKind::bagging);
}

/// Bagging with explicit bootstrap row draws (test and replay hook).
inline Ensemble bagging_from_bootstraps(
    const Eigen::Ref<const Eigen::MatrixXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& y,
    std::vector<std::vector<Eigen::Index>> draws) {
  if (draws.empty()) throw ArgumentError("ensemble size must be >= 1");
  Ensemble ensemble;
  ensemble.kind = EnsembleKind::bagging;
  for (auto& rows : draws) {
    Eigen::MatrixXd xb(static_cast<Eigen::Index>(rows.size()), x.cols());
    Eigen::VectorXd yb(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      xb.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
      yb[static_cast<Eigen::Index>(i)] = y[rows[i]];
    }
    TreeFitOptions options;
    options.min_leaf_size = 1;
    ensemble.members.push_back(RegressionTree::fit(xb, yb, options));
    ensemble.bootstrap_rows.push_back(std::move(rows));
  }
  return ensemble;
}

/// Bagging with per-node random feature subsets of size m.
inline Ensemble rf_fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y, int b, int m,
                       std::uint64_t seed) {
  if (m < 1 || m > static_cast<int>(x.cols())) {
    throw ArgumentError("random forest requires 1 <= m <= P");
  }
  return detail::fit_bagged(x, y, b, m, seed, EnsembleKind::random_forest);
}

struct OobError {
  double mse = 0.0;
  int skipped_rows = 0;  // rows in-bag in every member
};

/// Out-of-bag mean squared error using the first `use_members` members
/// (0 = all). Each training row is predicted by the mean over members whose
/// bootstrap excluded it; rows excluded nowhere are skipped and counted.
inline OobError oob_error(const Ensemble& ensemble,
                          const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          int use_members = 0) {
  if (ensemble.kind == EnsembleKind::boosting) {
    throw ArgumentError("out-of-bag error is defined for bagged kinds only");
  }
  const int b = use_members > 0 ? use_members
                                : static_cast<int>(ensemble.members.size());
  if (b < 1 || b > static_cast<int>(ensemble.members.size())) {
    throw ArgumentError("use_members out of range");
  }
  const Eigen::Index n = x.rows();
  std::vector<std::vector<bool>> in_bag(
      static_cast<std::size_t>(b),
      std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int member = 0; member < b; ++member) {
    for (const auto r : ensemble.bootstrap_rows[static_cast<std::size_t>(member)]) {
      in_bag[static_cast<std::size_t>(member)][static_cast<std::size_t>(r)] = true;
    }
  }
  double total = 0.0;
  int used = 0;
  OobError result;
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    int count = 0;
    for (int member = 0; member < b; ++member) {
      if (in_bag[static_cast<std::size_t>(member)][static_cast<std::size_t>(i)]) {
        continue;
      }
      sum += ensemble.members[static_cast<std::size_t>(member)].predict(
          x.row(i).transpose());
      ++count;
    }
    if (count == 0) {
      ++result.skipped_rows;
      continue;
    }
    const double err = y[i] - sum / static_cast<double>(count);
    total += err * err;
    ++used;
  }
  if (used == 0) {
    throw OobUndefinedError("every row was in-bag in every member");
  }
  result.mse = total / static_cast<double>(used);
  return result;
}

/// OOB error after each prefix of members, for size selection curves.
inline std::vector<OobError> oob_curve(const Ensemble& ensemble,
                                       const Eigen::Ref<const Eigen::MatrixXd>& x,
                                       const Eigen::Ref<const Eigen::VectorXd>& y) {
  std::vector<OobError> curve;
  curve.reserve(ensemble.members.size());
  for (int b = 1; b <= static_cast<int>(ensemble.members.size()); ++b) {
    try {
      curve.push_back(oob_error(ensemble, x, y, b));
    } catch (const OobUndefinedError&) {
      curve.push_back(OobError{std::numeric_limits<double>::quiet_NaN(),
                               static_cast<int>(x.rows())});
    }
  }
  return curve;
}

struct BoostingResult {
  Ensemble ensemble;
  std::vector<double> train_mse_trace;  // after each added member
};

/// Gradient boosting with squared loss: starts from the zero model, fits a
/// shallow tree to the current residuals and adds it scaled by the learning
/// rate; residuals are then taken against the updated ensemble.
inline BoostingResult boosting_fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                   const Eigen::Ref<const Eigen::VectorXd>& y,
                                   int b, double learning_rate,
                                   int max_splits = 2) {
  if (b < 1) throw ArgumentError("ensemble size must be >= 1");
  if (!(learning_rate >= 0.0)) {
    throw ArgumentError("learning rate must be non-negative");
  }
  if (max_splits < 1) throw ArgumentError("max_splits must be >= 1");

  BoostingResult result;
  result.ensemble.kind = EnsembleKind::boosting;
  result.ensemble.learning_rate = learning_rate;

  Eigen::VectorXd prediction = Eigen::VectorXd::Zero(y.size());
  Eigen::VectorXd residual = y;
  TreeFitOptions options;
  options.min_leaf_size = 1;
  options.max_splits = max_splits;
  for (int member = 0; member < b; ++member) {
    RegressionTree tree = RegressionTree::fit(x, residual, options);
    prediction += learning_rate * tree.predict_rows(x);
    residual = y - prediction;
    result.train_mse_trace.push_back(residual.squaredNorm() /
                                     static_cast<double>(y.size()));
    result.ensemble.members.push_back(std::move(tree));
  }
  return result;
}

}  // namespace mmpkit
