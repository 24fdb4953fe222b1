#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mmpkit/error.hpp"
#include "mmpkit/metrics.hpp"
#include "mmpkit/partition.hpp"

namespace mmpkit {

template <typename Config>
struct CvOutcome {
  Config config{};
  double mean_mse = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
  std::string error;
};

template <typename Config>
struct CvResult {
  std::vector<CvOutcome<Config>> outcomes;  // in the order configs were given
  std::size_t best_index = 0;

  const Config& best() const { return outcomes[best_index].config; }
  double best_mse() const { return outcomes[best_index].mean_mse; }
};

/// Generic k-fold cross validation over a hyperparameter grid.
///
/// `fit_predict(config, x_train, y_train, x_val) -> VectorXd` fits a model on
/// the training block and returns predictions for the validation block. A
/// throwing fold marks that config failed without aborting the run. The best
/// config minimizes the mean of per-fold validation MSE; ties go to the
/// earliest config in the list, so callers order grids simplest-first.
template <typename Config, typename FitPredict>
CvResult<Config> crossval(const std::vector<Config>& configs,
                          const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          int folds, std::uint64_t seed,
                          FitPredict&& fit_predict) {
  if (configs.empty()) throw ArgumentError("crossval requires a nonempty grid");
  if (x.rows() != y.size()) {
    throw ArgumentError("crossval: input rows must match target length");
  }
  const Eigen::Index n = x.rows();
  const FoldAssignment assignment = kfold_split(n, folds, seed);

  // Precompute per-fold row blocks once; shared by every config.
  struct FoldBlock {
    Eigen::MatrixXd x_train, x_val;
    Eigen::VectorXd y_train, y_val;
  };
  std::vector<FoldBlock> blocks(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train_rows, val_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (assignment.fold_of[static_cast<std::size_t>(i)] == f) {
        val_rows.push_back(i);
      } else {
        train_rows.push_back(i);
      }
    }
    // fitting must never see validation rows; both lists are ascending
    std::size_t ti = 0;
    for (const auto r : val_rows) {
      while (ti < train_rows.size() && train_rows[ti] < r) ++ti;
      if (ti < train_rows.size() && train_rows[ti] == r) {
        throw Error("crossval fold leak detected");
      }
    }
    if (train_rows.size() + val_rows.size() != static_cast<std::size_t>(n)) {
      throw Error("crossval fold does not cover every row");
    }
    auto& block = blocks[static_cast<std::size_t>(f)];
    block.x_train.resize(static_cast<Eigen::Index>(train_rows.size()), x.cols());
    block.y_train.resize(static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      block.x_train.row(static_cast<Eigen::Index>(i)) = x.row(train_rows[i]);
      block.y_train[static_cast<Eigen::Index>(i)] = y[train_rows[i]];
    }
    block.x_val.resize(static_cast<Eigen::Index>(val_rows.size()), x.cols());
    block.y_val.resize(static_cast<Eigen::Index>(val_rows.size()));
    for (std::size_t i = 0; i < val_rows.size(); ++i) {
      block.x_val.row(static_cast<Eigen::Index>(i)) = x.row(val_rows[i]);
      block.y_val[static_cast<Eigen::Index>(i)] = y[val_rows[i]];
    }
  }

  CvResult<Config> result;
  result.outcomes.reserve(configs.size());
  for (const auto& config : configs) {
    CvOutcome<Config> outcome;
    outcome.config = config;
    double total = 0.0;
    try {
      for (const auto& block : blocks) {
        const Eigen::VectorXd pred =
            fit_predict(config, block.x_train, block.y_train, block.x_val);
        if (pred.size() != block.y_val.size()) {
          throw Error("fit_predict returned wrong prediction count");
        }
        total += mse(block.y_val, pred);
      }
      outcome.mean_mse = total / static_cast<double>(folds);
    } catch (const std::exception& e) {
      outcome.failed = true;
      outcome.error = e.what();
    }
    result.outcomes.push_back(std::move(outcome));
  }

  bool any_ok = false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const auto& o = result.outcomes[i];
    if (o.failed) continue;
    if (!any_ok || o.mean_mse < best) {
      any_ok = true;
      best = o.mean_mse;
      result.best_index = i;
    }
  }
  if (!any_ok) {
    throw Error("crossval: every config failed; first error: " +
                result.outcomes.front().error);
  }
  return result;
}

}  // namespace mmpkit
