#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mmpkit/crossval.hpp"
#include "mmpkit/error.hpp"

namespace mmpkit {

/// Weight form for the k-nearest-neighbour estimate. `normalized` is the
/// standard inverse-squared-distance weighted mean; `literal` instead averages
/// target-times-squared-distance over the k neighbours and exists only for
/// compatibility experiments.
enum class WknnForm { normalized, literal };

/// Distance-weighted k-nearest-neighbour regressor over stored (normalized)
/// training rows. Lookup is an exhaustive scan; the intended datasets hold on
/// the order of a hundred rows.
class WknnModel {
 public:
  WknnModel() = default;

  WknnModel(Eigen::MatrixXd inputs, Eigen::VectorXd targets, int k,
            WknnForm form = WknnForm::normalized)
      : inputs_(std::move(inputs)),
        targets_(std::move(targets)),
        k_(k),
        form_(form) {
    if (inputs_.rows() != targets_.size()) {
      throw ArgumentError("wknn: input rows must match target length");
    }
    if (k_ < 1 || k_ > inputs_.rows()) {
      throw ArgumentError("wknn requires 1 <= k <= stored rows");
    }
  }

  int k() const { return k_; }
  WknnForm form() const { return form_; }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& targets() const { return targets_; }

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::Index n = inputs_.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Eigen::VectorXd sq_dist(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      sq_dist[i] = (inputs_.row(i).transpose() - x).squaredNorm();
    }
    // ties resolve to the lower row index
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return sq_dist[a] != sq_dist[b] ? sq_dist[a] < sq_dist[b] : a < b;
    });

    // exact-match shortcut: mean target over all zero-distance rows
    if (sq_dist[order[0]] == 0.0) {
      double sum = 0.0;
      Eigen::Index count = 0;
      for (const auto i : order) {
        if (sq_dist[i] != 0.0) break;
        sum += targets_[i];
        ++count;
      }
      return sum / static_cast<double>(count);
    }

    if (form_ == WknnForm::literal) {
      double sum = 0.0;
      for (int j = 0; j < k_; ++j) {
        sum += targets_[order[static_cast<std::size_t>(j)]] *
               sq_dist[order[static_cast<std::size_t>(j)]];
      }
      return sum / static_cast<double>(k_);
    }
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < k_; ++j) {
      const Eigen::Index i = order[static_cast<std::size_t>(j)];
      const double w = 1.0 / sq_dist[i];
      num += w * targets_[i];
      den += w;
    }
    return num / den;
  }

  Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out[i] = predict(x.row(i).transpose());
    }
    return out;
  }

 private:
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  int k_ = 1;
  WknnForm form_ = WknnForm::normalized;
};

struct KSelection {
  int best_k = 1;
  CvResult<int> cv;  // per-k mean validation MSE, grid order
};

/// Picks k by k-fold cross validation over the grid (ascending ties prefer
/// fewer neighbours). MSE is computed on the scale of the given targets.
inline KSelection select_k(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const std::vector<int>& k_grid, int folds,
                           std::uint64_t seed,
                           WknnForm form = WknnForm::normalized) {
  auto cv = crossval<int>(
      k_grid, x, y, folds, seed,
      [form](int k, const Eigen::MatrixXd& xt, const Eigen::VectorXd& yt,
             const Eigen::MatrixXd& xv) {
        const WknnModel model(xt, yt, k, form);
        return model.predict_rows(xv);
      });
  KSelection out;
  out.best_k = cv.best();
  out.cv = std::move(cv);
  return out;
}

/// Default search grid for the neighbour count.
inline std::vector<int> default_k_grid() {
  std::vector<int> grid(15);
  std::iota(grid.begin(), grid.end(), 1);
  return grid;
}

}  // namespace mmpkit
