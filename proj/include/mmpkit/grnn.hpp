#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mmpkit/crossval.hpp"
#include "mmpkit/error.hpp"

namespace mmpkit {

/// General regression network: one Gaussian pattern unit per training row,
/// all sharing one spread. The prediction is the phi-weighted mean of the
/// stored targets, a convex combination, so it always lies between the
/// extreme training targets.
class GrnnModel {
 public:
  GrnnModel() = default;

  GrnnModel(Eigen::MatrixXd centers, Eigen::VectorXd targets, double spread)
      : centers_(std::move(centers)),
        targets_(std::move(targets)),
        spread_(spread) {
    if (centers_.rows() != targets_.size() || centers_.rows() < 1) {
      throw ArgumentError("grnn: centers must match targets");
    }
    if (!(spread_ > 0.0)) throw ArgumentError("grnn spread must be positive");
  }

  double spread() const { return spread_; }
  const Eigen::MatrixXd& centers() const { return centers_; }
  const Eigen::VectorXd& targets() const { return targets_; }

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::Index n = centers_.rows();
    const double denom = 2.0 * spread_ * spread_;
    double num = 0.0;
    double den = 0.0;
    double nearest_sq = std::numeric_limits<double>::infinity();
    Eigen::Index nearest = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sq = (centers_.row(i).transpose() - x).squaredNorm();
      if (sq < nearest_sq) {
        nearest_sq = sq;
        nearest = i;
      }
      const double phi = std::exp(-sq / denom);
      num += phi * targets_[i];
      den += phi;
    }
    // every pattern unit underflowed: fall back to the nearest centre
    if (den <= 0.0) return targets_[nearest];
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
  Eigen::MatrixXd centers_;
  Eigen::VectorXd targets_;
  double spread_ = 1.0;
};

struct SpreadSelection {
  double best_spread = 1.0;
  CvResult<double> cv;
};

/// Picks the common spread by k-fold cross validation. The grid is evaluated
/// largest-first so MSE ties resolve to the smoother model.
inline SpreadSelection grnn_select_spread(const Eigen::MatrixXd& x,
                                          const Eigen::VectorXd& y,
                                          std::vector<double> grid, int folds,
                                          std::uint64_t seed) {
  std::sort(grid.begin(), grid.end(), std::greater<>());
  auto cv = crossval<double>(
      grid, x, y, folds, seed,
      [](double spread, const Eigen::MatrixXd& xt, const Eigen::VectorXd& yt,
         const Eigen::MatrixXd& xv) {
        const GrnnModel model(xt, yt, spread);
        return model.predict_rows(xv);
      });
  SpreadSelection out;
  out.best_spread = cv.best();
  out.cv = std::move(cv);
  return out;
}

/// Default spread search grid: 0.05 to 3 in steps of 0.05.
inline std::vector<double> default_spread_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 60; ++i) grid.push_back(0.05 * i);
  return grid;
}

}  // namespace mmpkit
