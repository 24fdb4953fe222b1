#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mmpkit/dataset.hpp"
#include "mmpkit/error.hpp"
#include "mmpkit/rng.hpp"

namespace mmpkit {

enum class SplitMethod { hspxy, random };

inline const char* to_string(SplitMethod m) {
  return m == SplitMethod::hspxy ? "hspxy" : "random";
}

/// Disjoint train/test split of a dataset's row indices.
/// Training indices are listed in selection order for the boundary-covering
/// partitioner, ascending for the random one; test indices are ascending.
struct PartitionResult {
  std::vector<Eigen::Index> train_indices;
  std::vector<Eigen::Index> test_indices;
  SplitMethod method = SplitMethod::hspxy;
  std::optional<std::uint64_t> seed;
};

/// Per-row fold labels in [0, k) for k-fold cross validation.
struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of;  // one label per training row
};

/// Cosine similarity between two input vectors; value in [-1, 1].
inline double cosine_distance(const Eigen::Ref<const Eigen::VectorXd>& r,
                              const Eigen::Ref<const Eigen::VectorXd>& t) {
  const double nr = r.norm();
  const double nt = t.norm();
  if (nr <= 0.0 || nt <= 0.0) {
    throw UndefinedAngleError("cosine distance undefined for zero-norm vector");
  }
  return r.dot(t) / (nr * nt);
}

/// Pool-wide maxima used to normalize each term of the hybrid distance.
struct HybridNorms {
  double max_input_dist = 0.0;
  double max_cosine = 0.0;
  double max_output_dist = 0.0;
};

/// Hybrid distance between two samples given precomputed pool maxima:
///   D = 1 + d_x/max(d_x) - d_cos/max(d_cos) + d_y/max(d_y).
/// A term whose pool maximum is zero contributes zero.
inline double hybrid_distance(const Eigen::Ref<const Eigen::VectorXd>& xr,
                              double yr,
                              const Eigen::Ref<const Eigen::VectorXd>& xt,
                              double yt, const HybridNorms& norms) {
  double d = 1.0;
  if (norms.max_input_dist != 0.0) {
    d += (xr - xt).norm() / norms.max_input_dist;
  }
  if (norms.max_cosine != 0.0) {
    d -= cosine_distance(xr, xt) / norms.max_cosine;
  }
  if (norms.max_output_dist != 0.0) {
    d += std::abs(yr - yt) / norms.max_output_dist;
  }
  return d;
}

namespace detail {

/// Centers each column and divides by its standard deviation; a zero-variance
/// column is centered only (it then contributes nothing to any distance).
inline Eigen::MatrixXd zscore_tolerant(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double mean = m.col(c).mean();
    out.col(c).array() -= mean;
    if (m.rows() > 1) {
      const double sd = std::sqrt(out.col(c).squaredNorm() / (n - 1.0));
      if (sd > 0.0) out.col(c) /= sd;
    }
  }
  return out;
}

inline HybridNorms pool_norms(const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y) {
  HybridNorms norms;
  norms.max_cosine = -std::numeric_limits<double>::infinity();
  const Eigen::Index n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      norms.max_input_dist =
          std::max(norms.max_input_dist, (x.row(i) - x.row(j)).norm());
      norms.max_cosine = std::max(
          norms.max_cosine, cosine_distance(x.row(i).transpose(),
                                            x.row(j).transpose()));
      norms.max_output_dist =
          std::max(norms.max_output_dist, std::abs(y[i] - y[j]));
    }
  }
  if (!std::isfinite(norms.max_cosine)) norms.max_cosine = 0.0;
  return norms;
}

}  // namespace detail

/// Full pairwise hybrid-distance matrix over the pool (diagonal zero).
/// Pool maxima are computed over all distinct pairs of the given rows.
inline Eigen::MatrixXd hybrid_distance_matrix(const Eigen::MatrixXd& x,
                                              const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw ArgumentError("input row count must match target length");
  }
  const Eigen::Index n = x.rows();
  if (n < 2) throw ArgumentError("distance matrix requires >= 2 samples");
  const HybridNorms norms = detail::pool_norms(x, y);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = hybrid_distance(x.row(i).transpose(), y[i],
                                       x.row(j).transpose(), y[j], norms);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

/// Greedy boundary-covering selection on a precomputed hybrid-distance
/// matrix: seeds with the pair of largest distance, then repeatedly adds the
/// candidate whose minimum distance to the already-selected set is largest.
/// Ties break to the lowest row index.
inline std::vector<Eigen::Index> hspxy_select_from_matrix(
    const Eigen::MatrixXd& d, Eigen::Index q) {
  const Eigen::Index n = d.rows();
  if (q < 2 || q > n) {
    throw ArgumentError("hspxy requires 2 <= q <= N (q=" + std::to_string(q) +
                        ", N=" + std::to_string(n) + ")");
  }
  Eigen::Index best_i = 0;
  Eigen::Index best_j = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (d(i, j) > best) {
        best = d(i, j);
        best_i = i;
        best_j = j;
      }
    }
  }
  std::vector<Eigen::Index> selected = {best_i, best_j};
  std::vector<bool> in_train(static_cast<std::size_t>(n), false);
  in_train[static_cast<std::size_t>(best_i)] = true;
  in_train[static_cast<std::size_t>(best_j)] = true;

  // min distance from each candidate to the selected set, kept incrementally
  std::vector<double> min_dist(static_cast<std::size_t>(n));
  for (Eigen::Index u = 0; u < n; ++u) {
    min_dist[static_cast<std::size_t>(u)] =
        std::min(d(u, best_i), d(u, best_j));
  }
  while (static_cast<Eigen::Index>(selected.size()) < q) {
    Eigen::Index pick = -1;
    double pick_val = -std::numeric_limits<double>::infinity();
    for (Eigen::Index u = 0; u < n; ++u) {
      if (in_train[static_cast<std::size_t>(u)]) continue;
      if (min_dist[static_cast<std::size_t>(u)] > pick_val) {
        pick_val = min_dist[static_cast<std::size_t>(u)];
        pick = u;
      }
    }
    selected.push_back(pick);
    in_train[static_cast<std::size_t>(pick)] = true;
    for (Eigen::Index u = 0; u < n; ++u) {
      min_dist[static_cast<std::size_t>(u)] =
          std::min(min_dist[static_cast<std::size_t>(u)], d(u, pick));
    }
  }
  return selected;
}

/// Boundary-covering train/test partition (deterministic, no seed).
/// Distances are computed on internally z-scored inputs and target so that no
/// single raw unit dominates the Euclidean terms.
inline PartitionResult hspxy_select(const Dataset& data, Eigen::Index q) {
  const Eigen::MatrixXd x = detail::zscore_tolerant(data.inputs());
  const Eigen::MatrixXd yz = detail::zscore_tolerant(data.targets());
  const Eigen::MatrixXd d = hybrid_distance_matrix(x, yz.col(0));

  PartitionResult result;
  result.method = SplitMethod::hspxy;
  result.train_indices = hspxy_select_from_matrix(d, q);
  std::vector<bool> in_train(static_cast<std::size_t>(data.size()), false);
  for (const auto i : result.train_indices) {
    in_train[static_cast<std::size_t>(i)] = true;
  }
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (!in_train[static_cast<std::size_t>(i)]) {
      result.test_indices.push_back(i);
    }
  }
  return result;
}

/// Seeded uniform train/test partition.
inline PartitionResult random_split(const Dataset& data, Eigen::Index q,
                                    std::uint64_t seed,
                                    Warnings* warnings = nullptr) {
  const Eigen::Index n = data.size();
  if (q < 1 || q > n) {
    throw ArgumentError("random split requires 1 <= q <= N");
  }
  if (q == n && warnings != nullptr) {
    warnings->push_back("training fraction selects every row; test set empty");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);

  PartitionResult result;
  result.method = SplitMethod::random;
  result.seed = seed;
  result.train_indices.assign(order.begin(), order.begin() + q);
  result.test_indices.assign(order.begin() + q, order.end());
  std::sort(result.train_indices.begin(), result.train_indices.end());
  std::sort(result.test_indices.begin(), result.test_indices.end());
  return result;
}

/// Seeded shuffle followed by round-robin fold labels; sizes differ by at
/// most one.
inline FoldAssignment kfold_split(Eigen::Index n_train, int k,
                                  std::uint64_t seed) {
  if (k < 2 || static_cast<Eigen::Index>(k) > n_train) {
    throw ArgumentError("kfold requires 2 <= k <= n_train");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  for (Eigen::Index i = 0; i < n_train; ++i) {
    order[static_cast<std::size_t>(i)] = i;
  }
  Rng rng(seed);
  rng.shuffle(order);
  FoldAssignment folds;
  folds.k = k;
  folds.fold_of.resize(static_cast<std::size_t>(n_train));
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    folds.fold_of[static_cast<std::size_t>(order[pos])] =
        static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return folds;
}

/// Number of training rows implied by a training fraction.
inline Eigen::Index train_count(Eigen::Index n, double fraction) {
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw ArgumentError("train fraction must lie in (0, 1)");
  }
  return static_cast<Eigen::Index>(
      std::ceil(fraction * static_cast<double>(n)));
}

}  // namespace mmpkit
