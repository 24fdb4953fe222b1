#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmpkit/error.hpp"
#include "mmpkit/rng.hpp"

namespace mmpkit {

struct TreeNode {
  int feature = -1;        // -1 for leaves
  double threshold = 0.0;  // left child takes x[feature] < threshold
  double value = 0.0;      // leaf prediction: mean target of the region
  int left = -1;
  int right = -1;
  int n_samples = 0;

  bool is_leaf() const { return feature < 0; }
};

struct TreeFitOptions {
  int min_leaf_size = 1;
  int max_splits = -1;        // -1: unlimited
  int feature_subset = -1;    // -1: consider every feature (set for forests)
  Rng* feature_rng = nullptr; // required when feature_subset is set
  std::vector<std::vector<int>>* subset_log = nullptr;  // per-node subsets
};

/// Binary regression tree grown by greedy recursive splitting.
///
/// Every admissible (feature, cut-point) pair is scored by the summed
/// residual sum of squares of the two children; cut-points are midpoints
/// between consecutive sorted distinct feature values. Ties break to the
/// lower feature index, then the lower cut-point. When a split budget is set
/// the leaf with the largest RSS reduction is expanded first.
class RegressionTree {
 public:
  RegressionTree() = default;

  static RegressionTree fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y,
                            const TreeFitOptions& options = {}) {
    if (x.rows() != y.size()) {
      throw ArgumentError("tree: input rows must match target length");
    }
    if (x.rows() < 1) throw ArgumentError("tree requires a nonempty training set");
    if (options.min_leaf_size < 1) {
      throw ArgumentError("min_leaf_size must be >= 1");
    }
    if (options.feature_subset == 0 ||
        options.feature_subset > static_cast<int>(x.cols())) {
      throw ArgumentError("feature subset size must lie in [1, P]");
    }
    if (options.feature_subset > 0 && options.feature_rng == nullptr) {
      throw ArgumentError("feature sampling requires an Rng");
    }

    RegressionTree tree;
    Builder builder{x, y, options, tree.nodes_};
    builder.grow();
    return tree;
  }

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    int node = 0;
    while (!nodes_[static_cast<std::size_t>(node)].is_leaf()) {
      const auto& n = nodes_[static_cast<std::size_t>(node)];
      node = x[n.feature] < n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(node)].value;
  }

  Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out[i] = predict(x.row(i).transpose());
    }
    return out;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& mutable_nodes() { return nodes_; }

  int leaf_count() const {
    int count = 0;
    for (const auto& n : nodes_) count += n.is_leaf() ? 1 : 0;
    return count;
  }

  /// Indented rendering: cut conditions at internal nodes, constants at
  /// leaves.
  std::string to_text(const std::vector<std::string>& feature_names = {}) const {
    std::ostringstream os;
    render(os, 0, 0, feature_names);
    return os.str();
  }

  bool operator==(const RegressionTree& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& a = nodes_[i];
      const auto& b = other.nodes_[i];
      if (a.feature != b.feature || a.threshold != b.threshold ||
          a.value != b.value || a.left != b.left || a.right != b.right) {
        return false;
      }
    }
    return true;
  }

 private:
  struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double child_rss = 0.0;
    double gain = -1.0;
    bool found = false;
  };

  struct Builder {
    const Eigen::Ref<const Eigen::MatrixXd>& x;
    const Eigen::Ref<const Eigen::VectorXd>& y;
    const TreeFitOptions& options;
    std::vector<TreeNode>& nodes;
    std::vector<std::vector<Eigen::Index>> node_rows;
    std::vector<SplitChoice> node_split;

    // RSS of a row set with sums accumulated in row order, so that identical
    // partitions reached through different features score exactly equal.
    double rss(const std::vector<Eigen::Index>& rows) const {
      double sum = 0.0;
      double sumsq = 0.0;
      for (const auto r : rows) {
        sum += y[r];
        sumsq += y[r] * y[r];
      }
      return sumsq - sum * sum / static_cast<double>(rows.size());
    }

    double mean(const std::vector<Eigen::Index>& rows) const {
      double sum = 0.0;
      for (const auto r : rows) sum += y[r];
      return sum / static_cast<double>(rows.size());
    }

    std::vector<int> candidate_features() const {
      const int p = static_cast<int>(x.cols());
      std::vector<int> features(static_cast<std::size_t>(p));
      for (int j = 0; j < p; ++j) features[static_cast<std::size_t>(j)] = j;
      if (options.feature_subset < 0 || options.feature_subset == p) {
        return features;
      }
      options.feature_rng->shuffle(features);
      features.resize(static_cast<std::size_t>(options.feature_subset));
      std::sort(features.begin(), features.end());
      if (options.subset_log != nullptr) options.subset_log->push_back(features);
      return features;
    }

    SplitChoice best_split(const std::vector<Eigen::Index>& rows) const {
      SplitChoice best;
      if (static_cast<int>(rows.size()) < 2 * options.min_leaf_size) return best;
      // pure nodes are final
      double y_min = y[rows.front()];
      double y_max = y_min;
      for (const auto r : rows) {
        y_min = std::min(y_min, y[r]);
        y_max = std::max(y_max, y[r]);
      }
      if (y_min == y_max) return best;
      const double node_rss = rss(rows);
      for (const int j : candidate_features()) {
        std::vector<double> values;
        values.reserve(rows.size());
        for (const auto r : rows) values.push_back(x(r, j));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
          const double cut = 0.5 * (values[v] + values[v + 1]);
          double sum_l = 0.0, sumsq_l = 0.0;
          double sum_r = 0.0, sumsq_r = 0.0;
          int n_l = 0, n_r = 0;
          for (const auto r : rows) {
            if (x(r, j) < cut) {
              sum_l += y[r];
              sumsq_l += y[r] * y[r];
              ++n_l;
            } else {
              sum_r += y[r];
              sumsq_r += y[r] * y[r];
              ++n_r;
            }
          }
          if (n_l < options.min_leaf_size || n_r < options.min_leaf_size) {
            continue;
          }
          const double child_rss = (sumsq_l - sum_l * sum_l / n_l) +
                                   (sumsq_r - sum_r * sum_r / n_r);
          if (!best.found || child_rss < best.child_rss) {
            best.found = true;
            best.feature = j;
            best.threshold = cut;
            best.child_rss = child_rss;
            best.gain = node_rss - child_rss;
          }
        }
      }
      if (best.found && !(best.gain > 0.0)) best.found = false;
      return best;
    }

    int add_leaf(std::vector<Eigen::Index> rows) {
      TreeNode node;
      node.value = mean(rows);
      node.n_samples = static_cast<int>(rows.size());
      nodes.push_back(node);
      node_rows.push_back(std::move(rows));
      node_split.push_back(best_split(node_rows.back()));
      return static_cast<int>(nodes.size()) - 1;
    }

    void grow() {
      std::vector<Eigen::Index> all(static_cast<std::size_t>(x.rows()));
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        all[static_cast<std::size_t>(i)] = i;
      }
      add_leaf(std::move(all));
      int splits = 0;
      while (options.max_splits < 0 || splits < options.max_splits) {
        // expand the leaf with the largest RSS reduction; ties to the oldest
        int pick = -1;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          if (!nodes[i].is_leaf() || !node_split[i].found) continue;
          if (pick < 0 ||
              node_split[i].gain > node_split[static_cast<std::size_t>(pick)].gain) {
            pick = static_cast<int>(i);
          }
        }
        if (pick < 0) break;
        const auto choice = node_split[static_cast<std::size_t>(pick)];
        std::vector<Eigen::Index> left_rows, right_rows;
        for (const auto r : node_rows[static_cast<std::size_t>(pick)]) {
          (x(r, choice.feature) < choice.threshold ? left_rows : right_rows)
              .push_back(r);
        }
        nodes[static_cast<std::size_t>(pick)].feature = choice.feature;
        nodes[static_cast<std::size_t>(pick)].threshold = choice.threshold;
        const int left = add_leaf(std::move(left_rows));
        const int right = add_leaf(std::move(right_rows));
        nodes[static_cast<std::size_t>(pick)].left = left;
        nodes[static_cast<std::size_t>(pick)].right = right;
        node_rows[static_cast<std::size_t>(pick)].clear();
        ++splits;
      }
    }
  };

  void render(std::ostringstream& os, int node, int depth,
              const std::vector<std::string>& names) const {
    const auto& n = nodes_[static_cast<std::size_t>(node)];
    const std::string indent(static_cast<std::size_t>(2 * depth), ' ');
    if (n.is_leaf()) {
      os << indent << "leaf: " << n.value << " (n=" << n.n_samples << ")\n";
      return;
    }
    const std::string name =
        n.feature < static_cast<int>(names.size())
            ? names[static_cast<std::size_t>(n.feature)]
            : "x" + std::to_string(n.feature + 1);
    os << indent << name << " < " << n.threshold << "\n";
    render(os, n.left, depth + 1, names);
    render(os, n.right, depth + 1, names);
  }

  std::vector<TreeNode> nodes_;
};

}  // namespace mmpkit
