#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>

#include "mmpkit/error.hpp"
#include "mmpkit/rng.hpp"

namespace mmpkit {

/// Single-hidden-layer network with random input weights and biases; only
/// the output weights are learned, as the minimum-norm least-squares solution
/// of the hidden-layer system via the Moore-Penrose pseudoinverse.
class ElmModel {
 public:
  ElmModel() = default;

  static ElmModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      int hidden, std::uint64_t seed) {
    if (x.rows() != y.size() || x.rows() < 1) {
      throw ArgumentError("elm: input rows must match target length");
    }
    if (hidden < 1) throw ArgumentError("elm requires at least one neuron");
    ElmModel model;
    model.seed_ = seed;
    Rng rng(seed);
    model.input_weights_.resize(hidden, x.cols());
    model.biases_.resize(hidden);
    for (int j = 0; j < hidden; ++j) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        model.input_weights_(j, c) = rng.uniform(-1.0, 1.0);
      }
      model.biases_[j] = rng.uniform(-1.0, 1.0);
    }
    const Eigen::MatrixXd h = model.hidden_matrix(x);
    // machine-epsilon-scaled singular value cutoff (Eigen's default threshold)
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    model.output_weights_ = svd.solve(y);
    return model;
  }

  int hidden_count() const { return static_cast<int>(biases_.size()); }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& input_weights() const { return input_weights_; }
  const Eigen::VectorXd& biases() const { return biases_; }
  const Eigen::VectorXd& output_weights() const { return output_weights_; }

  /// Hidden-layer response matrix: H(i, j) = g(w_j . x_i + b_j).
  Eigen::MatrixXd hidden_matrix(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::MatrixXd h = x * input_weights_.transpose();
    h.rowwise() += biases_.transpose();
    return h.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
  }

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double out = 0.0;
    for (int j = 0; j < hidden_count(); ++j) {
      const double z = input_weights_.row(j).dot(x) + biases_[j];
      out += output_weights_[j] / (1.0 + std::exp(-z));
    }
    return out;
  }

  Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    return hidden_matrix(x) * output_weights_;
  }

  /// Restores a fitted network from serialized state.
  static ElmModel from_state(Eigen::MatrixXd input_weights,
                             Eigen::VectorXd biases,
                             Eigen::VectorXd output_weights,
                             std::uint64_t seed) {
    ElmModel m;
    m.input_weights_ = std::move(input_weights);
    m.biases_ = std::move(biases);
    m.output_weights_ = std::move(output_weights);
    m.seed_ = seed;
    return m;
  }

 private:
  Eigen::MatrixXd input_weights_;
  Eigen::VectorXd biases_;
  Eigen::VectorXd output_weights_;
  std::uint64_t seed_ = 0;
};

}  // namespace mmpkit
