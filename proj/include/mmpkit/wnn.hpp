#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "mmpkit/error.hpp"
#include "mmpkit/rng.hpp"

namespace mmpkit {

/// Width of a single-hidden-layer network from the free-parameter budget
/// rule: the budget is n_train * effectiveness parameters, and each hidden
/// neuron consumes params_per_neuron of them (inputs + translation +
/// dilation + output weight, i.e. P + 3).
inline int widrow_hidden_size(int n_train, double effectiveness,
                              int params_per_neuron) {
  if (n_train < 1 || !(effectiveness > 0.0) || params_per_neuron < 1) {
    throw ArgumentError("widrow sizing requires positive arguments");
  }
  const int width = static_cast<int>(
      std::floor(n_train * effectiveness / params_per_neuron));
  if (width < 1) {
    throw ConfigError("free-parameter budget admits no hidden neuron");
  }
  return width;
}

namespace detail {

inline double sinc(double b) {
  if (std::abs(b) < 1e-4) {
    const double b2 = b * b;
    return 1.0 - b2 / 6.0 + b2 * b2 / 120.0;
  }
  return std::sin(b) / b;
}

inline double sinc_derivative(double b) {
  if (std::abs(b) < 1e-4) {
    const double b2 = b * b;
    return b * (-1.0 / 3.0 + b2 / 30.0);
  }
  return std::cos(b) / b - std::sin(b) / (b * b);
}

}  // namespace detail

/// Real part of the frequency-B-spline wavelet,
///   H(u) = sqrt(fb) * sinc(fb u / m)^m * cos(2 pi fc u),
/// with sinc(0) = 1. The order m is a positive integer.
inline double bspline_wavelet(double u, int m, double fb, double fc) {
  const double s = detail::sinc(fb * u / m);
  return std::sqrt(fb) * std::pow(s, m) * std::cos(2.0 * std::numbers::pi * fc * u);
}

inline double bspline_wavelet_derivative(double u, int m, double fb, double fc) {
  const double scale = fb / m;
  const double s = detail::sinc(scale * u);
  const double c = std::cos(2.0 * std::numbers::pi * fc * u);
  const double ds = detail::sinc_derivative(scale * u) * scale;
  const double pow_m1 = std::pow(s, m - 1);
  return std::sqrt(fb) *
         (m * pow_m1 * ds * c -
          pow_m1 * s * 2.0 * std::numbers::pi * fc *
              std::sin(2.0 * std::numbers::pi * fc * u));
}

struct WnnConfig {
  int hidden = 0;              // 0: size from the free-parameter budget rule
  double effectiveness = 3.5;  // budget multiplier for the sizing rule
  int wavelet_order = 1;       // m
  double fb = 0.5;
  double fc = 0.5;
  double eta1 = 0.01;   // output/input weight learning rate
  double eta2 = 0.001;  // translation/dilation learning rate
  int max_epochs = 100;
  double sse_threshold = 1e-6;
  std::uint64_t seed = 1;
};

/// Gradients of the per-sample loss e = 1/2 (y - y_hat)^2 with respect to
/// every network parameter.
struct WnnGradients {
  Eigen::MatrixXd weights;       // L x P
  Eigen::VectorXd translations;  // b
  Eigen::VectorXd dilations;     // a
  Eigen::VectorXd output;        // beta
};

/// Wavelet-activation feed-forward network trained by online gradient
/// descent. Expects inputs and target normalized to [-1, 1].
class WnnModel {
 public:
  WnnModel() = default;

  /// Randomly initialized network: weights and output weights uniform on
  /// [-1, 1], dilations uniform on [0.5, 2], translations uniform over each
  /// neuron's net-input range on the training inputs.
  static WnnModel initialize(const Eigen::MatrixXd& x, const WnnConfig& config) {
    if (x.rows() < 1) throw ArgumentError("wnn requires training rows");
    WnnModel model;
    model.config_ = config;
    const int hidden =
        config.hidden > 0
            ? config.hidden
            : widrow_hidden_size(static_cast<int>(x.rows()),
                                 config.effectiveness,
                                 static_cast<int>(x.cols()) + 3);
    const Eigen::Index p = x.cols();
    Rng rng(config.seed);
    model.weights_.resize(hidden, p);
    model.output_.resize(hidden);
    model.dilations_.resize(hidden);
    model.translations_.resize(hidden);
    for (int j = 0; j < hidden; ++j) {
      for (Eigen::Index k = 0; k < p; ++k) {
        model.weights_(j, k) = rng.uniform(-1.0, 1.0);
      }
    }
    for (int j = 0; j < hidden; ++j) model.output_[j] = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < hidden; ++j) {
      model.dilations_[j] = rng.uniform(0.5, 2.0);
    }
    // translations drawn over the observed net-input range keep each wavelet
    // inside the data's support
    const Eigen::MatrixXd nets = x * model.weights_.transpose();  // N x L
    for (int j = 0; j < hidden; ++j) {
      const double lo = nets.col(j).minCoeff();
      const double hi = nets.col(j).maxCoeff();
      model.translations_[j] = hi > lo ? rng.uniform(lo, hi) : lo;
    }
    return model;
  }

  int hidden_count() const { return static_cast<int>(output_.size()); }
  const WnnConfig& config() const { return config_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& translations() const { return translations_; }
  const Eigen::VectorXd& dilations() const { return dilations_; }
  const Eigen::VectorXd& output_weights() const { return output_; }

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double y = 0.0;
    for (int j = 0; j < hidden_count(); ++j) {
      y += output_[j] * activation(j, weights_.row(j).dot(x));
    }
    return y;
  }

  Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out[i] = predict(x.row(i).transpose());
    }
    return out;
  }

  /// Analytic gradients at the current parameters for one sample.
  WnnGradients gradients(const Eigen::Ref<const Eigen::VectorXd>& x,
                         double y) const {
    const int hidden = hidden_count();
    WnnGradients g;
    g.weights.resize(hidden, weights_.cols());
    g.translations.resize(hidden);
    g.dilations.resize(hidden);
    g.output.resize(hidden);

    const double y_hat = predict(x);
    const double delta = -(y - y_hat);  // d e / d y_hat
    for (int j = 0; j < hidden; ++j) {
      const double net = weights_.row(j).dot(x);
      const double u = (net - translations_[j]) / dilations_[j];
      const double h = bspline_wavelet(u, config_.wavelet_order, config_.fb,
                                       config_.fc);
      const double dh = bspline_wavelet_derivative(u, config_.wavelet_order,
                                                   config_.fb, config_.fc);
      g.output[j] = delta * h;
      const double chain = delta * output_[j] * dh;
      g.weights.row(j) = chain / dilations_[j] * x.transpose();
      g.translations[j] = chain * (-1.0 / dilations_[j]);
      g.dilations[j] = chain * (-(net - translations_[j]) /
                                (dilations_[j] * dilations_[j]));
    }
    return g;
  }

  /// One online update from a single sample using the configured rates.
  void step(const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
    const WnnGradients g = gradients(x, y);
    output_ -= config_.eta1 * g.output;
    weights_ -= config_.eta1 * g.weights;
    translations_ -= config_.eta2 * g.translations;
    dilations_ -= config_.eta2 * g.dilations;
  }

  /// Flat parameter vector [w row-major, b, a, beta]; used by the
  /// finite-difference checks and by serialization.
  Eigen::VectorXd parameters() const {
    const int hidden = hidden_count();
    const Eigen::Index p = weights_.cols();
    Eigen::VectorXd flat(hidden * p + 3 * hidden);
    Eigen::Index k = 0;
    for (int j = 0; j < hidden; ++j) {
      for (Eigen::Index c = 0; c < p; ++c) flat[k++] = weights_(j, c);
    }
    for (int j = 0; j < hidden; ++j) flat[k++] = translations_[j];
    for (int j = 0; j < hidden; ++j) flat[k++] = dilations_[j];
    for (int j = 0; j < hidden; ++j) flat[k++] = output_[j];
    return flat;
  }

  void set_parameters(const Eigen::Ref<const Eigen::VectorXd>& flat) {
    const int hidden = hidden_count();
    const Eigen::Index p = weights_.cols();
    if (flat.size() != hidden * p + 3 * hidden) {
      throw ArgumentError("parameter vector has wrong length");
    }
    Eigen::Index k = 0;
    for (int j = 0; j < hidden; ++j) {
      for (Eigen::Index c = 0; c < p; ++c) weights_(j, c) = flat[k++];
    }
    for (int j = 0; j < hidden; ++j) translations_[j] = flat[k++];
    for (int j = 0; j < hidden; ++j) dilations_[j] = flat[k++];
    for (int j = 0; j < hidden; ++j) output_[j] = flat[k++];
    for (int j = 0; j < hidden; ++j) {
      if (dilations_[j] == 0.0) {
        throw ArgumentError("dilation factors must be nonzero");
      }
    }
  }

  /// Restores a trained network from serialized state.
  static WnnModel from_state(const WnnConfig& config, Eigen::MatrixXd weights,
                             Eigen::VectorXd translations,
                             Eigen::VectorXd dilations, Eigen::VectorXd output) {
    WnnModel m;
    m.config_ = config;
    m.weights_ = std::move(weights);
    m.translations_ = std::move(translations);
    m.dilations_ = std::move(dilations);
    m.output_ = std::move(output);
    return m;
  }

 private:
  double activation(int j, double net) const {
    const double u = (net - translations_[j]) / dilations_[j];
    return bspline_wavelet(u, config_.wavelet_order, config_.fb, config_.fc);
  }

  WnnConfig config_;
  Eigen::MatrixXd weights_;
  Eigen::VectorXd translations_;
  Eigen::VectorXd dilations_;
  Eigen::VectorXd output_;
};

struct WnnTrainResult {
  WnnModel model;
  std::vector<double> sse_trace;  // sum of squared errors after each epoch
};

/// Online (per-sample) gradient-descent training. Stops at max_epochs or when
/// the epoch SSE drops below the threshold; diverging parameters raise
/// TrainingDivergedError naming the epoch.
inline WnnTrainResult wnn_train(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y,
                                const WnnConfig& config) {
  if (x.rows() != y.size() || x.rows() < 1) {
    throw ArgumentError("wnn: input rows must match target length");
  }
  WnnTrainResult result;
  result.model = WnnModel::initialize(x, config);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      result.model.step(x.row(i).transpose(), y[i]);
    }
    double sse = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double err = y[i] - result.model.predict(x.row(i).transpose());
      sse += err * err;
    }
    if (!std::isfinite(sse)) {
      throw TrainingDivergedError("wnn training diverged at epoch " +
                                  std::to_string(epoch));
    }
    result.sse_trace.push_back(sse);
    if (sse <= config.sse_threshold) break;
  }
  return result;
}

}  // namespace mmpkit
