#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <vector>

#include "mmpkit/error.hpp"
#include "mmpkit/lbfgs.hpp"

namespace mmpkit {

/// Gaussian process hyperparameters: observation noise, signal standard
/// deviation and characteristic length scale. All strictly positive.
struct GprHyperparams {
  double noise_sd = 0.7071;
  double signal_sd = 0.7071;
  double length_scale = 1.0;
};

/// Exponential covariance: sf^2 * exp(-||x - x'|| / sl). The norm is plain
/// Euclidean, not squared.
inline double exp_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                         const Eigen::Ref<const Eigen::VectorXd>& b,
                         double signal_sd, double length_scale) {
  if (!(signal_sd > 0.0) || !(length_scale > 0.0)) {
    throw ArgumentError("kernel parameters must be positive");
  }
  return signal_sd * signal_sd * std::exp(-(a - b).norm() / length_scale);
}

namespace detail {

inline Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = (x.row(i) - x.row(j)).norm();
      d(j, i) = d(i, j);
    }
  }
  return d;
}

/// Cholesky of K + noise*I with jitter retries (doubling, up to 6 times).
inline Eigen::LLT<Eigen::MatrixXd> robust_llt(const Eigen::MatrixXd& k_noise,
                                              double signal_var) {
  Eigen::LLT<Eigen::MatrixXd> llt(k_noise);
  if (llt.info() == Eigen::Success) return llt;
  double jitter = 1e-10 * signal_var;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::MatrixXd bumped = k_noise;
    bumped.diagonal().array() += jitter;
    llt.compute(bumped);
    if (llt.info() == Eigen::Success) return llt;
    jitter *= 2.0;
  }
  throw Error("covariance matrix is not positive definite even with jitter");
}

}  // namespace detail

struct GprLogLikelihood {
  double value = 0.0;
  Eigen::Vector3d gradient_log;  // d/d log(noise_sd, signal_sd, length_scale)
};

/// Log marginal likelihood of the training targets and its gradient with
/// respect to the logs of the hyperparameters:
///   L = -1/2 y'K~^-1 y - 1/2 log|K~| - N/2 log(2 pi),  K~ = K + noise^2 I.
inline GprLogLikelihood gpr_log_likelihood(const GprHyperparams& theta,
                                           const Eigen::MatrixXd& x,
                                           const Eigen::VectorXd& y) {
  if (x.rows() != y.size() || x.rows() < 1) {
    throw ArgumentError("gpr: input rows must match target length");
  }
  if (!(theta.noise_sd > 0.0) || !(theta.signal_sd > 0.0) ||
      !(theta.length_scale > 0.0)) {
    throw ArgumentError("gpr hyperparameters must be positive");
  }
  const Eigen::Index n = x.rows();
  const double sf2 = theta.signal_sd * theta.signal_sd;
  const Eigen::MatrixXd dist = detail::pairwise_distances(x);
  const Eigen::MatrixXd k =
      sf2 * (-dist / theta.length_scale).array().exp().matrix();
  Eigen::MatrixXd k_noise = k;
  k_noise.diagonal().array() += theta.noise_sd * theta.noise_sd;

  const auto llt = detail::robust_llt(k_noise, sf2);
  const Eigen::VectorXd alpha = llt.solve(y);
  const double log_det =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

  GprLogLikelihood out;
  out.value = -0.5 * y.dot(alpha) - 0.5 * log_det -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  // gradient: 1/2 tr((alpha alpha' - K~^-1) dK/dtheta_j)
  const Eigen::MatrixXd k_inv =
      llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd w = alpha * alpha.transpose() - k_inv;
  const double noise_var = theta.noise_sd * theta.noise_sd;
  // d/d log(noise): 2 noise^2 I
  out.gradient_log[0] = noise_var * w.trace();
  // d/d log(signal): 2 K
  out.gradient_log[1] = w.cwiseProduct(k).sum();
  // d/d log(length): K .* dist / length
  out.gradient_log[2] =
      0.5 * w.cwiseProduct(k.cwiseProduct(dist / theta.length_scale)).sum();
  return out;
}

struct GprPrediction {
  double mean = 0.0;
  double variance_latent = 0.0;       // uncertainty of the latent function
  double variance_observation = 0.0;  // latent plus noise
};

/// Zero-mean Gaussian process regressor with the exponential covariance.
class GprModel {
 public:
  GprModel() = default;

  /// Conditions on the data at fixed hyperparameters.
  static GprModel condition(Eigen::MatrixXd x, Eigen::VectorXd y,
                            const GprHyperparams& theta) {
    GprModel model;
    model.theta_ = theta;
    model.inputs_ = std::move(x);
    model.targets_ = std::move(y);
    const double sf2 = theta.signal_sd * theta.signal_sd;
    const Eigen::MatrixXd dist = detail::pairwise_distances(model.inputs_);
    Eigen::MatrixXd k_noise =
        sf2 * (-dist / theta.length_scale).array().exp().matrix();
    k_noise.diagonal().array() += theta.noise_sd * theta.noise_sd;
    const auto llt = detail::robust_llt(k_noise, sf2);
    model.chol_lower_ = llt.matrixL();
    model.alpha_ = llt.solve(model.targets_);
    model.log_likelihood_ =
        -0.5 * model.targets_.dot(model.alpha_) -
        model.chol_lower_.diagonal().array().log().sum() -
        0.5 * static_cast<double>(model.targets_.size()) *
            std::log(2.0 * std::numbers::pi);
    return model;
  }

  /// Maximizes the log marginal likelihood over log-hyperparameters with
  /// L-BFGS, then conditions at the optimum. `objective_trace` (if given)
  /// receives the negative log likelihood after each accepted step.
  static GprModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const GprHyperparams& initial = {},
                      const LbfgsOptions& options = {},
                      std::vector<double>* objective_trace = nullptr,
                      LbfgsStatus* status = nullptr) {
    Eigen::VectorXd log_theta(3);
    log_theta << std::log(initial.noise_sd), std::log(initial.signal_sd),
        std::log(initial.length_scale);
    const auto objective = [&x, &y](const Eigen::VectorXd& p,
                                    Eigen::VectorXd& grad) {
      const GprHyperparams theta{std::exp(p[0]), std::exp(p[1]),
                                 std::exp(p[2])};
      const auto ll = gpr_log_likelihood(theta, x, y);
      grad = -ll.gradient_log;
      return -ll.value;
    };
    const auto result = lbfgs_minimize(objective, std::move(log_theta), options);
    if (objective_trace != nullptr) *objective_trace = result.trace;
    if (status != nullptr) *status = result.status;
    const GprHyperparams theta{std::exp(result.x[0]), std::exp(result.x[1]),
                               std::exp(result.x[2])};
    return condition(x, y, theta);
  }

  const GprHyperparams& hyperparams() const { return theta_; }
  double log_likelihood() const { return log_likelihood_; }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& targets() const { return targets_; }

  GprPrediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::Index n = inputs_.rows();
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      k_star[i] = exp_kernel(inputs_.row(i).transpose(), x, theta_.signal_sd,
                             theta_.length_scale);
    }
    GprPrediction p;
    p.mean = k_star.dot(alpha_);
    const Eigen::VectorXd v =
        chol_lower_.triangularView<Eigen::Lower>().solve(k_star);
    const double latent =
        theta_.signal_sd * theta_.signal_sd - v.squaredNorm();
    p.variance_latent = std::max(latent, 0.0);
    p.variance_observation =
        p.variance_latent + theta_.noise_sd * theta_.noise_sd;
    return p;
  }

  Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out[i] = predict(x.row(i).transpose()).mean;
    }
    return out;
  }

 private:
  GprHyperparams theta_;
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  Eigen::MatrixXd chol_lower_;
  Eigen::VectorXd alpha_;
  double log_likelihood_ = 0.0;
};

}  // namespace mmpkit
