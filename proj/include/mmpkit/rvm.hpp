#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "mmpkit/crossval.hpp"
#include "mmpkit/error.hpp"

namespace mmpkit {

/// Candidate basis: one Gaussian RBF per training sample plus a bias column.
/// Column 0 is the bias; column 1+j evaluates exp(-||x - x_j||^2 / (2 w^2)).
inline Eigen::MatrixXd rvm_design_matrix(const Eigen::MatrixXd& x,
                                         double width) {
  if (!(width > 0.0)) throw ArgumentError("rvm width must be positive");
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd phi(n, n + 1);
  phi.col(0).setOnes();
  const double denom = 2.0 * width * width;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      phi(i, j + 1) =
          std::exp(-(x.row(i) - x.row(j)).squaredNorm() / denom);
    }
  }
  return phi;
}

struct RvmConfig {
  double width = 1.0;
  double alpha_tol = 1e-3;        // convergence: max |delta log alpha|
  double delta_l_tol = 1e-9;      // smallest likelihood gain worth acting on
  int max_actions = 1000;
  int noise_update_every = 5;     // accepted actions per noise re-estimate
  double initial_noise_var = 0.0; // 0: 0.1 * var(t)
};

struct RvmTraceEvent {
  int iteration = 0;
  char action = '?';  // 'i' seed, 'a' add, 'r' re-estimate, 'd' delete,
                      // 'n' noise update
  int basis = -1;     // candidate basis column (-1 for noise updates)
  double new_alpha = 0.0;  // infinity records a deletion
  double loglik_before = 0.0;
  double loglik_after = 0.0;
  double noise_var = 0.0;
};

struct RvmPrediction {
  double mean = 0.0;
  double variance = 0.0;  // noise plus weight-posterior uncertainty
};

/// Sparse Bayesian kernel regressor trained by sequential marginal-likelihood
/// maximization: basis functions are added, re-estimated or deleted one at a
/// time, always taking the action with the largest likelihood gain.
class RvmModel {
 public:
  RvmModel() = default;

  static RvmModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const RvmConfig& config,
                      std::vector<RvmTraceEvent>* trace = nullptr) {
    if (x.rows() != y.size() || x.rows() < 2) {
      throw ArgumentError("rvm requires >= 2 samples");
    }
    Trainer trainer(x, y, config, trace);
    return trainer.run();
  }

  /// Model with every basis pruned: predicts the prior mean everywhere.
  static RvmModel prior_only(double width, double noise_var) {
    RvmModel m;
    m.width_ = width;
    m.noise_var_ = noise_var;
    return m;
  }

  double width() const { return width_; }
  double noise_variance() const { return noise_var_; }
  bool has_bias() const { return has_bias_; }
  /// Training-row indices whose RBF basis survived pruning.
  const std::vector<Eigen::Index>& relevance_rows() const {
    return relevance_rows_;
  }
  const Eigen::VectorXd& weight_mean() const { return mu_; }
  const Eigen::MatrixXd& weight_covariance() const { return sigma_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  int basis_count() const { return static_cast<int>(mu_.size()); }

  /// Retained-basis response vector for a query point.
  Eigen::VectorXd basis(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Eigen::VectorXd phi(basis_count());
    Eigen::Index k = 0;
    if (has_bias_) phi[k++] = 1.0;
    const double denom = 2.0 * width_ * width_;
    for (std::size_t i = 0; i < relevance_rows_.size(); ++i) {
      phi[k++] = std::exp(
          -(relevance_inputs_.row(static_cast<Eigen::Index>(i)).transpose() - x)
               .squaredNorm() /
          denom);
    }
    return phi;
  }

  RvmPrediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (basis_count() == 0) return RvmPrediction{0.0, noise_var_};
    const Eigen::VectorXd phi = basis(x);
    RvmPrediction p;
    p.mean = mu_.dot(phi);
    p.variance = noise_var_ + phi.dot(sigma_ * phi);
    return p;
  }

  Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out[i] = predict(x.row(i).transpose()).mean;
    }
    return out;
  }

  /// Restores a fitted model from serialized state.
  static RvmModel from_state(double width, double noise_var, bool has_bias,
                             std::vector<Eigen::Index> relevance_rows,
                             Eigen::MatrixXd relevance_inputs,
                             Eigen::VectorXd mu, Eigen::MatrixXd sigma,
                             Eigen::VectorXd alpha) {
    RvmModel m;
    m.width_ = width;
    m.noise_var_ = noise_var;
    m.has_bias_ = has_bias;
    m.relevance_rows_ = std::move(relevance_rows);
    m.relevance_inputs_ = std::move(relevance_inputs);
    m.mu_ = std::move(mu);
    m.sigma_ = std::move(sigma);
    m.alpha_ = std::move(alpha);
    return m;
  }

 private:
  class Trainer {
   public:
    Trainer(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
            const RvmConfig& config, std::vector<RvmTraceEvent>* trace)
        : x_(x), t_(y), config_(config), trace_(trace) {
      phi_ = rvm_design_matrix(x, config.width);
      m_total_ = phi_.cols();
      gram_ = phi_.transpose() * phi_;
      phi_t_ = phi_.transpose() * t_;
      const double var_t =
          (t_.array() - t_.mean()).square().sum() /
          std::max<double>(1.0, static_cast<double>(t_.size() - 1));
      noise_var_ = config.initial_noise_var > 0.0 ? config.initial_noise_var
                                                  : std::max(1e-6, 0.1 * var_t);
      alpha_.assign(static_cast<std::size_t>(m_total_),
                    std::numeric_limits<double>::infinity());
    }

    RvmModel run() {
      initialize();
      update_posterior();
      if (trace_ != nullptr) {
        const double ll = log_marginal();
        trace_->push_back(RvmTraceEvent{
            -1, 'i', active_.front(),
            alpha_[static_cast<std::size_t>(active_.front())], ll, ll,
            noise_var_});
      }
      int since_noise_update = 0;
      for (int iteration = 0; iteration < config_.max_actions; ++iteration) {
        const Action action = select_action();
        if (action.kind == 'x') break;  // converged
        const double before = log_marginal();
        apply(action);
        update_posterior();
        if (trace_ != nullptr) {
          trace_->push_back(RvmTraceEvent{iteration, action.kind, action.basis,
                                          action.kind == 'd'
                                              ? std::numeric_limits<double>::infinity()
                                              : action.new_alpha,
                                          before, log_marginal(), noise_var_});
        }
        if (++since_noise_update >= config_.noise_update_every) {
          since_noise_update = 0;
          reestimate_noise(iteration);
        }
      }
      reestimate_noise(-1);
      return extract();
    }

   private:
    struct Action {
      char kind = 'x';  // 'a', 'r', 'd' or 'x' for none
      int basis = -1;
      double delta_l = 0.0;
      double new_alpha = 0.0;
    };

    bool active(int m) const {
      return std::isfinite(alpha_[static_cast<std::size_t>(m)]);
    }

    void initialize() {
      // seed with the basis best aligned with the targets
      int best = -1;
      double best_alpha = 0.0;
      double best_proj = -1.0;
      for (int m = 0; m < m_total_; ++m) {
        const double norm2 = gram_(m, m);
        if (norm2 <= 0.0) continue;
        const double proj = phi_t_[m] * phi_t_[m] / norm2;
        if (proj > noise_var_ && proj > best_proj) {
          best_proj = proj;
          best = m;
          best_alpha = norm2 / (proj - noise_var_);
        }
      }
      if (best < 0) {
        throw DegenerateFitError(
            "no basis function rises above the noise floor");
      }
      alpha_[static_cast<std::size_t>(best)] = best_alpha;
      active_.push_back(best);
    }

    // Recomputes Sigma, mu and the per-basis statistics S, Q from scratch.
    void update_posterior() {
      const int k = static_cast<int>(active_.size());
      const double beta = 1.0 / noise_var_;
      Eigen::MatrixXd h(k, k);
      Eigen::VectorXd phi_t_active(k);
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          h(a, b) = beta * gram_(active_[static_cast<std::size_t>(a)],
                                 active_[static_cast<std::size_t>(b)]);
        }
        h(a, a) += alpha_[static_cast<std::size_t>(
            active_[static_cast<std::size_t>(a)])];
        phi_t_active[a] = phi_t_[active_[static_cast<std::size_t>(a)]];
      }
      const Eigen::LLT<Eigen::MatrixXd> llt(h);
      if (llt.info() != Eigen::Success) {
        throw Error("rvm posterior precision is not positive definite");
      }
      sigma_ = llt.solve(Eigen::MatrixXd::Identity(k, k));
      mu_ = beta * (sigma_ * phi_t_active);
      log_det_sigma_ =
          -2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

      s_.resize(static_cast<std::size_t>(m_total_));
      q_.resize(static_cast<std::size_t>(m_total_));
      for (int m = 0; m < m_total_; ++m) {
        Eigen::VectorXd g(k);
        for (int a = 0; a < k; ++a) {
          g[a] = gram_(active_[static_cast<std::size_t>(a)], m);
        }
        const double s = beta * gram_(m, m) - beta * beta * g.dot(sigma_ * g);
        const double q = beta * (phi_t_[m] - g.dot(mu_));
        s_[static_cast<std::size_t>(m)] = s;
        q_[static_cast<std::size_t>(m)] = q;
      }
    }

    /// Log marginal likelihood via the determinant and inverse identities of
    /// the active-set posterior (no N x N matrix is formed).
    double log_marginal() const {
      const double n = static_cast<double>(t_.size());
      double log_alpha_sum = 0.0;
      for (const int m : active_) {
        log_alpha_sum += std::log(alpha_[static_cast<std::size_t>(m)]);
      }
      const double log_det_c =
          n * std::log(noise_var_) - log_det_sigma_ - log_alpha_sum;
      double t_phi_mu = 0.0;
      for (std::size_t a = 0; a < active_.size(); ++a) {
        t_phi_mu += phi_t_[active_[a]] * mu_[static_cast<Eigen::Index>(a)];
      }
      const double quad = (t_.squaredNorm() - t_phi_mu) / noise_var_;
      return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det_c + quad);
    }

    Action select_action() {
      Action best;
      double best_gain = config_.delta_l_tol;
      double max_log_alpha_change = 0.0;
      bool pending_add_or_delete = false;

      for (int m = 0; m < m_total_; ++m) {
        const double cap_s = s_[static_cast<std::size_t>(m)];
        const double cap_q = q_[static_cast<std::size_t>(m)];
        const bool is_active = active(m);
        const double a_old = alpha_[static_cast<std::size_t>(m)];
        double s = cap_s;
        double q = cap_q;
        if (is_active) {
          const double denom = a_old - cap_s;
          if (std::abs(denom) < 1e-300) continue;
          s = a_old * cap_s / denom;
          q = a_old * cap_q / denom;
        }
        const double theta = q * q - s;

        Action candidate;
        candidate.basis = m;
        double gain = -1.0;
        if (!is_active && theta > 0.0) {
          candidate.kind = 'a';
          candidate.new_alpha = s * s / theta;
          gain = 0.5 * ((cap_q * cap_q - cap_s) / cap_s +
                        std::log(cap_s / (cap_q * cap_q)));
          pending_add_or_delete = true;
        } else if (is_active && theta > 0.0) {
          candidate.kind = 'r';
          candidate.new_alpha = s * s / theta;
          const double d = 1.0 / candidate.new_alpha - 1.0 / a_old;
          gain = 0.5 * (cap_q * cap_q / (cap_s + 1.0 / d) -
                        std::log1p(cap_s * d));
          max_log_alpha_change =
              std::max(max_log_alpha_change,
                       std::abs(std::log(candidate.new_alpha) - std::log(a_old)));
        } else if (is_active && theta <= 0.0 && active_.size() > 1) {
          candidate.kind = 'd';
          gain = 0.5 * (cap_q * cap_q / (cap_s - a_old) -
                        std::log1p(-cap_s / a_old));
          pending_add_or_delete = true;
        } else {
          continue;
        }
        if (!std::isfinite(gain)) continue;
        candidate.delta_l = gain;
        if (gain > best_gain) {
          best_gain = gain;
          best = candidate;
        }
      }

      if (best.kind != 'x' && !pending_add_or_delete &&
          max_log_alpha_change < config_.alpha_tol) {
        return Action{};  // only negligible re-estimates remain
      }
      return best;
    }

    void apply(const Action& action) {
      const auto m = static_cast<std::size_t>(action.basis);
      switch (action.kind) {
        case 'a':
          alpha_[m] = action.new_alpha;
          active_.insert(
              std::lower_bound(active_.begin(), active_.end(), action.basis),
              action.basis);
          break;
        case 'r':
          alpha_[m] = action.new_alpha;
          break;
        case 'd':
          alpha_[m] = std::numeric_limits<double>::infinity();
          active_.erase(
              std::find(active_.begin(), active_.end(), action.basis));
          break;
        default:
          break;
      }
    }

    void reestimate_noise(int iteration) {
      const int k = static_cast<int>(active_.size());
      Eigen::VectorXd residual = t_;
      for (int a = 0; a < k; ++a) {
        residual -= mu_[a] * phi_.col(active_[static_cast<std::size_t>(a)]);
      }
      double gamma_sum = 0.0;
      for (int a = 0; a < k; ++a) {
        gamma_sum += 1.0 - alpha_[static_cast<std::size_t>(
                               active_[static_cast<std::size_t>(a)])] *
                               sigma_(a, a);
      }
      const double denom = static_cast<double>(t_.size()) - gamma_sum;
      if (denom < 1e-6) return;
      const double updated = std::max(residual.squaredNorm() / denom, 1e-12);
      if (updated == noise_var_) return;
      const double before = log_marginal();
      noise_var_ = updated;
      update_posterior();
      if (trace_ != nullptr && iteration >= 0) {
        trace_->push_back(RvmTraceEvent{iteration, 'n', -1, 0.0, before,
                                        log_marginal(), noise_var_});
      }
    }

    RvmModel extract() const {
      RvmModel model;
      model.width_ = config_.width;
      model.noise_var_ = noise_var_;
      const int k = static_cast<int>(active_.size());
      model.mu_.resize(k);
      model.alpha_.resize(k);
      model.sigma_ = sigma_;
      Eigen::Index rv_count = 0;
      for (const int m : active_) rv_count += m > 0 ? 1 : 0;
      model.relevance_inputs_.resize(rv_count, x_.cols());
      Eigen::Index rv = 0;
      for (int a = 0; a < k; ++a) {
        const int m = active_[static_cast<std::size_t>(a)];
        model.mu_[a] = mu_[a];
        model.alpha_[a] = alpha_[static_cast<std::size_t>(m)];
        if (m == 0) {
          model.has_bias_ = true;
        } else {
          model.relevance_rows_.push_back(m - 1);
          model.relevance_inputs_.row(rv++) = x_.row(m - 1);
        }
      }
      return model;
    }

    const Eigen::MatrixXd& x_;
    const Eigen::VectorXd& t_;
    const RvmConfig& config_;
    std::vector<RvmTraceEvent>* trace_;

    Eigen::MatrixXd phi_;
    Eigen::MatrixXd gram_;
    Eigen::VectorXd phi_t_;
    int m_total_ = 0;
    double noise_var_ = 0.0;

    std::vector<double> alpha_;  // infinity marks a pruned basis
    std::vector<int> active_;    // ascending basis indices
    Eigen::MatrixXd sigma_;
    Eigen::VectorXd mu_;
    double log_det_sigma_ = 0.0;
    std::vector<double> s_, q_;
  };

  double width_ = 1.0;
  double noise_var_ = 1.0;
  bool has_bias_ = false;
  std::vector<Eigen::Index> relevance_rows_;
  Eigen::MatrixXd relevance_inputs_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd alpha_;
};

/// Picks the RBF width by cross validation over a small grid (descending, so
/// ties prefer the smoother kernel).
inline CvResult<double> rvm_select_width(const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& y,
                                         std::vector<double> grid, int folds,
                                         std::uint64_t seed,
                                         const RvmConfig& base = {}) {
  std::sort(grid.begin(), grid.end(), std::greater<>());
  return crossval<double>(
      grid, x, y, folds, seed,
      [&base](double width, const Eigen::MatrixXd& xt,
              const Eigen::VectorXd& yt, const Eigen::MatrixXd& xv) {
        RvmConfig config = base;
        config.width = width;
        const RvmModel model = RvmModel::fit(xt, yt, config);
        return model.predict_rows(xv);
      });
}

}  // namespace mmpkit
