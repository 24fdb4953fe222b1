#pragma once

#include <Eigen/Core>

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "mmpkit/error.hpp"

namespace mmpkit {

struct LbfgsOptions {
  int memory = 10;
  double gradient_tol = 1e-6;   // stop when ||g||_2 < tol
  double step_tol = 1e-14;      // stop when ||dx||_2 < tol
  int max_iterations = 200;
  double armijo_c1 = 1e-4;      // sufficient-decrease coefficient
  double wolfe_c2 = 0.9;        // weak curvature coefficient
  int max_line_search = 50;
};

enum class LbfgsStatus {
  converged_gradient,
  converged_step,
  max_iterations,
  line_search_failed,  // best point so far returned
};

inline const char* to_string(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::converged_gradient: return "converged_gradient";
    case LbfgsStatus::converged_step: return "converged_step";
    case LbfgsStatus::max_iterations: return "max_iterations";
    default: return "line_search_failed";
  }
}

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::max_iterations;
  std::vector<double> trace;  // objective after x0 and each accepted step
};

/// Limited-memory BFGS minimizer with a bracketing weak-Wolfe line search:
/// steps failing sufficient decrease backtrack, steps failing the curvature
/// condition expand, so every stored pair has positive curvature.
///
/// `objective(x, grad) -> f` must fill `grad` with the gradient at x. The
/// two-loop recursion scales the seed Hessian by s'y / y'y. The
/// accepted-step trace is monotone non-increasing by construction of the
/// sufficient-decrease condition.
template <typename Objective>
LbfgsResult lbfgs_minimize(Objective&& objective, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {}) {
  if (options.memory < 1) throw ArgumentError("lbfgs memory must be >= 1");
  const Eigen::Index dim = x0.size();

  LbfgsResult result;
  result.x = std::move(x0);
  result.gradient.resize(dim);
  result.f = objective(result.x, result.gradient);
  if (!std::isfinite(result.f)) {
    throw ArgumentError("objective is not finite at the initial point");
  }
  result.trace.push_back(result.f);

  struct Pair {
    Eigen::VectorXd s, y;
    double rho;
  };
  std::deque<Pair> history;

  Eigen::VectorXd x = result.x;
  Eigen::VectorXd grad = result.gradient;
  double f = result.f;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (grad.norm() < options.gradient_tol) {
      result.status = LbfgsStatus::converged_gradient;
      break;
    }

    // two-loop recursion
    Eigen::VectorXd direction = -grad;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      alpha[i] = history[i].rho * history[i].s.dot(direction);
      direction -= alpha[i] * history[i].y;
    }
    if (!history.empty()) {
      const auto& last = history.back();
      direction *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double beta = history[i].rho * history[i].y.dot(direction);
      direction += (alpha[i] - beta) * history[i].s;
    }
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      direction = -grad;  // fall back to steepest descent
      slope = grad.dot(direction);
    }

    // bracketing line search: sufficient decrease shrinks the step,
    // a failed curvature condition grows it
    double step = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double f_new = 0.0;
    Eigen::VectorXd x_new(dim), grad_new(dim);
    bool accepted = false;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      x_new = x + step * direction;
      f_new = objective(x_new, grad_new);
      if (!std::isfinite(f_new) ||
          f_new > f + options.armijo_c1 * step * slope) {
        hi = step;
      } else if (grad_new.dot(direction) < options.wolfe_c2 * slope) {
        lo = step;
      } else {
        accepted = true;
        break;
      }
      step = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * step;
    }
    if (!accepted) {
      // fall back to the last sufficient-decrease point inside the bracket
      if (lo > 0.0) {
        step = lo;
        x_new = x + step * direction;
        f_new = objective(x_new, grad_new);
        accepted = std::isfinite(f_new) &&
                   f_new <= f + options.armijo_c1 * step * slope;
      }
      if (!accepted) {
        result.status = LbfgsStatus::line_search_failed;
        break;
      }
    }

    Pair pair;
    pair.s = x_new - x;
    pair.y = grad_new - grad;
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-12 * pair.s.norm() * pair.y.norm()) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > options.memory) {
        history.pop_front();
      }
    }

    const double dx = (x_new - x).norm();
    x = std::move(x_new);
    grad = std::move(grad_new);
    f = f_new;
    result.iterations = iter + 1;
    result.trace.push_back(f);
    if (f < result.f) {
      result.f = f;
      result.x = x;
      result.gradient = grad;
    }
    if (dx < options.step_tol) {
      result.status = LbfgsStatus::converged_step;
      break;
    }
  }

  if (result.status == LbfgsStatus::max_iterations &&
      grad.norm() < options.gradient_tol) {
    result.status = LbfgsStatus::converged_gradient;
  }
  // the final iterate is the best seen: steps never increase f
  if (f <= result.f) {
    result.f = f;
    result.x = x;
    result.gradient = grad;
  }
  return result;
}

}  // namespace mmpkit
