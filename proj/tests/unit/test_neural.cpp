#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mmpkit/elm.hpp"
#include "mmpkit/grnn.hpp"
#include "mmpkit/metrics.hpp"
#include "mmpkit/scaler.hpp"
#include "mmpkit/wnn.hpp"

#include "helpers.hpp"

using namespace mmpkit;

TEST_CASE("hidden-layer sizing follows the free-parameter budget") {
  CHECK(widrow_hidden_size(67, 3.5, 8) == 29);
  CHECK(widrow_hidden_size(8, 1.0, 8) == 1);
  CHECK(widrow_hidden_size(100, 0.8, 8) == 10);
  CHECK_THROWS_AS(widrow_hidden_size(4, 1.0, 8), ConfigError);
  CHECK_THROWS_AS(widrow_hidden_size(0, 1.0, 8), ArgumentError);
}

TEST_CASE("wavelet activation at zero net input") {
  // sqrt(0.5) * sinc(0) * cos(0)
  CHECK(bspline_wavelet(0.0, 1, 0.5, 0.5) ==
        Catch::Approx(std::sqrt(0.5)).margin(1e-14));
  // hand evaluation away from zero
  const double u = 0.8;
  const double expected = std::sqrt(0.5) * (std::sin(0.4) / 0.4) *
                          std::cos(2.0 * std::numbers::pi * 0.5 * u);
  CHECK(bspline_wavelet(u, 1, 0.5, 0.5) ==
        Catch::Approx(expected).margin(1e-14));
}

TEST_CASE("wavelet derivative matches finite differences") {
  const double h = 1e-7;
  for (const int m : {1, 2}) {
    for (double u = -3.0; u <= 3.0; u += 0.37) {
      const double fd = (bspline_wavelet(u + h, m, 0.5, 0.5) -
                         bspline_wavelet(u - h, m, 0.5, 0.5)) /
                        (2.0 * h);
      CHECK(bspline_wavelet_derivative(u, m, 0.5, 0.5) ==
            Catch::Approx(fd).margin(1e-6));
    }
  }
}

TEST_CASE("network output is zero when all output weights vanish") {
  Rng rng(3);
  const Eigen::MatrixXd x = test::random_matrix(10, 5, rng);
  WnnConfig config;
  config.hidden = 4;
  config.seed = 7;
  WnnModel model = WnnModel::initialize(x, config);
  Eigen::VectorXd flat = model.parameters();
  flat.tail(4).setZero();  // beta block is last
  model.set_parameters(flat);
  for (int t = 0; t < 5; ++t) {
    CHECK(model.predict(test::random_vector(5, rng)) == 0.0);
  }
}

TEST_CASE("single neuron with zero net input evaluates by hand") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 5);
  x.row(1).setConstant(0.5);
  WnnConfig config;
  config.hidden = 1;
  config.seed = 11;
  WnnModel model = WnnModel::initialize(x, config);
  // force net input (0 - b)/a = 0 at x = 0 by zeroing the translation
  Eigen::VectorXd flat = model.parameters();
  flat[5] = 0.0;  // translation
  model.set_parameters(flat);
  const double beta = model.output_weights()[0];
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
  CHECK(model.predict(zero) ==
        Catch::Approx(beta * std::sqrt(0.5)).margin(1e-14));
  CHECK(model.predict(zero) == model.predict(zero));
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(13);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int hidden = 1 + static_cast<int>(rng.uniform_index(4));
    const Eigen::MatrixXd warm = test::random_matrix(6, 5, rng);
    WnnConfig config;
    config.hidden = hidden;
    config.seed = 100 + static_cast<std::uint64_t>(trial);
    WnnModel model = WnnModel::initialize(warm, config);

    const Eigen::VectorXd x = test::random_vector(5, rng);
    const double y = rng.uniform(-1.0, 1.0);
    const WnnGradients g = model.gradients(x, y);

    Eigen::VectorXd analytic(hidden * 5 + 3 * hidden);
    Eigen::Index k = 0;
    for (int j = 0; j < hidden; ++j) {
      for (int c = 0; c < 5; ++c) analytic[k++] = g.weights(j, c);
    }
    for (int j = 0; j < hidden; ++j) analytic[k++] = g.translations[j];
    for (int j = 0; j < hidden; ++j) analytic[k++] = g.dilations[j];
    for (int j = 0; j < hidden; ++j) analytic[k++] = g.output[j];

    const Eigen::VectorXd flat = model.parameters();
    const double h = 1e-6;
    for (Eigen::Index p = 0; p < flat.size(); ++p) {
      Eigen::VectorXd plus = flat, minus = flat;
      plus[p] += h;
      minus[p] -= h;
      model.set_parameters(plus);
      const double ep = 0.5 * std::pow(y - model.predict(x), 2);
      model.set_parameters(minus);
      const double em = 0.5 * std::pow(y - model.predict(x), 2);
      model.set_parameters(flat);
      const double fd = (ep - em) / (2.0 * h);
      const double denom = std::max({std::abs(fd), std::abs(analytic[p]), 1e-6});
      worst = std::max(worst, std::abs(fd - analytic[p]) / denom);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("a zero-error sample leaves every parameter unchanged") {
  Rng rng(17);
  const Eigen::MatrixXd x = test::random_matrix(5, 5, rng);
  WnnConfig config;
  config.hidden = 3;
  config.seed = 19;
  WnnModel model = WnnModel::initialize(x, config);
  const Eigen::VectorXd q = test::random_vector(5, rng);
  const double y = model.predict(q);  // exact target: zero error
  const Eigen::VectorXd before = model.parameters();
  model.step(q, y);
  CHECK((model.parameters() - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("updates point against the gradient") {
  Rng rng(23);
  const Eigen::MatrixXd x = test::random_matrix(5, 5, rng);
  WnnConfig config;
  config.hidden = 3;
  config.seed = 29;
  WnnModel model = WnnModel::initialize(x, config);
  const Eigen::VectorXd q = test::random_vector(5, rng);
  const double y = model.predict(q) + 0.5;  // force a nonzero error

  const WnnGradients g = model.gradients(q, y);
  const Eigen::VectorXd before = model.parameters();
  model.step(q, y);
  const Eigen::VectorXd update = model.parameters() - before;

  Eigen::VectorXd grad_flat(before.size());
  Eigen::Index k = 0;
  for (int j = 0; j < 3; ++j) {
    for (int c = 0; c < 5; ++c) grad_flat[k++] = g.weights(j, c);
  }
  for (int j = 0; j < 3; ++j) grad_flat[k++] = g.translations[j];
  for (int j = 0; j < 3; ++j) grad_flat[k++] = g.dilations[j];
  for (int j = 0; j < 3; ++j) grad_flat[k++] = g.output[j];
  CHECK(update.dot(grad_flat) < 0.0);
}

TEST_CASE("training records a finite epoch trace and learns a smooth map") {
  Rng rng(31);
  const Eigen::Index n = 40;
  Eigen::MatrixXd raw = test::random_matrix(n, 5, rng, 0.0, 2.0);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    target[i] = std::sin(raw(i, 0)) + 0.5 * raw(i, 1);
  }
  // normalize inputs and target to [-1, 1] as the trainer expects
  Eigen::MatrixXd x = raw;
  for (int c = 0; c < 5; ++c) {
    const double lo = raw.col(c).minCoeff(), hi = raw.col(c).maxCoeff();
    x.col(c) = ((raw.col(c).array() - lo) / (hi - lo)) * 2.0 - 1.0;
  }
  const double ylo = target.minCoeff(), yhi = target.maxCoeff();
  const Eigen::VectorXd y = ((target.array() - ylo) / (yhi - ylo)) * 2.0 - 1.0;

  WnnConfig config;
  config.hidden = 8;
  config.seed = 37;
  const WnnTrainResult result = wnn_train(x, y, config);
  REQUIRE(!result.sse_trace.empty());
  CHECK(result.sse_trace.size() <= 100);
  for (const double sse : result.sse_trace) CHECK(std::isfinite(sse));
  CHECK(result.sse_trace.back() < result.sse_trace.front());
}

TEST_CASE("absurd learning rates diverge with a named epoch") {
  Rng rng(41);
  const Eigen::MatrixXd x = test::random_matrix(20, 5, rng);
  const Eigen::VectorXd y = test::random_vector(20, rng);
  WnnConfig config;
  config.hidden = 6;
  config.seed = 43;
  config.eta1 = 1e8;
  config.eta2 = 1e8;
  CHECK_THROWS_AS(wnn_train(x, y, config), TrainingDivergedError);
}

TEST_CASE("huge spreads predict the target mean") {
  Rng rng(47);
  const Eigen::MatrixXd x = test::random_matrix(25, 5, rng);
  const Eigen::VectorXd y = test::random_vector(25, rng, 1.0, 3.0);
  const GrnnModel model(x, y, 1e6);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd q = test::random_vector(5, rng);
    CHECK(std::abs(model.predict(q) - y.mean()) < 1e-3);
  }
}

TEST_CASE("tiny spreads memorize well-separated centres") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 5, 0, 0, 5;
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  const GrnnModel model(x, y, 1e-3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(model.predict(x.row(i).transpose()) - y[i]) < 1e-6);
  }
}

TEST_CASE("two-centre prediction matches hand-computed weights") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 1, 0;
  Eigen::VectorXd y(2);
  y << 1, 2;
  const GrnnModel model(x, y, 1.0);
  Eigen::VectorXd q(2);
  q << 0.25, 0.0;
  const double phi1 = std::exp(-0.0625 / 2.0);
  const double phi2 = std::exp(-0.5625 / 2.0);
  CHECK(model.predict(q) ==
        Catch::Approx((phi1 + 2.0 * phi2) / (phi1 + phi2)).margin(1e-12));
}

TEST_CASE("grnn output is a convex combination of stored targets") {
  Rng rng(53);
  const Eigen::MatrixXd x = test::random_matrix(20, 3, rng);
  const Eigen::VectorXd y = test::random_vector(20, rng, -4.0, 9.0);
  for (const double spread : {1e-4, 0.1, 1.0, 100.0}) {
    const GrnnModel model(x, y, spread);
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd q = test::random_vector(3, rng, -2.0, 2.0);
      const double p = model.predict(q);
      CHECK(p >= y.minCoeff() - 1e-12);
      CHECK(p <= y.maxCoeff() + 1e-12);
    }
  }
}

TEST_CASE("spread selection is trivial on a singleton grid") {
  Rng rng(59);
  const Eigen::MatrixXd x = test::random_matrix(20, 3, rng);
  const Eigen::VectorXd y = test::random_vector(20, rng);
  const SpreadSelection sel = grnn_select_spread(x, y, {0.4}, 5, 1);
  CHECK(sel.best_spread == 0.4);
}

TEST_CASE("spread selection replays an independent CV loop") {
  Rng rng(61);
  const Eigen::Index n = 30;
  const Eigen::MatrixXd x = test::random_matrix(n, 2, rng, -2.0, 2.0);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = std::sin(x(i, 0)) * std::cos(x(i, 1));
  }
  const std::vector<double> grid = {0.25, 0.5, 1.0, 2.0};
  const SpreadSelection sel = grnn_select_spread(x, y, grid, 5, 9);

  const FoldAssignment folds = kfold_split(n, 5, 9);
  double best_mse = 1e300;
  double best_spread = 0.0;
  for (const double spread : grid) {
    double total = 0.0;
    for (int f = 0; f < 5; ++f) {
      std::vector<Eigen::Index> tr, va;
      for (Eigen::Index i = 0; i < n; ++i) {
        (folds.fold_of[static_cast<std::size_t>(i)] == f ? va : tr).push_back(i);
      }
      Eigen::MatrixXd xt(tr.size(), 2);
      Eigen::VectorXd yt(tr.size());
      for (std::size_t i = 0; i < tr.size(); ++i) {
        xt.row(static_cast<Eigen::Index>(i)) = x.row(tr[i]);
        yt[static_cast<Eigen::Index>(i)] = y[tr[i]];
      }
      double se = 0.0;
      for (const auto v : va) {
        // direct kernel-mean evaluation
        double num = 0.0, den = 0.0;
        for (Eigen::Index j = 0; j < xt.rows(); ++j) {
          const double w = std::exp(-(xt.row(j) - x.row(v)).squaredNorm() /
                                    (2.0 * spread * spread));
          num += w * yt[j];
          den += w;
        }
        const double pred = den > 0 ? num / den : 0.0;
        se += (pred - y[v]) * (pred - y[v]);
      }
      total += se / static_cast<double>(va.size());
    }
    const double mean_mse = total / 5.0;
    if (mean_mse < best_mse) {
      best_mse = mean_mse;
      best_spread = spread;
    }
  }
  CHECK(sel.best_spread == best_spread);
  CHECK(sel.cv.best_mse() == Catch::Approx(best_mse).margin(1e-12));
}

TEST_CASE("a full-width hidden layer fits the training data exactly") {
  Rng rng(67);
  const Eigen::Index n = 20;
  const Eigen::MatrixXd x = test::random_matrix(n, 5, rng);
  const Eigen::VectorXd y = test::random_vector(n, rng);
  const ElmModel model = ElmModel::fit(x, y, static_cast<int>(n), 7);
  CHECK(rmse(y, model.predict_rows(x)) < 1e-6);
}

TEST_CASE("narrow networks leave residuals orthogonal to the hidden basis") {
  Rng rng(71);
  const Eigen::Index n = 40;
  const Eigen::MatrixXd x = test::random_matrix(n, 5, rng);
  const Eigen::VectorXd y = test::random_vector(n, rng);
  const ElmModel model = ElmModel::fit(x, y, 12, 11);
  const Eigen::MatrixXd h = model.hidden_matrix(x);
  const Eigen::VectorXd residual = y - h * model.output_weights();
  CHECK((h.transpose() * residual).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("random hidden layers are reproducible per seed") {
  Rng rng(73);
  const Eigen::MatrixXd x = test::random_matrix(15, 5, rng);
  const Eigen::VectorXd y = test::random_vector(15, rng);
  const ElmModel a = ElmModel::fit(x, y, 6, 99);
  const ElmModel b = ElmModel::fit(x, y, 6, 99);
  CHECK((a.input_weights() - b.input_weights()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.biases() - b.biases()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.output_weights() - b.output_weights()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("output weights match a hand-computed pseudoinverse solution") {
  // 3 samples, 2 neurons: full column rank, so the unique least-squares
  // solution solves the normal equations
  Eigen::MatrixXd x(3, 2);
  x << 0.1, -0.4, 0.9, 0.3, -0.6, 0.7;
  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 0.5;
  const ElmModel model = ElmModel::fit(x, y, 2, 5);
  const Eigen::MatrixXd h = model.hidden_matrix(x);
  const Eigen::VectorXd beta_oracle =
      (h.transpose() * h).ldlt().solve(h.transpose() * y);
  CHECK((model.output_weights() - beta_oracle).cwiseAbs().maxCoeff() < 1e-10);
}
