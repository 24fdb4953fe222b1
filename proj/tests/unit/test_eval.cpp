#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mmpkit/compare.hpp"
#include "mmpkit/crossval.hpp"
#include "mmpkit/linear.hpp"
#include "mmpkit/metrics.hpp"
#include "mmpkit/sensitivity.hpp"
#include "mmpkit/synthesize.hpp"

#include "helpers.hpp"

using namespace mmpkit;

TEST_CASE("perfect predictions score R2 one and RMSE zero") {
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  CHECK(r2(y, y) == 1.0);
  CHECK(rmse(y, y) == 0.0);
}

TEST_CASE("the mean baseline scores R2 zero") {
  Eigen::VectorXd y(5);
  y << 2, 4, 6, 8, 10;
  const Eigen::VectorXd y_hat = Eigen::VectorXd::Constant(5, y.mean());
  CHECK(r2(y, y_hat) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("four-point metrics match hand arithmetic") {
  Eigen::VectorXd y(4), y_hat(4);
  y << 1, 3, 5, 7;        // mean 4, SS_tot = 9+1+1+9 = 20
  y_hat << 2, 3, 4, 8;    // residuals -1, 0, 1, -1: SS_res = 3
  CHECK(r2(y, y_hat) == Catch::Approx(1.0 - 3.0 / 20.0).margin(1e-12));
  CHECK(rmse(y, y_hat) == Catch::Approx(std::sqrt(3.0 / 4.0)).margin(1e-12));
}

TEST_CASE("zero-variance targets make R2 undefined") {
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(4, 3.0);
  Eigen::VectorXd y_hat(4);
  y_hat << 1, 2, 3, 4;
  CHECK_THROWS_AS(r2(y, y_hat), InsufficientDataError);
}

TEST_CASE("R2 is consistent with RMSE and total variance") {
  Rng rng(5);
  const Eigen::VectorXd y = test::random_vector(30, rng, 10.0, 50.0);
  const Eigen::VectorXd y_hat = test::random_vector(30, rng, 10.0, 50.0);
  const double n = 30.0;
  const double ss_tot = (y.array() - y.mean()).square().sum();
  const double lhs = r2(y, y_hat);
  const double rhs = 1.0 - n * rmse(y, y_hat) * rmse(y, y_hat) / ss_tot;
  CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
}

TEST_CASE("a singleton grid wins by default") {
  Rng rng(7);
  const Eigen::MatrixXd x = test::random_matrix(20, 2, rng);
  const Eigen::VectorXd y = test::random_vector(20, rng);
  const auto cv = crossval<int>(
      {4}, x, y, 5, 1,
      [](int, const Eigen::MatrixXd& xt, const Eigen::VectorXd& yt,
         const Eigen::MatrixXd& xv) {
        return Eigen::VectorXd::Constant(xv.rows(), yt.mean()).eval();
      });
  CHECK(cv.best() == 4);
  CHECK(!cv.outcomes[0].failed);
}

TEST_CASE("a failing config is recorded without aborting the run") {
  Rng rng(9);
  const Eigen::MatrixXd x = test::random_matrix(20, 2, rng);
  const Eigen::VectorXd y = test::random_vector(20, rng);
  const auto cv = crossval<int>(
      {1, 2}, x, y, 4, 1,
      [](int config, const Eigen::MatrixXd& xt, const Eigen::VectorXd& yt,
         const Eigen::MatrixXd& xv) {
        if (config == 1) throw ArgumentError("fold exploded");
        return Eigen::VectorXd::Constant(xv.rows(), yt.mean()).eval();
      });
  CHECK(cv.outcomes[0].failed);
  CHECK(cv.outcomes[0].error.find("exploded") != std::string::npos);
  CHECK(!cv.outcomes[1].failed);
  CHECK(cv.best() == 2);
}

TEST_CASE("ties prefer the earlier config in the grid") {
  Rng rng(11);
  const Eigen::MatrixXd x = test::random_matrix(16, 2, rng);
  const Eigen::VectorXd y = test::random_vector(16, rng);
  const auto cv = crossval<int>(
      {1, 2, 3}, x, y, 4, 2,
      [](int, const Eigen::MatrixXd& xt, const Eigen::VectorXd& yt,
         const Eigen::MatrixXd& xv) {
        return Eigen::VectorXd::Constant(xv.rows(), yt.mean()).eval();
      });
  CHECK(cv.best() == 1);
}

TEST_CASE("linear model sweeps are exactly affine in the varied input") {
  const Dataset data = test::random_dataset(30, 13);
  // raw-unit linear predictor: slope c per input
  Eigen::VectorXd slope(5);
  slope << 0.05, -12.0, 30.0, 0.01, 0.08;
  const auto predict = [&slope](const Eigen::VectorXd& raw) {
    return 5.0 + slope.dot(raw);
  };
  const SensitivityReport report = sensitivity(predict, data, 25);
  REQUIRE(report.sweeps.size() == 5);
  for (int c = 0; c < 5; ++c) {
    const auto& sweep = report.sweeps[static_cast<std::size_t>(c)];
    for (int g = 1; g < 25; ++g) {
      const double dv = sweep.values[g] - sweep.values[g - 1];
      const double dp = sweep.predictions[g] - sweep.predictions[g - 1];
      CHECK(dp == Catch::Approx(slope[c] * dv).margin(1e-9));
    }
    // grid is monotone from the column minimum to the maximum
    CHECK(sweep.values[0] == data.inputs().col(c).minCoeff());
    CHECK(sweep.values[24] == data.inputs().col(c).maxCoeff());
  }
}

TEST_CASE("an ignored input yields a flat sweep and near-zero correlation") {
  // independent synthetic inputs; the predictor never reads temperature
  const Dataset data = synthesize(400, 99);
  const auto predict = [](const Eigen::VectorXd& raw) {
    return 2.0 * raw[1] + 0.5 * raw[2];
  };
  const SensitivityReport report = sensitivity(predict, data, 20);
  const auto& sweep = report.sweeps[4];  // temperature
  for (int g = 1; g < 20; ++g) {
    CHECK(sweep.predictions[g] == Catch::Approx(sweep.predictions[0]).margin(1e-12));
  }
  CHECK(std::abs(report.corr_model[4]) < 0.1);
}

TEST_CASE("model correlations track the generating signs") {
  const Dataset data = synthesize(300, 7);
  const auto predict = [](const Eigen::VectorXd& raw) {
    return latent_mmp(FeatureVector::from_vector(raw));
  };
  const SensitivityReport report = sensitivity(predict, data, 20);
  // the documented surface falls with the intermediate fraction and rises
  // with temperature
  CHECK(report.corr_model[2] < 0.0);
  CHECK(report.corr_model[4] > 0.0);
}

TEST_CASE("comparison tables score all models on the same rows") {
  Eigen::VectorXd y(4);
  y << 10, 20, 30, 40;
  Eigen::VectorXd good(4), mean(4);
  good << 11, 19, 31, 39;
  mean.setConstant(25);
  const ComparisonTable table =
      compare({{"good", good}, {"mean", mean}, {"good2", good}}, y);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].metrics.r_squared > table.rows[1].metrics.r_squared);
  CHECK(table.rows[0].metrics.r_squared == table.rows[2].metrics.r_squared);
  CHECK(table.rows[0].metrics.rmse == table.rows[2].metrics.rmse);

  const std::string text = table.to_text();
  CHECK(text.find("Model") != std::string::npos);
  CHECK(text.find("RMSE") != std::string::npos);
  CHECK(text.find("good") != std::string::npos);

  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(compare({{"bad", wrong}}, y), ArgumentError);
}
