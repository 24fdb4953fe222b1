#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mmpkit/csv.hpp"
#include "mmpkit/dataset.hpp"
#include "mmpkit/scaler.hpp"
#include "mmpkit/summary.hpp"
#include "mmpkit/synthesize.hpp"

#include "helpers.hpp"

using namespace mmpkit;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("load_csv accepts rows within the reference ranges") {
  const auto path = temp_file("mmp_ok.csv");
  write_file(path,
             "tcm,volatile,intermediate,mwc7plus,temperature,mmp\n"
             "126.1,0.0,0.1167,140,333.1667,22.10\n");
  Warnings warnings;
  const Dataset d = load_csv(path.string(), &warnings);
  REQUIRE(d.size() == 1);
  CHECK(d.inputs()(0, 0) == 126.1);
  CHECK(d.inputs()(0, 2) == 0.1167);
  CHECK(d.targets()[0] == 22.10);
  CHECK(warnings.empty());
}

TEST_CASE("load_csv rejects a header-only file") {
  const auto path = temp_file("mmp_empty.csv");
  write_file(path, "tcm,volatile,intermediate,mwc7plus,temperature,mmp\n");
  CHECK_THROWS_AS(load_csv(path.string()), EmptyDatasetError);
}

TEST_CASE("load_csv names the missing column") {
  const auto path = temp_file("mmp_schema.csv");
  write_file(path, "tcm,volatile,mwc7plus,temperature,mmp\n1,2,3,4,5\n");
  CHECK_THROWS_WITH(load_csv(path.string()),
                    Catch::Matchers::ContainsSubstring("intermediate"));
}

TEST_CASE("load_csv reports the offending cell") {
  const auto path = temp_file("mmp_cell.csv");
  write_file(path,
             "tcm,volatile,intermediate,mwc7plus,temperature,mmp\n"
             "150,0.2,0.3,200,angry,30\n");
  try {
    load_csv(path.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("temperature") != std::string::npos);
  }
}

TEST_CASE("load_csv warns about out-of-range inputs without rejecting them") {
  const auto path = temp_file("mmp_range.csv");
  write_file(path,
             "tcm,volatile,intermediate,mwc7plus,temperature,mmp\n"
             "500,0.2,0.3,200,400,30\n");
  Warnings warnings;
  const Dataset d = load_csv(path.string(), &warnings);
  REQUIRE(d.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("tcm") != std::string::npos);
}

TEST_CASE("save then load round-trips values and bytes") {
  const Dataset d = synthesize(10, 77);
  const auto path_a = temp_file("mmp_round_a.csv");
  const auto path_b = temp_file("mmp_round_b.csv");
  save_csv(path_a.string(), d);
  const Dataset loaded = load_csv(path_a.string());
  REQUIRE(loaded.size() == 10);
  CHECK((loaded.inputs() - d.inputs()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.targets() - d.targets()).cwiseAbs().maxCoeff() == 0.0);
  save_csv(path_b.string(), loaded);
  CHECK(read_file(path_a) == read_file(path_b));
}

TEST_CASE("sample invariants are enforced") {
  Sample s;
  s.features = FeatureVector{150.0, 0.2, 0.3, 200.0, 400.0};
  s.mmp = 30.0;
  CHECK_NOTHROW(s.validate());
  s.features.volatile_frac = 1.5;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s.features.volatile_frac = 0.2;
  s.features.intermediate = 0.0;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s.features.intermediate = 0.3;
  s.mmp = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(s.validate(), ArgumentError);
}

TEST_CASE("describe matches hand arithmetic on three samples") {
  // mmp column carries {1, 2, 3}: mean 2, sample std 1
  const Dataset d = test::make_dataset({{150, 0.2, 0.3, 200, 400, 1},
                                        {160, 0.3, 0.4, 210, 410, 2},
                                        {170, 0.4, 0.5, 220, 420, 3}});
  const SummaryStats s = describe(d);
  CHECK(s.mean[5] == Catch::Approx(2.0).margin(1e-14));
  CHECK(s.stddev[5] == Catch::Approx(1.0).margin(1e-14));
  CHECK(s.min[5] == 1.0);
  CHECK(s.max[5] == 3.0);
}

TEST_CASE("describe flags constant columns instead of propagating NaN") {
  const Dataset d = test::make_dataset({{150, 0.2, 0.3, 200, 400, 30},
                                        {150, 0.3, 0.4, 210, 410, 31},
                                        {150, 0.4, 0.5, 220, 420, 32}});
  const SummaryStats s = describe(d);
  REQUIRE(s.degenerate_columns == std::vector<int>{0});
  CHECK(s.input_correlation(0, 0) == 1.0);
  for (int j = 1; j < kFeatureCount; ++j) {
    CHECK(s.input_correlation(0, j) == 0.0);
    CHECK(std::isfinite(s.input_correlation(0, j)));
  }
}

TEST_CASE("describe requires two samples") {
  const Dataset d = test::make_dataset({{150, 0.2, 0.3, 200, 400, 30}});
  CHECK_THROWS_AS(describe(d), InsufficientDataError);
}

TEST_CASE("correlation matrix is symmetric with unit diagonal") {
  const Dataset d = test::random_dataset(40, 5);
  const SummaryStats s = describe(d);
  for (int i = 0; i < kFeatureCount; ++i) {
    CHECK(s.input_correlation(i, i) == 1.0);
    for (int j = 0; j < kFeatureCount; ++j) {
      CHECK(s.input_correlation(i, j) == s.input_correlation(j, i));
      CHECK(std::abs(s.input_correlation(i, j)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("zscore scaling gives zero mean and unit std on training rows") {
  const Dataset d = test::random_dataset(30, 11);
  const Scaler scaler = Scaler::fit(d, ScalerMode::zscore);
  const NormalizedData norm = scaler.apply(d);
  for (int c = 0; c < kFeatureCount; ++c) {
    CHECK(std::abs(norm.inputs.col(c).mean()) < 1e-12);
    const double sd = std::sqrt(
        (norm.inputs.col(c).array() - norm.inputs.col(c).mean()).square().sum() /
        (static_cast<double>(d.size()) - 1.0));
    CHECK(sd == Catch::Approx(1.0).margin(1e-12));
  }
  CHECK(std::abs(norm.target.mean()) < 1e-12);
}

TEST_CASE("minmax maps the midpoint of the training range to zero") {
  // mwc7plus spans [200, 204]; 202 sits at the centre of the range
  const Dataset d = test::make_dataset({{150, 0.2, 0.3, 200, 400, 30},
                                        {160, 0.3, 0.4, 204, 410, 31}});
  const Scaler scaler = Scaler::fit(d, ScalerMode::minmax);
  CHECK(scaler.apply_column(200.0, 3) == -1.0);
  CHECK(scaler.apply_column(204.0, 3) == 1.0);
  CHECK(scaler.apply_column(202.0, 3) == 0.0);
}

TEST_CASE("apply then invert is the identity") {
  const Dataset d = test::random_dataset(100, 21);
  for (const auto mode : {ScalerMode::zscore, ScalerMode::minmax}) {
    const Scaler scaler = Scaler::fit(d, mode);
    const NormalizedData norm = scaler.apply(d);
    const Eigen::MatrixXd back = scaler.invert_inputs(norm.inputs);
    const Eigen::VectorXd back_y = scaler.invert_targets(norm.target);
    const double rel_x = ((back - d.inputs()).cwiseAbs().array() /
                          d.inputs().cwiseAbs().array().max(1.0))
                             .maxCoeff();
    const double rel_y = ((back_y - d.targets()).cwiseAbs().array() /
                          d.targets().cwiseAbs().array().max(1.0))
                             .maxCoeff();
    CHECK(rel_x < 1e-12);
    CHECK(rel_y < 1e-12);
  }
}

TEST_CASE("zero-variance columns cannot be scaled") {
  const Dataset d = test::make_dataset({{150, 0.2, 0.3, 200, 400, 30},
                                        {150, 0.3, 0.4, 210, 410, 31}});
  CHECK_THROWS_AS(Scaler::fit(d, ScalerMode::zscore), UnfittableScalerError);
  CHECK_THROWS_AS(Scaler::fit(d, ScalerMode::minmax), UnfittableScalerError);
}

TEST_CASE("scaler fitted on training rows ignores test rows") {
  const Dataset d = test::random_dataset(20, 31);
  const std::vector<Eigen::Index> train = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const Scaler a = Scaler::fit(d, train, ScalerMode::zscore);

  // perturb the held-out rows and refit
  std::vector<std::array<double, 6>> rows;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const auto s = d.sample(i);
    std::array<double, 6> r = {s.features.tcm,          s.features.volatile_frac,
                               s.features.intermediate, s.features.mwc7plus,
                               s.features.temperature,  s.mmp};
    if (i >= 10) r[5] += 7.0;
    rows.push_back(r);
  }
  const Scaler b = Scaler::fit(test::make_dataset(rows), train, ScalerMode::zscore);
  for (int c = 0; c < kColumnCount; ++c) {
    CHECK(a.offsets()[c] == b.offsets()[c]);
    CHECK(a.scales()[c] == b.scales()[c]);
  }
}

TEST_CASE("synthesize is deterministic per seed") {
  const Dataset a = synthesize(50, 123);
  const Dataset b = synthesize(50, 123);
  CHECK((a.inputs() - b.inputs()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.targets() - b.targets()).cwiseAbs().maxCoeff() == 0.0);
  const Dataset c = synthesize(50, 124);
  CHECK((a.targets() - c.targets()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("synthesized columns stay inside the reference ranges") {
  const Dataset d = synthesize(500, 9);
  for (int c = 0; c < kFeatureCount; ++c) {
    CHECK(d.inputs().col(c).minCoeff() >= ReferenceStats::kMin[c]);
    CHECK(d.inputs().col(c).maxCoeff() <= ReferenceStats::kMax[c]);
  }
  CHECK(d.targets().minCoeff() >= ReferenceStats::kMin[5]);
  CHECK(d.targets().maxCoeff() <= ReferenceStats::kMax[5]);
}

TEST_CASE("synthesized column means approach the reference means") {
  const Dataset d = synthesize(1000, 42);
  for (int c = 0; c < kColumnCount; ++c) {
    const double mean = c < kFeatureCount ? d.inputs().col(c).mean()
                                          : d.targets().mean();
    CHECK(std::abs(mean - ReferenceStats::kMean[c]) <
          0.10 * ReferenceStats::kMean[c]);
  }
}

TEST_CASE("noise-free synthesis equals the documented surface") {
  const Dataset d = synthesize(40, 5, /*noise_sd=*/0.0);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    // independent evaluation of the documented generating function
    double u[5];
    for (int c = 0; c < kFeatureCount; ++c) {
      u[c] = (d.inputs()(i, c) - ReferenceStats::kMin[c]) /
             (ReferenceStats::kMax[c] - ReferenceStats::kMin[c]);
    }
    const double s = 0.04 * std::exp(-1.8 * u[0]) +
                     0.22 * (1 - u[1]) * (1 - u[1]) +
                     0.20 * (1 - u[2]) * (1 - u[2]) * (1 - u[2]) +
                     0.025 * (1 + std::cos(std::numbers::pi * u[3])) +
                     0.26 * u[4] * u[4] + 0.23 * u[4] * (1 - u[2]);
    const double expected = 22.10 + (64.8107 - 22.10) * s;
    CHECK(d.targets()[i] == Catch::Approx(expected).margin(1e-12));
  }
}
