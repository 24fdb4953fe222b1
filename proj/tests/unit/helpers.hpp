#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "mmpkit/dataset.hpp"
#include "mmpkit/rng.hpp"

namespace test {

/// Dataset from rows of {tcm, volatile, intermediate, mwc7plus, temperature,
/// mmp}.
inline mmpkit::Dataset make_dataset(
    const std::vector<std::array<double, 6>>& rows) {
  std::vector<mmpkit::Sample> samples;
  for (const auto& r : rows) {
    mmpkit::Sample s;
    s.features = mmpkit::FeatureVector{r[0], r[1], r[2], r[3], r[4]};
    s.mmp = r[5];
    samples.push_back(s);
  }
  return mmpkit::Dataset::from_samples(samples);
}

/// Plausible random databank rows (valid domain values, no reference-range
/// guarantees).
inline mmpkit::Dataset random_dataset(Eigen::Index n, std::uint64_t seed) {
  mmpkit::Rng rng(seed);
  std::vector<std::array<double, 6>> rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    rows.push_back({rng.uniform(126.0, 269.0), rng.uniform(0.0, 0.6),
                    rng.uniform(0.12, 0.63), rng.uniform(140.0, 290.0),
                    rng.uniform(333.0, 465.0), rng.uniform(22.0, 65.0)});
  }
  return make_dataset(rows);
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                                     mmpkit::Rng& rng, double lo = -1.0,
                                     double hi = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, mmpkit::Rng& rng,
                                     double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

}  // namespace test
