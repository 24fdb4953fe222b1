#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

#include "mmpkit/dataset.hpp"
#include "mmpkit/error.hpp"
#include "mmpkit/summary.hpp"

namespace mmpkit {

/// Input-effect study for a fitted model over a databank.
///
/// Correlations: Pearson coefficient of each raw input column against the
/// measured targets and against the model predictions on every row. Sweeps:
/// each input traversed from its column minimum to maximum while the others
/// sit at their minima, with the model prediction recorded along the grid.
struct SensitivityReport {
  std::array<double, kFeatureCount> corr_experimental{};
  std::array<double, kFeatureCount> corr_model{};
  struct Sweep {
    std::string input;
    Eigen::VectorXd values;       // raw units, ascending
    Eigen::VectorXd predictions;  // MPa
  };
  std::vector<Sweep> sweeps;
};

/// `predict(raw_inputs) -> MPa` must accept raw (unnormalized) inputs.
template <typename PredictFn>
SensitivityReport sensitivity(PredictFn&& predict, const Dataset& data,
                              int grid_points = 50) {
  if (grid_points < 2) throw ArgumentError("sensitivity needs >= 2 grid points");
  SensitivityReport report;

  Eigen::VectorXd predictions(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    predictions[i] = predict(Eigen::VectorXd(data.inputs().row(i).transpose()));
  }
  for (int c = 0; c < kFeatureCount; ++c) {
    report.corr_experimental[static_cast<std::size_t>(c)] =
        pearson(data.inputs().col(c), data.targets());
    report.corr_model[static_cast<std::size_t>(c)] =
        pearson(data.inputs().col(c), predictions);
  }

  const Eigen::VectorXd mins = data.inputs().colwise().minCoeff();
  const Eigen::VectorXd maxs = data.inputs().colwise().maxCoeff();
  for (int c = 0; c < kFeatureCount; ++c) {
    SensitivityReport::Sweep sweep;
    sweep.input = kColumnNames[c];
    sweep.values.resize(grid_points);
    sweep.predictions.resize(grid_points);
    Eigen::VectorXd point = mins;
    for (int g = 0; g < grid_points; ++g) {
      const double t = static_cast<double>(g) / (grid_points - 1);
      point[c] = mins[c] + t * (maxs[c] - mins[c]);
      sweep.values[g] = point[c];
      sweep.predictions[g] = predict(point);
    }
    report.sweeps.push_back(std::move(sweep));
  }
  return report;
}

}  // namespace mmpkit
