#pragma once

#include <Eigen/Core>

#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mmpkit/error.hpp"
#include "mmpkit/metrics.hpp"

namespace mmpkit {

/// Per-model generalization metrics on one shared test set.
struct ComparisonTable {
  struct Row {
    std::string model;
    Metrics metrics;
  };
  std::vector<Row> rows;

  /// Aligned text table: Model, R^2, RMSE.
  std::string to_text() const {
    std::size_t width = 5;  // "Model"
    for (const auto& row : rows) width = std::max(width, row.model.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width + 2)) << "Model"
       << std::right << std::setw(10) << "R2" << std::setw(12) << "RMSE"
       << "\n";
    os << std::string(width + 24, '-') << "\n";
    os << std::fixed << std::setprecision(4);
    for (const auto& row : rows) {
      os << std::left << std::setw(static_cast<int>(width + 2)) << row.model
         << std::right << std::setw(10) << row.metrics.r_squared
         << std::setw(12) << row.metrics.rmse << "\n";
    }
    return os.str();
  }
};

/// Scores every model's predictions against the shared ground truth. All
/// prediction vectors must cover the same test rows in the same order.
inline ComparisonTable compare(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& predictions,
    const Eigen::VectorXd& y_true) {
  ComparisonTable table;
  for (const auto& [name, y_hat] : predictions) {
    if (y_hat.size() != y_true.size()) {
      throw ArgumentError("model '" + name +
                          "' predicted a different number of rows");
    }
    table.rows.push_back({name, evaluate(y_true, y_hat)});
  }
  return table;
}

}  // namespace mmpkit
