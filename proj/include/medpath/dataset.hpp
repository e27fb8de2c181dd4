#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace medpath {

/// Column means and sds recorded by standardize(), used to map results back
/// to the original scale.
struct ColumnStats {
  double x_mean = 0.0, x_sd = 1.0;
  Eigen::VectorXd m1_mean, m1_sd;
  Eigen::VectorXd m2_mean, m2_sd;
  double y_mean = 0.0, y_sd = 1.0;
};

/// Observed sample: exposure x (n), mediator blocks m1 (n x p1) and
/// m2 (n x p2), outcome y (n). All blocks share the row count.
struct Dataset {
  Eigen::VectorXd x;
  Eigen::MatrixXd m1;
  Eigen::MatrixXd m2;
  Eigen::VectorXd y;
  bool standardized = false;
  ColumnStats stats;  // meaningful only when standardized

  std::vector<std::string> m1_names;  // optional column labels
  std::vector<std::string> m2_names;

  Eigen::Index n() const { return x.size(); }
  Eigen::Index p1() const { return m1.cols(); }
  Eigen::Index p2() const { return m2.cols(); }

  /// Throws DimensionMismatch when the blocks disagree on row count or n < 2.
  void check_dims() const;
};

/// Center every column and scale to unit sample sd (divisor n-1).
/// Throws ConstantColumn for zero-variance columns.
Dataset standardize(const Dataset& raw);

}  // namespace medpath
