#pragma once

#include <Eigen/Dense>

#include "medpath/model.hpp"

namespace medpath {

/// Per-path and total pathway effects for the contrast x vs x*.
struct PathwayEffects {
  Eigen::VectorXd ie1_per_path;  // p1: beta_j theta_j (x - x*)
  Eigen::VectorXd ie2_per_path;  // p2: zeta_k pi_k (x - x*)
  Eigen::MatrixXd ie12_per_path; // p1 x p2: beta_j lambda_jk pi_k (x - x*)
  double ie1_total = 0.0;
  double ie2_total = 0.0;
  double ie12_total = 0.0;
  double de = 0.0;  // delta (x - x*)
  double te = 0.0;  // de + ie1 + ie2 + ie12
};

PathwayEffects pathway_effects(const Coefficients& coef, double x, double x_star);

/// Predicted pathway values at exposure x: (v1, v2, v3, v_total).
struct PredictedValues {
  double v1 = 0.0;  // x * beta . theta
  double v2 = 0.0;  // x * zeta . pi
  double v3 = 0.0;  // x * beta^T Lambda pi
  double total = 0.0;
};

PredictedValues predicted_values(const Coefficients& coef, double x);

/// Mean squared prediction error of the total pathway prediction across an
/// exposure sample. The direct effect is excluded by construction.
double mspe(const Coefficients& fitted, const Coefficients& truth,
            const Eigen::VectorXd& x_sample);

}  // namespace medpath
