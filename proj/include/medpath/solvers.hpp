#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <utility>

#include "medpath/admm.hpp"
#include "medpath/model.hpp"

namespace medpath {

/// Soft(a, b) = sgn(a) max(|a| - b, 0).
double soft_threshold(double a, double b);

/// Coefficients of v(a1, a2) = b1|a1 a2| + b2|a1| + b2|a2|
///   + b3 a1^2 / 2 + b4 a2^2 / 2 - b5 a1 - b6 a2.
struct BivariateProblem {
  double b1 = 0.0;  // product weight, >= 0
  double b2 = 0.0;  // lasso weight, >= 0
  double b3 = 1.0;  // quadratic weights, > 0
  double b4 = 1.0;
  double b5 = 0.0;  // linear terms
  double b6 = 0.0;
};

double bivariate_value(const BivariateProblem& prob, double a1, double a2);

/// Global minimizer of v by closed-form case analysis over the four sign
/// quadrants and the two axes. Deterministic tie-break: smaller objective,
/// then smaller |a1|+|a2|, then lexicographic.
std::pair<double, double> bivariate_prox(const BivariateProblem& prob);

struct LassoOptions {
  double tol = 1e-8;     // max coordinate change per sweep
  int max_sweeps = 10000;
};

/// Cyclic coordinate descent on 1/2 ||r - D w||^2 + kappa3 ||w||_1 in
/// Gram form: gram = D^T D, dty = D^T r. When hit_budget is non-null the
/// budget overrun is reported there instead of thrown.
Eigen::VectorXd lasso_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& dty,
                           double kappa3, Eigen::VectorXd warm_start,
                           const LassoOptions& opts = {}, bool* hit_budget = nullptr);

/// Convenience wrapper forming the Gram products. Throws MaxIterations on
/// budget overrun.
Eigen::VectorXd lasso_column(const Eigen::VectorXd& response, const Eigen::MatrixXd& design,
                             double kappa3, const Eigen::VectorXd& warm_start,
                             const LassoOptions& opts = {});

/// Cross products and ridge factorizations shared by all iterations of one
/// fit. The ridge factors assume rho > 0.
struct FitWorkspace {
  double xtx = 0.0;
  Eigen::VectorXd xtm1;    // p1
  Eigen::VectorXd xtm2;    // p2
  double xty = 0.0;
  Eigen::MatrixXd m1tm1;   // p1 x p1
  Eigen::MatrixXd m2tm2;   // p2 x p2
  Eigen::MatrixXd m1tm2;   // p1 x p2
  Eigen::VectorXd m1ty;    // p1
  Eigen::VectorXd m2ty;    // p2
  Eigen::LLT<Eigen::MatrixXd> m1_ridge;  // M1^T M1 + rho I
  Eigen::LLT<Eigen::MatrixXd> m2_ridge;  // M2^T M2 + rho I

  static FitWorkspace build(const Dataset& data, double rho);
};

// Exact block minimizers of the augmented Lagrangian with all other
// blocks fixed.
Eigen::VectorXd update_beta(const FitWorkspace& ws, const AdmmState& state);
Eigen::VectorXd update_theta(const FitWorkspace& ws, const AdmmState& state);
Eigen::VectorXd update_zeta(const FitWorkspace& ws, const AdmmState& state);
Eigen::VectorXd update_pi(const FitWorkspace& ws, const AdmmState& state);
double update_delta(const FitWorkspace& ws, const AdmmState& state, double kappa4);

}  // namespace medpath
