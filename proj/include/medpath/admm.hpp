#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "medpath/model.hpp"

namespace medpath {

/// Primal blocks, relaxed copies, and scaled duals of the splitting scheme.
struct AdmmState {
  Coefficients coef;
  AuxBlocks aux;
  Eigen::VectorXd tau1, tau2;  // p1
  Eigen::VectorXd tau3, tau4;  // p2
  double rho = 1.0;

  static AdmmState zeros(Eigen::Index p1, Eigen::Index p2, double rho);
};

struct FitOptions {
  double rho = 1.0;
  int max_iters = 5000;
  double rel_tol = 1e-6;          // relative objective change
  double inner_lasso_tol = 1e-8;
  std::optional<Coefficients> warm_start;  // zeros when absent
};

/// Index sets of nonzero estimated pathway products.
struct ActiveSets {
  std::vector<int> a1;                       // j with beta_j theta_j != 0
  std::vector<int> a2;                       // k with zeta_k pi_k != 0
  std::vector<std::pair<int, int>> a3;       // (j,k) with beta_j lambda_jk pi_k != 0
  int total() const {
    return static_cast<int>(a1.size() + a2.size() + a3.size());
  }
};

struct FitResult {
  Coefficients coef;                    // reported from the relaxed copies
  Coefficients primal;                  // primal blocks at the last iteration
  std::vector<double> objective_trace;  // penalized objective per iteration
  int iterations = 0;
  bool converged = false;
  double primal_residual_beta = 0.0;    // ||beta - beta~||_2 etc.
  double primal_residual_theta = 0.0;
  double primal_residual_zeta = 0.0;
  double primal_residual_pi = 0.0;
  int lasso_budget_warnings = 0;
  ActiveSets active_sets;
};

/// Entries with |value| <= this are treated as zero in active sets.
inline constexpr double kActiveSetZeroTol = 1e-8;

ActiveSets active_sets(const Coefficients& coef, double zero_tol = kActiveSetZeroTol);

/// Runs the full block-update cycle until the penalized objective
/// stabilizes. Requires standardized data.
FitResult fit(const Dataset& data, const PenaltyConfig& cfg, const FitOptions& opts = {});

/// Unpenalized least-squares refit restricted to the nonzero pattern of
/// `pattern`, removing the shrinkage bias of the selected model. Entries
/// with |value| <= zero_tol stay exactly zero.
Coefficients refit_support(const Dataset& data, const Coefficients& pattern,
                           double zero_tol = kActiveSetZeroTol);

/// Copy of `coef` with every entry that does not participate in an active
/// pathway product zeroed out: beta/theta on a1 or (beta) a3 rows, zeta/pi
/// on a2 or (pi) a3 columns, lambda on a3 pairs. delta is kept as is.
Coefficients path_restricted(const Coefficients& coef,
                             double zero_tol = kActiveSetZeroTol);

}  // namespace medpath
