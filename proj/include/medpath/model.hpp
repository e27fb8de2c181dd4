#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>

#include "medpath/dataset.hpp"

namespace medpath {

/// Full parameter block of the marginal model.
struct Coefficients {
  Eigen::VectorXd beta;    // p1, exposure -> m1
  Eigen::VectorXd theta;   // p1, m1 -> outcome
  Eigen::VectorXd zeta;    // p2, exposure -> m2
  Eigen::VectorXd pi;      // p2, m2 -> outcome
  Eigen::MatrixXd lambda;  // p1 x p2, m1 -> m2
  double delta = 0.0;      // direct effect

  static Coefficients zeros(Eigen::Index p1, Eigen::Index p2);

  Eigen::Index p1() const { return beta.size(); }
  Eigen::Index p2() const { return zeta.size(); }

  bool all_finite() const;
  void check_dims(const Dataset& data) const;
};

/// Parameters of the fully ordered sequential model. Phi and Psi are
/// strictly upper triangular; xi1/xi2 hold the diagonal error variances.
struct SequentialTruth {
  Eigen::VectorXd alpha;   // p1
  Eigen::MatrixXd phi;     // p1 x p1, strictly upper triangular
  Eigen::VectorXd gamma;   // p2
  Eigen::MatrixXd omega;   // p1 x p2
  Eigen::MatrixXd psi;     // p2 x p2, strictly upper triangular
  Eigen::VectorXd theta;   // p1
  Eigen::VectorXd pi;      // p2
  double delta = 0.0;
  Eigen::VectorXd xi1;     // p1, diagonal of Xi1, > 0
  Eigen::VectorXd xi2;     // p2, diagonal of Xi2, > 0
  double sigma2 = 1.0;

  void validate() const;
};

struct MarginalModel {
  Coefficients coef;
  Eigen::MatrixXd sigma1;  // p1 x p1 marginal error covariance
  Eigen::MatrixXd sigma2;  // p2 x p2
};

/// Maps the sequential model to the marginal one via the influence
/// matrices (I-Phi)^{-1} and (I-Psi)^{-1}.
MarginalModel sequential_to_marginal(const SequentialTruth& truth);

enum class Penalty { P1, P2, P3 };

/// Regularization weights. Weights of penalties excluded from the mask
/// are forced to zero by validate().
struct PenaltyConfig {
  double nu1 = 2.0, nu2 = 2.0;
  double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0, kappa4 = 0.0;
  double mu1 = 0.0, mu2 = 0.0;
  std::set<Penalty> mask{Penalty::P1, Penalty::P2, Penalty::P3};

  /// All four kappas set to kappa, mus to ratio*kappa, then masked.
  static PenaltyConfig shared(double kappa, double ratio, std::set<Penalty> mask,
                              double nu1 = 2.0, double nu2 = 2.0);

  void validate();  // clamps masked-out weights, throws on bad nu/negative weights
};

/// Residual sum of squares over the three model equations.
double loss(const Dataset& data, const Coefficients& coef);

/// Relaxed copies of (beta, theta, zeta, pi) used by the splitting scheme.
struct AuxBlocks {
  Eigen::VectorXd beta, theta, zeta, pi;
};

/// Value of P1 + P2 + P3. When aux is supplied, P1 and P2 are evaluated
/// on the relaxed copies instead of coef.
double penalty_value(const Coefficients& coef, const std::optional<AuxBlocks>& aux,
                     const PenaltyConfig& cfg);

/// Map standardized-scale coefficients back to the original data scale
/// using the column stats recorded at standardization.
Coefficients rescale_to_raw(const Coefficients& coef, const ColumnStats& stats);

}  // namespace medpath
