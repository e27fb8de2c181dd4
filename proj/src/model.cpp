#include "medpath/model.hpp"

#include <cmath>

#include "medpath/errors.hpp"

namespace medpath {

Coefficients Coefficients::zeros(Eigen::Index p1, Eigen::Index p2) {
  Coefficients c;
  c.beta = Eigen::VectorXd::Zero(p1);
  c.theta = Eigen::VectorXd::Zero(p1);
  c.zeta = Eigen::VectorXd::Zero(p2);
  c.pi = Eigen::VectorXd::Zero(p2);
  c.lambda = Eigen::MatrixXd::Zero(p1, p2);
  c.delta = 0.0;
  return c;
}

bool Coefficients::all_finite() const {
  return beta.allFinite() && theta.allFinite() && zeta.allFinite() && pi.allFinite() &&
         lambda.allFinite() && std::isfinite(delta);
}

void Coefficients::check_dims(const Dataset& data) const {
  if (beta.size() != data.p1() || theta.size() != data.p1() || zeta.size() != data.p2() ||
      pi.size() != data.p2() || lambda.rows() != data.p1() || lambda.cols() != data.p2())
    throw DimensionMismatch("coefficient dimensions do not match dataset");
}

void SequentialTruth::validate() const {
  const Eigen::Index p1 = alpha.size(), p2 = gamma.size();
  if (phi.rows() != p1 || phi.cols() != p1 || psi.rows() != p2 || psi.cols() != p2 ||
      omega.rows() != p1 || omega.cols() != p2 || theta.size() != p1 || pi.size() != p2 ||
      xi1.size() != p1 || xi2.size() != p2)
    throw DimensionMismatch("sequential truth dimensions inconsistent");
  for (Eigen::Index i = 0; i < p1; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      if (phi(i, j) != 0.0) throw DimensionMismatch("phi must be strictly upper triangular");
  for (Eigen::Index i = 0; i < p2; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      if (psi(i, j) != 0.0) throw DimensionMismatch("psi must be strictly upper triangular");
  if ((xi1.array() <= 0.0).any() || (xi2.array() <= 0.0).any() || sigma2 <= 0.0)
    throw DimensionMismatch("error variances must be strictly positive");
}

MarginalModel sequential_to_marginal(const SequentialTruth& truth) {
  truth.validate();
  const Eigen::Index p1 = truth.alpha.size(), p2 = truth.gamma.size();
  const Eigen::MatrixXd a1 = Eigen::MatrixXd::Identity(p1, p1) - truth.phi;  // I - Phi
  const Eigen::MatrixXd a2 = Eigen::MatrixXd::Identity(p2, p2) - truth.psi;  // I - Psi

  MarginalModel out;
  // beta = alpha (I-Phi)^{-1}  <=>  (I-Phi)^T beta^T = alpha^T
  out.coef.beta = a1.transpose().triangularView<Eigen::Lower>().solve(truth.alpha);
  out.coef.zeta = a2.transpose().triangularView<Eigen::Lower>().solve(truth.gamma);
  out.coef.lambda =
      a2.transpose().triangularView<Eigen::Lower>().solve(truth.omega.transpose()).transpose();
  out.coef.theta = truth.theta;
  out.coef.pi = truth.pi;
  out.coef.delta = truth.delta;
  if (!out.coef.all_finite()) throw SingularMatrix("triangular solve produced non-finite values");

  // Sigma = (I-Phi^T)^{-1} Xi (I-Phi)^{-1}
  Eigen::MatrixXd t1 =
      a1.transpose().triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(truth.xi1.asDiagonal()));
  out.sigma1 = a1.transpose()
                   .triangularView<Eigen::Lower>()
                   .solve(t1.transpose())
                   .transpose();  // t1 (I-Phi)^{-1}
  Eigen::MatrixXd t2 =
      a2.transpose().triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(truth.xi2.asDiagonal()));
  out.sigma2 = a2.transpose().triangularView<Eigen::Lower>().solve(t2.transpose()).transpose();
  return out;
}

PenaltyConfig PenaltyConfig::shared(double kappa, double ratio, std::set<Penalty> mask,
                                    double nu1, double nu2) {
  PenaltyConfig cfg;
  cfg.nu1 = nu1;
  cfg.nu2 = nu2;
  cfg.kappa1 = cfg.kappa2 = cfg.kappa3 = cfg.kappa4 = kappa;
  cfg.mu1 = cfg.mu2 = ratio * kappa;
  cfg.mask = std::move(mask);
  cfg.validate();
  return cfg;
}

void PenaltyConfig::validate() {
  if (nu1 < 0.5 || nu2 < 0.5) throw DimensionMismatch("nu1, nu2 must be >= 1/2");
  if (kappa1 < 0 || kappa2 < 0 || kappa3 < 0 || kappa4 < 0 || mu1 < 0 || mu2 < 0)
    throw DimensionMismatch("penalty weights must be nonnegative");
  if (!mask.contains(Penalty::P1)) kappa1 = kappa2 = 0.0;
  if (!mask.contains(Penalty::P2)) mu1 = mu2 = 0.0;
  if (!mask.contains(Penalty::P3)) kappa3 = kappa4 = 0.0;
}

double loss(const Dataset& data, const Coefficients& coef) {
  data.check_dims();
  coef.check_dims(data);
  const double r1 = (data.m1 - data.x * coef.beta.transpose()).squaredNorm();
  const double r2 =
      (data.m2 - data.x * coef.zeta.transpose() - data.m1 * coef.lambda).squaredNorm();
  const double r3 =
      (data.y - data.x * coef.delta - data.m1 * coef.theta - data.m2 * coef.pi).squaredNorm();
  return r1 + r2 + r3;
}

double penalty_value(const Coefficients& coef, const std::optional<AuxBlocks>& aux,
                     const PenaltyConfig& cfg) {
  const Eigen::VectorXd& b = aux ? aux->beta : coef.beta;
  const Eigen::VectorXd& t = aux ? aux->theta : coef.theta;
  const Eigen::VectorXd& z = aux ? aux->zeta : coef.zeta;
  const Eigen::VectorXd& p = aux ? aux->pi : coef.pi;
  if (b.size() != t.size() || z.size() != p.size())
    throw DimensionMismatch("penalty blocks dimension mismatch");

  double v = 0.0;
  v += cfg.kappa1 * ((b.array() * t.array()).abs() +
                     cfg.nu1 * (b.array().square() + t.array().square()))
                        .sum();
  v += cfg.kappa2 * ((z.array() * p.array()).abs() +
                     cfg.nu2 * (z.array().square() + p.array().square()))
                        .sum();
  v += cfg.mu1 * (b.array().abs() + t.array().abs()).sum();
  v += cfg.mu2 * (z.array().abs() + p.array().abs()).sum();
  v += cfg.kappa3 * coef.lambda.array().abs().sum();
  v += cfg.kappa4 * std::abs(coef.delta);
  return v;
}

Coefficients rescale_to_raw(const Coefficients& coef, const ColumnStats& stats) {
  Coefficients out = coef;
  out.beta = coef.beta.cwiseProduct(stats.m1_sd) / stats.x_sd;
  out.theta = coef.theta.cwiseQuotient(stats.m1_sd) * stats.y_sd;
  out.zeta = coef.zeta.cwiseProduct(stats.m2_sd) / stats.x_sd;
  out.pi = coef.pi.cwiseQuotient(stats.m2_sd) * stats.y_sd;
  out.lambda = stats.m1_sd.cwiseInverse().asDiagonal() * coef.lambda * stats.m2_sd.asDiagonal();
  out.delta = coef.delta * stats.y_sd / stats.x_sd;
  return out;
}

}  // namespace medpath
