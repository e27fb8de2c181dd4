#include "medpath/admm.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "medpath/errors.hpp"
#include "medpath/solvers.hpp"

namespace medpath {

AdmmState AdmmState::zeros(Eigen::Index p1, Eigen::Index p2, double rho) {
  AdmmState s;
  s.coef = Coefficients::zeros(p1, p2);
  s.aux.beta = Eigen::VectorXd::Zero(p1);
  s.aux.theta = Eigen::VectorXd::Zero(p1);
  s.aux.zeta = Eigen::VectorXd::Zero(p2);
  s.aux.pi = Eigen::VectorXd::Zero(p2);
  s.tau1 = Eigen::VectorXd::Zero(p1);
  s.tau2 = Eigen::VectorXd::Zero(p1);
  s.tau3 = Eigen::VectorXd::Zero(p2);
  s.tau4 = Eigen::VectorXd::Zero(p2);
  s.rho = rho;
  return s;
}

ActiveSets active_sets(const Coefficients& coef, double zero_tol) {
  ActiveSets as;
  const Eigen::Index p1 = coef.p1(), p2 = coef.p2();
  for (Eigen::Index j = 0; j < p1; ++j)
    if (std::abs(coef.beta[j]) > zero_tol && std::abs(coef.theta[j]) > zero_tol)
      as.a1.push_back(static_cast<int>(j));
  for (Eigen::Index k = 0; k < p2; ++k)
    if (std::abs(coef.zeta[k]) > zero_tol && std::abs(coef.pi[k]) > zero_tol)
      as.a2.push_back(static_cast<int>(k));
  for (Eigen::Index j = 0; j < p1; ++j) {
    if (std::abs(coef.beta[j]) <= zero_tol) continue;
    for (Eigen::Index k = 0; k < p2; ++k)
      if (std::abs(coef.lambda(j, k)) > zero_tol && std::abs(coef.pi[k]) > zero_tol)
        as.a3.emplace_back(static_cast<int>(j), static_cast<int>(k));
  }
  return as;
}

namespace {

// Residual sum of squares in Gram form; algebraically equal to
// loss(data, c) but avoids the n-row products inside the iteration.
double loss_gram(const FitWorkspace& ws, double yty, double m1_trace, double m2_trace,
                 const Coefficients& c) {
  const double l1 =
      m1_trace - 2.0 * c.beta.dot(ws.xtm1) + ws.xtx * c.beta.squaredNorm();

  const Eigen::VectorXd lam_xtm1 = c.lambda.transpose() * ws.xtm1;
  const double l2 = m2_trace - 2.0 * c.zeta.dot(ws.xtm2) -
                    2.0 * c.lambda.cwiseProduct(ws.m1tm2).sum() +
                    ws.xtx * c.zeta.squaredNorm() + 2.0 * c.zeta.dot(lam_xtm1) +
                    (ws.m1tm1 * c.lambda).cwiseProduct(c.lambda).sum();

  const double l3 = yty - 2.0 * c.delta * ws.xty - 2.0 * c.theta.dot(ws.m1ty) -
                    2.0 * c.pi.dot(ws.m2ty) + c.delta * c.delta * ws.xtx +
                    2.0 * c.delta * c.theta.dot(ws.xtm1) +
                    2.0 * c.delta * c.pi.dot(ws.xtm2) +
                    c.theta.dot(ws.m1tm1 * c.theta) +
                    2.0 * c.theta.dot(ws.m1tm2 * c.pi) + c.pi.dot(ws.m2tm2 * c.pi);
  return l1 + l2 + l3;
}

// Dual values that make the given coefficients a fixed point of the block
// updates; used to resume from a previous solution.
void seed_duals(const FitWorkspace& ws, AdmmState& s) {
  const Coefficients& c = s.coef;
  s.tau1 = ws.xtm1 - ws.xtx * c.beta;
  s.tau2 = ws.m1ty - ws.xtm1 * c.delta - ws.m1tm2 * c.pi - ws.m1tm1 * c.theta;
  s.tau3 = ws.xtm2 - c.lambda.transpose() * ws.xtm1 - ws.xtx * c.zeta;
  s.tau4 = ws.m2ty - ws.xtm2 * c.delta - ws.m1tm2.transpose() * c.theta -
           ws.m2tm2 * c.pi;
}

}  // namespace

FitResult fit(const Dataset& data, const PenaltyConfig& cfg, const FitOptions& opts) {
  if (!data.standardized) throw NotStandardized();
  data.check_dims();
  if (opts.rho <= 0.0 || opts.rel_tol <= 0.0 || opts.inner_lasso_tol <= 0.0 ||
      opts.max_iters < 1)
    throw DimensionMismatch("invalid fit options");

  const Eigen::Index p1 = data.p1(), p2 = data.p2();
  const FitWorkspace ws = FitWorkspace::build(data, opts.rho);
  const double yty = data.y.squaredNorm();
  const double m1_trace = ws.m1tm1.trace();
  const double m2_trace = ws.m2tm2.trace();

  AdmmState s = AdmmState::zeros(p1, p2, opts.rho);
  if (opts.warm_start) {
    opts.warm_start->check_dims(data);
    s.coef = *opts.warm_start;
    s.aux.beta = s.coef.beta;
    s.aux.theta = s.coef.theta;
    s.aux.zeta = s.coef.zeta;
    s.aux.pi = s.coef.pi;
    seed_duals(ws, s);
  }

  LassoOptions lasso_opts;
  lasso_opts.tol = opts.inner_lasso_tol;

  FitResult result;
  result.objective_trace.reserve(64);
  double prev_obj = std::numeric_limits<double>::infinity();

  const double pair1_quad = 2.0 * cfg.kappa1 * cfg.nu1 + opts.rho;
  const double pair2_quad = 2.0 * cfg.kappa2 * cfg.nu2 + opts.rho;

  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    s.coef.beta = update_beta(ws, s);
    s.coef.theta = update_theta(ws, s);
    s.coef.zeta = update_zeta(ws, s);
    s.coef.pi = update_pi(ws, s);
    s.coef.delta = update_delta(ws, s, cfg.kappa4);

    for (Eigen::Index k = 0; k < p2; ++k) {
      const Eigen::VectorXd dty = ws.m1tm2.col(k) - ws.xtm1 * s.coef.zeta[k];
      bool exhausted = false;
      s.coef.lambda.col(k) =
          lasso_gram(ws.m1tm1, dty, cfg.kappa3, s.coef.lambda.col(k), lasso_opts, &exhausted);
      if (exhausted) ++result.lasso_budget_warnings;
    }

    for (Eigen::Index j = 0; j < p1; ++j) {
      BivariateProblem prob{cfg.kappa1, cfg.mu1, pair1_quad, pair1_quad,
                            s.tau1[j] + opts.rho * s.coef.beta[j],
                            s.tau2[j] + opts.rho * s.coef.theta[j]};
      std::tie(s.aux.beta[j], s.aux.theta[j]) = bivariate_prox(prob);
    }
    for (Eigen::Index k = 0; k < p2; ++k) {
      BivariateProblem prob{cfg.kappa2, cfg.mu2, pair2_quad, pair2_quad,
                            s.tau3[k] + opts.rho * s.coef.zeta[k],
                            s.tau4[k] + opts.rho * s.coef.pi[k]};
      std::tie(s.aux.zeta[k], s.aux.pi[k]) = bivariate_prox(prob);
    }

    s.tau1 += opts.rho * (s.coef.beta - s.aux.beta);
    s.tau2 += opts.rho * (s.coef.theta - s.aux.theta);
    s.tau3 += opts.rho * (s.coef.zeta - s.aux.zeta);
    s.tau4 += opts.rho * (s.coef.pi - s.aux.pi);

    const double obj = 0.5 * loss_gram(ws, yty, m1_trace, m2_trace, s.coef) +
                       penalty_value(s.coef, s.aux, cfg);
    result.objective_trace.push_back(obj);

    if (std::abs(obj - prev_obj) / std::max(1.0, std::abs(prev_obj)) < opts.rel_tol) {
      result.converged = true;
      ++iter;
      break;
    }
    prev_obj = obj;
  }

  result.iterations = iter;
  result.primal = s.coef;
  result.coef = s.coef;
  // Report the relaxed copies: the prox steps give exact zeros there.
  result.coef.beta = s.aux.beta;
  result.coef.theta = s.aux.theta;
  result.coef.zeta = s.aux.zeta;
  result.coef.pi = s.aux.pi;

  result.primal_residual_beta = (s.coef.beta - s.aux.beta).norm();
  result.primal_residual_theta = (s.coef.theta - s.aux.theta).norm();
  result.primal_residual_zeta = (s.coef.zeta - s.aux.zeta).norm();
  result.primal_residual_pi = (s.coef.pi - s.aux.pi).norm();
  result.active_sets = active_sets(result.coef);
  return result;
}

namespace {

// Least-squares solve of response ~ selected columns; tolerant of
// rank deficiency (minimum-residual solution via column-pivoted QR).
Eigen::VectorXd solve_subset(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
  return design.colPivHouseholderQr().solve(response);
}

}  // namespace

Coefficients refit_support(const Dataset& data, const Coefficients& pattern,
                           double zero_tol) {
  data.check_dims();
  pattern.check_dims(data);
  const Eigen::Index n = data.n(), p1 = data.p1(), p2 = data.p2();
  Coefficients out = Coefficients::zeros(p1, p2);

  // Exposure -> m1 regressions are univariate per mediator.
  const double xtx = data.x.squaredNorm();
  for (Eigen::Index j = 0; j < p1; ++j)
    if (std::abs(pattern.beta[j]) > zero_tol)
      out.beta[j] = data.x.dot(data.m1.col(j)) / xtx;

  // m2 equation, one column at a time on its selected predictors.
  for (Eigen::Index k = 0; k < p2; ++k) {
    std::vector<Eigen::Index> rows;  // lambda rows in the design
    for (Eigen::Index j = 0; j < p1; ++j)
      if (std::abs(pattern.lambda(j, k)) > zero_tol) rows.push_back(j);
    const bool with_x = std::abs(pattern.zeta[k]) > zero_tol;
    const Eigen::Index cols = static_cast<Eigen::Index>(rows.size()) + (with_x ? 1 : 0);
    if (cols == 0) continue;
    Eigen::MatrixXd design(n, cols);
    Eigen::Index c = 0;
    if (with_x) design.col(c++) = data.x;
    for (Eigen::Index j : rows) design.col(c++) = data.m1.col(j);
    const Eigen::VectorXd sol = solve_subset(design, data.m2.col(k));
    c = 0;
    if (with_x) out.zeta[k] = sol[c++];
    for (Eigen::Index j : rows) out.lambda(j, k) = sol[c++];
  }

  // Outcome equation on its selected predictors.
  {
    std::vector<Eigen::Index> m1_cols, m2_cols;
    for (Eigen::Index j = 0; j < p1; ++j)
      if (std::abs(pattern.theta[j]) > zero_tol) m1_cols.push_back(j);
    for (Eigen::Index k = 0; k < p2; ++k)
      if (std::abs(pattern.pi[k]) > zero_tol) m2_cols.push_back(k);
    const bool with_x = std::abs(pattern.delta) > zero_tol;
    const Eigen::Index cols = static_cast<Eigen::Index>(m1_cols.size() + m2_cols.size()) +
                              (with_x ? 1 : 0);
    if (cols > 0) {
      Eigen::MatrixXd design(n, cols);
      Eigen::Index c = 0;
      if (with_x) design.col(c++) = data.x;
      for (Eigen::Index j : m1_cols) design.col(c++) = data.m1.col(j);
      for (Eigen::Index k : m2_cols) design.col(c++) = data.m2.col(k);
      const Eigen::VectorXd sol = solve_subset(design, data.y);
      c = 0;
      if (with_x) out.delta = sol[c++];
      for (Eigen::Index j : m1_cols) out.theta[j] = sol[c++];
      for (Eigen::Index k : m2_cols) out.pi[k] = sol[c++];
    }
  }
  return out;
}

Coefficients path_restricted(const Coefficients& coef, double zero_tol) {
  const ActiveSets sets = active_sets(coef, zero_tol);
  Coefficients out = Coefficients::zeros(coef.p1(), coef.p2());
  out.delta = coef.delta;
  for (int j : sets.a1) {
    out.beta[j] = coef.beta[j];
    out.theta[j] = coef.theta[j];
  }
  for (int k : sets.a2) {
    out.zeta[k] = coef.zeta[k];
    out.pi[k] = coef.pi[k];
  }
  for (auto [j, k] : sets.a3) {
    out.beta[j] = coef.beta[j];
    out.lambda(j, k) = coef.lambda(j, k);
    out.pi[k] = coef.pi[k];
  }
  return out;
}

}  // namespace medpath
