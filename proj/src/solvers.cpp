#include "medpath/solvers.hpp"

#include <cmath>

#include "medpath/errors.hpp"

namespace medpath {

double soft_threshold(double a, double b) {
  const double m = std::abs(a) - b;
  if (m <= 0.0) return 0.0;
  return a > 0.0 ? m : -m;
}

double bivariate_value(const BivariateProblem& p, double a1, double a2) {
  return p.b1 * std::abs(a1 * a2) + p.b2 * std::abs(a1) + p.b2 * std::abs(a2) +
         0.5 * p.b3 * a1 * a1 + 0.5 * p.b4 * a2 * a2 - p.b5 * a1 - p.b6 * a2;
}

namespace {

struct Candidate {
  double a1, a2, value;
};

bool better(const Candidate& lhs, const Candidate& rhs) {
  if (lhs.value != rhs.value) return lhs.value < rhs.value;
  const double l1l = std::abs(lhs.a1) + std::abs(lhs.a2);
  const double l1r = std::abs(rhs.a1) + std::abs(rhs.a2);
  if (l1l != l1r) return l1l < l1r;
  if (lhs.a1 != rhs.a1) return lhs.a1 < rhs.a1;
  return lhs.a2 < rhs.a2;
}

}  // namespace

std::pair<double, double> bivariate_prox(const BivariateProblem& p) {
  Candidate best{0.0, 0.0, bivariate_value(p, 0.0, 0.0)};
  auto consider = [&](double a1, double a2) {
    Candidate c{a1, a2, bivariate_value(p, a1, a2)};
    if (better(c, best)) best = c;
  };

  // Axis candidates: with one coordinate at zero the other reduces to a
  // scalar soft-threshold.
  consider(soft_threshold(p.b5, p.b2) / p.b3, 0.0);
  consider(0.0, soft_threshold(p.b6, p.b2) / p.b4);

  // Interior stationary points per sign quadrant. With |a1 a2| linearized
  // by the sign pattern the stationarity conditions form a 2x2 system;
  // a solution counts only inside its quadrant (clipped to the axes
  // otherwise, which the axis candidates already cover).
  const double det = p.b3 * p.b4 - p.b1 * p.b1;
  if (det > 0.0) {
    for (const double s1 : {1.0, -1.0}) {
      for (const double s2 : {1.0, -1.0}) {
        const double c = p.b1 * s1 * s2;
        const double r1 = p.b5 - p.b2 * s1;
        const double r2 = p.b6 - p.b2 * s2;
        double a1 = (p.b4 * r1 - c * r2) / det;
        double a2 = (p.b3 * r2 - c * r1) / det;
        if (s1 * a1 < 0.0) a1 = 0.0;
        if (s2 * a2 < 0.0) a2 = 0.0;
        consider(a1, a2);
      }
    }
  }
  return {best.a1, best.a2};
}

Eigen::VectorXd lasso_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& dty,
                           double kappa3, Eigen::VectorXd warm_start,
                           const LassoOptions& opts, bool* hit_budget) {
  const Eigen::Index p = dty.size();
  if (gram.rows() != p || gram.cols() != p || warm_start.size() != p)
    throw DimensionMismatch("lasso gram dimensions inconsistent");
  Eigen::VectorXd w = std::move(warm_start);
  Eigen::VectorXd q = gram * w;  // gram * w, maintained incrementally

  bool exhausted = true;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double gjj = gram(j, j);
      if (gjj <= 0.0) continue;  // degenerate column stays put
      const double old = w[j];
      const double rho_j = dty[j] - q[j] + gjj * old;  // partial residual correlation
      const double next = soft_threshold(rho_j, kappa3) / gjj;
      const double delta = next - old;
      if (delta != 0.0) {
        w[j] = next;
        q += gram.col(j) * delta;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta < opts.tol) {
      exhausted = false;
      break;
    }
  }
  if (hit_budget) {
    *hit_budget = exhausted;
  } else if (exhausted) {
    throw MaxIterations("lasso coordinate descent exhausted its sweep budget");
  }
  return w;
}

Eigen::VectorXd lasso_column(const Eigen::VectorXd& response, const Eigen::MatrixXd& design,
                             double kappa3, const Eigen::VectorXd& warm_start,
                             const LassoOptions& opts) {
  if (design.rows() != response.size())
    throw DimensionMismatch("lasso design/response row mismatch");
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd dty = design.transpose() * response;
  return lasso_gram(gram, dty, kappa3, warm_start, opts);
}

FitWorkspace FitWorkspace::build(const Dataset& data, double rho) {
  if (rho <= 0.0) throw SingularMatrix("rho must be positive");
  FitWorkspace ws;
  ws.xtx = data.x.squaredNorm();
  ws.xtm1 = data.m1.transpose() * data.x;
  ws.xtm2 = data.m2.transpose() * data.x;
  ws.xty = data.x.dot(data.y);
  ws.m1tm1 = data.m1.transpose() * data.m1;
  ws.m2tm2 = data.m2.transpose() * data.m2;
  ws.m1tm2 = data.m1.transpose() * data.m2;
  ws.m1ty = data.m1.transpose() * data.y;
  ws.m2ty = data.m2.transpose() * data.y;
  ws.m1_ridge.compute(ws.m1tm1 + rho * Eigen::MatrixXd::Identity(data.p1(), data.p1()));
  ws.m2_ridge.compute(ws.m2tm2 + rho * Eigen::MatrixXd::Identity(data.p2(), data.p2()));
  if (ws.m1_ridge.info() != Eigen::Success || ws.m2_ridge.info() != Eigen::Success)
    throw SingularMatrix("ridge factorization failed");
  return ws;
}

Eigen::VectorXd update_beta(const FitWorkspace& ws, const AdmmState& s) {
  return (ws.xtm1 - s.tau1 + s.rho * s.aux.beta) / (ws.xtx + s.rho);
}

Eigen::VectorXd update_theta(const FitWorkspace& ws, const AdmmState& s) {
  const Eigen::VectorXd rhs = ws.m1ty - ws.xtm1 * s.coef.delta - ws.m1tm2 * s.coef.pi -
                              s.tau2 + s.rho * s.aux.theta;
  return ws.m1_ridge.solve(rhs);
}

Eigen::VectorXd update_zeta(const FitWorkspace& ws, const AdmmState& s) {
  const Eigen::VectorXd xtm1l = s.coef.lambda.transpose() * ws.xtm1;  // (X^T M1 Lambda)^T
  return (ws.xtm2 - xtm1l - s.tau3 + s.rho * s.aux.zeta) / (ws.xtx + s.rho);
}

Eigen::VectorXd update_pi(const FitWorkspace& ws, const AdmmState& s) {
  const Eigen::VectorXd rhs = ws.m2ty - ws.xtm2 * s.coef.delta -
                              ws.m1tm2.transpose() * s.coef.theta - s.tau4 +
                              s.rho * s.aux.pi;
  return ws.m2_ridge.solve(rhs);
}

double update_delta(const FitWorkspace& ws, const AdmmState& s, double kappa4) {
  const double g = ws.xty - ws.xtm1.dot(s.coef.theta) - ws.xtm2.dot(s.coef.pi);
  return soft_threshold(g, kappa4) / ws.xtx;
}

}  // namespace medpath
