#include "medpath/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "medpath/errors.hpp"

namespace medpath {

void TuningPlan::validate() const {
  if (kappa_grid.empty()) throw DimensionMismatch("empty tuning grid");
  for (size_t i = 0; i < kappa_grid.size(); ++i) {
    if (kappa_grid[i] <= 0.0) throw DimensionMismatch("grid values must be positive");
    if (i > 0 && kappa_grid[i] <= kappa_grid[i - 1])
      throw DimensionMismatch("grid must be strictly increasing");
  }
  if (ratio < 0.0 || rho <= 0.0 || nu1 < 0.5 || nu2 < 0.5)
    throw DimensionMismatch("invalid tuning plan parameters");
}

PenaltyConfig TuningPlan::config_for(double kappa) const {
  return PenaltyConfig::shared(kappa, ratio, mask, nu1, nu2);
}

TuningPlan preset_plan(const std::string& name) {
  TuningPlan plan;
  if (name == "P1P2P3-1") {
    plan.ratio = 1.0;
  } else if (name == "P1P2P3-2") {
    plan.ratio = 0.1;
  } else if (name == "P2P3") {
    plan.mask = {Penalty::P2, Penalty::P3};
    plan.ratio = 1.0;
  } else if (name == "P1P3") {
    plan.mask = {Penalty::P1, Penalty::P3};
    plan.ratio = 0.0;
  } else {
    throw DimensionMismatch("unknown tuning preset: " + name);
  }
  return plan;
}

double bic(const FitResult& fit_result, const Dataset& data) {
  // The likelihood term is maximized over the selected model: loss at the
  // unpenalized refit, not at the shrunk estimates. The model's free
  // parameters are the pathway products the count term charges for, so
  // coefficients outside every active pathway stay at zero in the refit.
  const Coefficients ml = refit_support(data, path_restricted(fit_result.coef));
  return loss(data, ml) +
         std::log(static_cast<double>(data.n())) * fit_result.active_sets.total();
}

namespace {

bool all_zero(const Coefficients& c, double tol = kActiveSetZeroTol) {
  return c.beta.lpNorm<Eigen::Infinity>() <= tol &&
         c.theta.lpNorm<Eigen::Infinity>() <= tol &&
         c.zeta.lpNorm<Eigen::Infinity>() <= tol &&
         c.pi.lpNorm<Eigen::Infinity>() <= tol &&
         c.lambda.lpNorm<Eigen::Infinity>() <= tol && std::abs(c.delta) <= tol;
}

}  // namespace

double kappa_max(const Dataset& data, const TuningPlan& plan, const FitOptions& opts) {
  double kappa = 1.0;
  // Walk down first in case kappa=1 already kills everything.
  for (int i = 0; i < 60; ++i) {
    FitResult r = fit(data, plan.config_for(kappa), opts);
    if (!all_zero(r.coef)) break;
    kappa /= 2.0;
  }
  for (int i = 0; i < 60; ++i) {
    FitResult r = fit(data, plan.config_for(kappa), opts);
    if (all_zero(r.coef)) return kappa;
    kappa *= 2.0;
  }
  return kappa;
}

std::vector<double> default_grid(const Dataset& data, const TuningPlan& plan,
                                 const FitOptions& opts, int points) {
  const double kmax = kappa_max(data, plan, opts);
  const double lo = std::log10(1e-3 * kmax);
  const double hi = std::log10(1e1 * kmax);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = std::pow(10.0, lo + (hi - lo) * i / (points - 1));
  return grid;
}

GridSearchResult grid_search(const Dataset& data, const TuningPlan& plan,
                             const FitOptions& opts) {
  plan.validate();
  GridSearchResult out;
  out.table.resize(plan.kappa_grid.size());

  FitOptions point_opts = opts;
  bool have_best = false;
  double best_bic = 0.0;

  // Largest to smallest, warm-starting each point from its predecessor.
  for (int i = static_cast<int>(plan.kappa_grid.size()) - 1; i >= 0; --i) {
    const double kappa = plan.kappa_grid[i];
    GridPoint& rec = out.table[i];
    rec.kappa = kappa;
    try {
      FitResult r = fit(data, plan.config_for(kappa), point_opts);
      point_opts.warm_start = r.coef;
      rec.bic = bic(r, data);
      rec.loss = loss(data, r.coef);
      rec.active_total = r.active_sets.total();
      rec.active = r.active_sets;
      rec.iterations = r.iterations;
      rec.converged = r.converged;
      // Ties go to the larger kappa, i.e. the fit seen first.
      if (!have_best || rec.bic < best_bic) {
        have_best = true;
        best_bic = rec.bic;
        out.best = std::move(r);
        out.best_kappa = kappa;
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      point_opts.warm_start.reset();  // cold-start the next point
    }
  }
  if (!have_best) throw MaxIterations("every grid point failed");
  return out;
}

}  // namespace medpath
