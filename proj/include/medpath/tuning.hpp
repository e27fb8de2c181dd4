#pragma once

#include <set>
#include <string>
#include <vector>

#include "medpath/admm.hpp"
#include "medpath/model.hpp"

namespace medpath {

/// Grid-search plan over the shared tuning weight kappa with a fixed
/// mu/kappa ratio.
struct TuningPlan {
  std::vector<double> kappa_grid;  // strictly increasing, all positive
  double ratio = 0.1;              // mu / kappa
  std::set<Penalty> mask{Penalty::P1, Penalty::P2, Penalty::P3};
  double nu1 = 2.0, nu2 = 2.0;
  double rho = 1.0;

  void validate() const;

  PenaltyConfig config_for(double kappa) const;
};

/// Named presets matching the compared penalty combinations.
TuningPlan preset_plan(const std::string& name);  // P1P2P3-1, P1P2P3-2, P2P3, P1P3

/// Modified information criterion: loss plus log(n) times the total
/// active-set size.
double bic(const FitResult& fit_result, const Dataset& data);

/// Smallest kappa whose fit is all-zero, located by doubling search.
double kappa_max(const Dataset& data, const TuningPlan& plan, const FitOptions& opts);

/// 30 log-spaced kappa values spanning [1e-3, 1e1] * kappa_max.
std::vector<double> default_grid(const Dataset& data, const TuningPlan& plan,
                                 const FitOptions& opts, int points = 30);

struct GridPoint {
  double kappa = 0.0;
  double bic = 0.0;
  double loss = 0.0;
  int active_total = 0;
  ActiveSets active;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

struct GridSearchResult {
  FitResult best;
  double best_kappa = 0.0;
  std::vector<GridPoint> table;  // in grid order (increasing kappa)
};

/// Fits every kappa from largest to smallest with warm starts and selects
/// the minimal-BIC fit; BIC ties go to the larger kappa.
GridSearchResult grid_search(const Dataset& data, const TuningPlan& plan,
                             const FitOptions& opts = {});

}  // namespace medpath
