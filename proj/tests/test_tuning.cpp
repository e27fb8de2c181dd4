#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "medpath/admm.hpp"
#include "medpath/errors.hpp"
#include "medpath/simulation.hpp"
#include "medpath/tuning.hpp"
#include "support/random_inputs.hpp"

using namespace medpath;
using medpath::testing::random_dataset;

namespace {

Dataset sim_standardized(Eigen::Index n, Eigen::Index p1, Eigen::Index p2,
                         std::uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.p1 = p1;
  cfg.p2 = p2;
  cfg.sparsity = 0.5;
  cfg.target_total_ie = 4.0;
  const Coefficients truth = default_truth(cfg);
  return standardize(generate(cfg, truth, seed));
}

}  // namespace

TEST_CASE("bic arithmetic: refit likelihood plus log(n) per active path") {
  std::mt19937_64 rng(1);
  const Dataset data = standardize(random_dataset(rng, 50, 2, 2));

  FitResult empty;
  empty.coef = Coefficients::zeros(2, 2);
  empty.active_sets = active_sets(empty.coef);
  const double tss = data.m1.squaredNorm() + data.m2.squaredNorm() + data.y.squaredNorm();
  CHECK(bic(empty, data) == doctest::Approx(tss).epsilon(1e-12));

  FitResult three = empty;
  three.coef.beta[0] = 1.0;   // opens one type-1 path ...
  three.coef.theta[0] = 1.0;
  three.coef.zeta[1] = 1.0;   // ... one type-2 path ...
  three.coef.pi[1] = 1.0;
  three.coef.lambda(0, 1) = 1.0;  // ... and one type-12 path
  three.active_sets = active_sets(three.coef);
  REQUIRE(three.active_sets.total() == 3);
  // The likelihood term is the loss at the unpenalized refit of the
  // pathway-participating coefficients, not at the handed-in values.
  const Coefficients ml = refit_support(data, path_restricted(three.coef));
  CHECK(bic(three, data) ==
        doctest::Approx(loss(data, ml) + 3.0 * std::log(50.0)).epsilon(1e-12));
  // The refit can only improve the fit of the same support.
  CHECK(loss(data, ml) <= loss(data, three.coef) + 1e-12);
}

TEST_CASE("path_restricted zeroes coefficients outside every pathway") {
  Coefficients c = Coefficients::zeros(3, 3);
  c.beta[0] = 1.0;            // no theta, no lambda row -> dropped
  c.beta[1] = 2.0;
  c.theta[1] = 0.5;           // a1 pair at j=1 -> kept
  c.zeta[0] = 1.5;            // no pi -> dropped
  c.zeta[2] = 1.0;
  c.pi[2] = 0.25;             // a2 pair at k=2 -> kept
  c.lambda(1, 2) = 0.7;       // beta_1 and pi_2 alive -> a3 pair kept
  c.lambda(0, 0) = 0.9;       // pi_0 = 0 -> dropped
  c.lambda(2, 2) = 0.3;       // beta_2 = 0 -> dropped
  c.theta[2] = 0.4;           // beta_2 = 0 -> dropped
  c.delta = 0.5;              // always kept

  const Coefficients r = path_restricted(c);
  CHECK(r.beta[0] == 0.0);
  CHECK(r.beta[1] == 2.0);
  CHECK(r.theta[1] == 0.5);
  CHECK(r.zeta[0] == 0.0);
  CHECK(r.zeta[2] == 1.0);
  CHECK(r.pi[2] == 0.25);
  CHECK(r.lambda(1, 2) == 0.7);
  CHECK(r.lambda(0, 0) == 0.0);
  CHECK(r.lambda(2, 2) == 0.0);
  CHECK(r.theta[2] == 0.0);
  CHECK(r.delta == 0.5);
  // Idempotent and pathway-preserving.
  const ActiveSets before = active_sets(c), after = active_sets(r);
  CHECK(before.total() == after.total());
  CHECK((path_restricted(r).beta - r.beta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tuning plan validation") {
  TuningPlan plan;
  CHECK_THROWS_AS(plan.validate(), DimensionMismatch);  // empty grid
  plan.kappa_grid = {0.1, 0.1};
  CHECK_THROWS_AS(plan.validate(), DimensionMismatch);  // not strictly increasing
  plan.kappa_grid = {-0.1, 0.2};
  CHECK_THROWS_AS(plan.validate(), DimensionMismatch);  // nonpositive
  plan.kappa_grid = {0.1, 0.2};
  CHECK_NOTHROW(plan.validate());
  plan.ratio = -1.0;
  CHECK_THROWS_AS(plan.validate(), DimensionMismatch);
}

TEST_CASE("presets set the documented ratios and masks") {
  CHECK(preset_plan("P1P2P3-1").ratio == 1.0);
  CHECK(preset_plan("P1P2P3-2").ratio == doctest::Approx(0.1));
  const TuningPlan p2p3 = preset_plan("P2P3");
  CHECK(!p2p3.mask.contains(Penalty::P1));
  CHECK(p2p3.mask.contains(Penalty::P2));
  const TuningPlan p1p3 = preset_plan("P1P3");
  CHECK(!p1p3.mask.contains(Penalty::P2));
  CHECK(p1p3.ratio == 0.0);
  CHECK_THROWS_AS(preset_plan("P9"), DimensionMismatch);

  const PenaltyConfig cfg = preset_plan("P2P3").config_for(2.0);
  CHECK(cfg.kappa1 == 0.0);
  CHECK(cfg.mu1 == doctest::Approx(2.0));
  CHECK(cfg.kappa3 == doctest::Approx(2.0));
}

TEST_CASE("kappa_max yields an all-zero fit that smaller kappas break") {
  const Dataset data = sim_standardized(40, 2, 2, 7);
  TuningPlan plan;
  plan.kappa_grid = {1.0};  // unused by kappa_max but keeps validate happy
  const FitOptions opts;
  const double kmax = kappa_max(data, plan, opts);
  CHECK(kmax > 0.0);

  const FitResult at_max = fit(data, plan.config_for(kmax), opts);
  CHECK(at_max.coef.beta.cwiseAbs().maxCoeff() <= kActiveSetZeroTol);
  CHECK(at_max.coef.lambda.cwiseAbs().maxCoeff() <= kActiveSetZeroTol);
  CHECK(std::abs(at_max.coef.delta) <= kActiveSetZeroTol);

  // Two octaves below, something must survive (kappa_max is minimal up to
  // the doubling resolution).
  const FitResult below = fit(data, plan.config_for(kmax / 4.0), opts);
  const bool any_nonzero = below.coef.beta.cwiseAbs().maxCoeff() > kActiveSetZeroTol ||
                           below.coef.zeta.cwiseAbs().maxCoeff() > kActiveSetZeroTol ||
                           below.coef.lambda.cwiseAbs().maxCoeff() > kActiveSetZeroTol ||
                           std::abs(below.coef.delta) > kActiveSetZeroTol;
  CHECK(any_nonzero);
}

TEST_CASE("default_grid is log-spaced over [1e-3, 1e1] kappa_max") {
  const Dataset data = sim_standardized(40, 2, 2, 9);
  TuningPlan plan;
  plan.kappa_grid = {1.0};
  const FitOptions opts;
  const double kmax = kappa_max(data, plan, opts);
  const std::vector<double> grid = default_grid(data, plan, opts, 30);
  REQUIRE(grid.size() == 30);
  CHECK(grid.front() == doctest::Approx(1e-3 * kmax).epsilon(1e-9));
  CHECK(grid.back() == doctest::Approx(1e1 * kmax).epsilon(1e-9));
  for (size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
    // Constant ratio between neighbors.
    CHECK(grid[i] / grid[i - 1] ==
          doctest::Approx(grid[1] / grid[0]).epsilon(1e-9));
  }
}

TEST_CASE("grid of one point reduces to a plain fit") {
  const Dataset data = sim_standardized(40, 2, 2, 11);
  TuningPlan plan;
  plan.kappa_grid = {0.3};
  const GridSearchResult gs = grid_search(data, plan);
  const FitResult direct = fit(data, plan.config_for(0.3));
  CHECK(gs.best_kappa == doctest::Approx(0.3));
  REQUIRE(gs.table.size() == 1);
  CHECK(!gs.table[0].failed);
  CHECK(gs.table[0].bic == doctest::Approx(bic(direct, data)).epsilon(1e-12));
  CHECK((gs.best.coef.beta - direct.coef.beta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid_search picks the minimal BIC and breaks ties upward") {
  const Dataset data = sim_standardized(60, 3, 3, 13);
  TuningPlan plan;
  const FitOptions opts;
  const double kmax = kappa_max(data, plan, opts);
  plan.kappa_grid = {0.01 * kmax, 0.1 * kmax, 0.5 * kmax, 2.0 * kmax, 4.0 * kmax};
  const GridSearchResult gs = grid_search(data, plan, opts);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& rec : gs.table) {
    REQUIRE(!rec.failed);
    best = std::min(best, rec.bic);
  }
  // The reported winner attains the table minimum at the largest such kappa.
  double best_kappa = 0.0;
  for (const auto& rec : gs.table)
    if (rec.bic <= best) best_kappa = std::max(best_kappa, rec.kappa);
  CHECK(gs.best_kappa == doctest::Approx(best_kappa));

  // Both all-zero points (2 kmax and 4 kmax) tie on BIC; the tie must have
  // gone to the larger kappa if that tie is the global minimum.
  CHECK(gs.table[3].active_total == 0);
  CHECK(gs.table[4].active_total == 0);
  CHECK(gs.table[3].bic == doctest::Approx(gs.table[4].bic).epsilon(1e-12));
}

TEST_CASE("active sets grow as kappa shrinks, BIC traces the trade-off") {
  const Dataset data = sim_standardized(80, 3, 3, 17);
  TuningPlan plan;
  const FitOptions opts;
  plan.kappa_grid = default_grid(data, plan, opts, 12);
  const GridSearchResult gs = grid_search(data, plan, opts);
  // Loosely monotone: the largest kappa has the fewest active paths, the
  // smallest has the most.
  CHECK(gs.table.front().active_total >= gs.table.back().active_total);
  CHECK(gs.table.back().active_total == 0);
  // Loss is nondecreasing in kappa across the solution path.
  for (size_t i = 1; i < gs.table.size(); ++i)
    CHECK(gs.table[i].loss >= gs.table[i - 1].loss - 1e-6);
}

TEST_CASE("near-noiseless data: some fine-grid point recovers the support") {
  SimConfig cfg;
  cfg.n = 80;
  cfg.p1 = 4;
  cfg.p2 = 4;
  cfg.sparsity = 0.5;
  cfg.target_total_ie = 4.0;
  cfg.noise_m1 = cfg.noise_m2 = cfg.noise_y = 1e-3;
  const Coefficients truth = default_truth(cfg);
  const Dataset data = standardize(generate(cfg, truth, 23));

  // With nearly noiseless mediators the interlayer columns are close to
  // collinear with the exposure, so the duplicates only separate at very
  // small kappa; extend the grid well below the usual floor.
  TuningPlan plan;
  const FitOptions opts;
  const double kmax = kappa_max(data, plan, opts);
  plan.kappa_grid.clear();
  const double lo = std::log10(1e-9 * kmax), hi = std::log10(10.0 * kmax);
  for (int i = 0; i < 40; ++i)
    plan.kappa_grid.push_back(std::pow(10.0, lo + (hi - lo) * i / 39.0));
  const GridSearchResult gs = grid_search(data, plan, opts);

  const std::vector<bool> truth_ind = path_indicators(truth);
  bool full_sensitivity_somewhere = false;
  for (const auto& rec : gs.table) {
    if (rec.failed) continue;
    const std::vector<bool> est = path_indicators(rec.active, cfg.p1, cfg.p2);
    bool all = true;
    for (size_t i = 0; i < truth_ind.size(); ++i)
      if (truth_ind[i] && !est[i]) all = false;
    if (all) full_sensitivity_somewhere = true;
  }
  CHECK(full_sensitivity_somewhere);
}
