#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "medpath/dataset.hpp"
#include "medpath/effects.hpp"
#include "medpath/errors.hpp"
#include "medpath/model.hpp"
#include "support/random_inputs.hpp"

using namespace medpath;
using medpath::testing::random_coefficients;
using medpath::testing::random_dataset;
using medpath::testing::random_sequential_truth;

namespace {

Dataset tiny_dataset() {
  Dataset d;
  d.x = Eigen::Vector3d(1.0, 2.0, 3.0);
  d.m1.resize(3, 2);
  d.m1 << 1.0, 4.0, 2.0, 5.0, 3.0, 9.0;
  d.m2.resize(3, 1);
  d.m2 << 2.0, 4.0, 9.0;
  d.y = Eigen::Vector3d(1.0, 0.0, -1.0);
  return d;
}

}  // namespace

TEST_CASE("standardize maps (1,2,3) to (-1,0,1) and records stats") {
  const Dataset d = standardize(tiny_dataset());
  CHECK(d.standardized);
  CHECK(d.x[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(d.x[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.x[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.stats.x_mean == doctest::Approx(2.0));
  CHECK(d.stats.x_sd == doctest::Approx(1.0));
  CHECK(d.stats.m1_mean[1] == doctest::Approx(6.0));
  // sd of (4,5,9) with divisor n-1: sqrt((4+1+9)/2)
  CHECK(d.stats.m1_sd[1] == doctest::Approx(std::sqrt(7.0)));
  CHECK(d.stats.y_sd == doctest::Approx(1.0));
}

TEST_CASE("standardize matches a direct recomputation on a random sample") {
  std::mt19937_64 rng(7);
  const Dataset raw = random_dataset(rng, 50, 10, 6);
  const Dataset d = standardize(raw);
  for (Eigen::Index j = 0; j < d.p1(); ++j) {
    const double mean = raw.m1.col(j).mean();
    const double sd = std::sqrt((raw.m1.col(j).array() - mean).square().sum() / 49.0);
    CHECK(d.stats.m1_mean[j] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(d.stats.m1_sd[j] == doctest::Approx(sd).epsilon(1e-12));
    CHECK(d.m1.col(j).mean() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(d.m1.col(j).squaredNorm() / 49.0 == doctest::Approx(1.0).epsilon(1e-10));
  }
  // Already-standardized data is a fixed point up to round-off.
  const Dataset twice = standardize(d);
  CHECK((twice.m2 - d.m2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("standardize rejects constant columns with block and index") {
  Dataset d = tiny_dataset();
  d.m2.col(0).setConstant(3.0);
  CHECK_THROWS_AS(standardize(d), ConstantColumn);
}

TEST_CASE("check_dims rejects mismatched rows and n < 2") {
  Dataset d = tiny_dataset();
  d.y.resize(2);
  CHECK_THROWS_AS(d.check_dims(), DimensionMismatch);
  Dataset one;
  one.x.resize(1);
  one.m1.resize(1, 1);
  one.m2.resize(1, 1);
  one.y.resize(1);
  CHECK_THROWS_AS(one.check_dims(), DimensionMismatch);
}

TEST_CASE("loss equals the sum of the three squared residual norms") {
  std::mt19937_64 rng(11);
  const Dataset d = random_dataset(rng, 20, 3, 4);
  const Coefficients c = random_coefficients(rng, 3, 4);
  const double expect =
      (d.m1 - d.x * c.beta.transpose()).squaredNorm() +
      (d.m2 - d.x * c.zeta.transpose() - d.m1 * c.lambda).squaredNorm() +
      (d.y - d.x * c.delta - d.m1 * c.theta - d.m2 * c.pi).squaredNorm();
  CHECK(loss(d, c) == doctest::Approx(expect).epsilon(1e-12));

  // Zero coefficients leave the raw data norms.
  const Coefficients z = Coefficients::zeros(3, 4);
  CHECK(loss(d, z) ==
        doctest::Approx(d.m1.squaredNorm() + d.m2.squaredNorm() + d.y.squaredNorm()));
}

TEST_CASE("penalty_value hand-checked on unit coefficients") {
  Coefficients c = Coefficients::zeros(1, 1);
  c.beta[0] = 1.0;
  c.theta[0] = 1.0;
  PenaltyConfig cfg;
  cfg.kappa1 = 1.0;
  cfg.nu1 = 2.0;
  cfg.kappa2 = cfg.kappa3 = cfg.kappa4 = cfg.mu1 = cfg.mu2 = 0.0;
  // |1*1| + 2*(1 + 1) = 5
  CHECK(penalty_value(c, std::nullopt, cfg) == doctest::Approx(5.0));

  c.lambda(0, 0) = -3.0;
  c.delta = 2.0;
  cfg.kappa3 = 0.5;
  cfg.kappa4 = 0.25;
  CHECK(penalty_value(c, std::nullopt, cfg) == doctest::Approx(5.0 + 1.5 + 0.5));

  cfg.mu1 = 0.1;
  CHECK(penalty_value(c, std::nullopt, cfg) == doctest::Approx(7.0 + 0.2));
}

TEST_CASE("penalty_value uses the relaxed copies when supplied") {
  std::mt19937_64 rng(3);
  const Coefficients c = random_coefficients(rng, 4, 5);
  PenaltyConfig cfg = PenaltyConfig::shared(0.7, 0.3, {Penalty::P1, Penalty::P2, Penalty::P3});
  AuxBlocks aux{Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4),
                Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5)};
  // With zero relaxed copies only P3 remains.
  const double expect = 0.7 * c.lambda.array().abs().sum() + 0.7 * std::abs(c.delta);
  CHECK(penalty_value(c, aux, cfg) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("PenaltyConfig::shared applies the mask and validates") {
  const PenaltyConfig p2p3 = PenaltyConfig::shared(2.0, 0.1, {Penalty::P2, Penalty::P3});
  CHECK(p2p3.kappa1 == 0.0);
  CHECK(p2p3.kappa2 == 0.0);
  CHECK(p2p3.mu1 == doctest::Approx(0.2));
  CHECK(p2p3.kappa3 == doctest::Approx(2.0));

  const PenaltyConfig p1p3 = PenaltyConfig::shared(2.0, 0.1, {Penalty::P1, Penalty::P3});
  CHECK(p1p3.mu1 == 0.0);
  CHECK(p1p3.kappa1 == doctest::Approx(2.0));

  CHECK_THROWS_AS(PenaltyConfig::shared(1.0, 0.1, {Penalty::P1}, 0.25), DimensionMismatch);
  CHECK_THROWS_AS(PenaltyConfig::shared(-1.0, 0.1, {Penalty::P1}), DimensionMismatch);
}

TEST_CASE("sequential_to_marginal on a 2-mediator chain") {
  SequentialTruth t;
  t.alpha = Eigen::Vector2d(1.0, 0.0);
  t.phi = Eigen::Matrix2d::Zero();
  t.phi(0, 1) = 0.5;
  t.gamma = Eigen::VectorXd::Constant(1, 2.0);
  t.omega = Eigen::MatrixXd::Zero(2, 1);
  t.omega(0, 0) = 1.0;
  t.psi = Eigen::MatrixXd::Zero(1, 1);
  t.theta = Eigen::Vector2d(0.3, 0.4);
  t.pi = Eigen::VectorXd::Constant(1, 0.6);
  t.delta = 0.25;
  t.xi1 = Eigen::Vector2d(1.0, 2.0);
  t.xi2 = Eigen::VectorXd::Constant(1, 1.0);

  const MarginalModel m = sequential_to_marginal(t);
  // beta = alpha (I - Phi)^{-1} with (I-Phi)^{-1} = [[1, .5], [0, 1]]
  CHECK(m.coef.beta[0] == doctest::Approx(1.0));
  CHECK(m.coef.beta[1] == doctest::Approx(0.5));
  CHECK(m.coef.zeta[0] == doctest::Approx(2.0));
  CHECK(m.coef.lambda(0, 0) == doctest::Approx(1.0));
  CHECK(m.coef.delta == doctest::Approx(0.25));
  // Sigma1 = (I - Phi^T)^{-1} Xi1 (I - Phi)^{-1}
  Eigen::Matrix2d inv;
  inv << 1.0, 0.5, 0.0, 1.0;
  const Eigen::Matrix2d expect = inv.transpose() * t.xi1.asDiagonal() * inv;
  CHECK((m.sigma1 - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sequential <-> marginal round trip on random draws") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 100; ++rep) {
    const SequentialTruth t = random_sequential_truth(rng, 5, 4);
    const MarginalModel m = sequential_to_marginal(t);
    const Eigen::Index p1 = 5, p2 = 4;
    const Eigen::MatrixXd a1 = Eigen::MatrixXd::Identity(p1, p1) - t.phi;
    const Eigen::MatrixXd a2 = Eigen::MatrixXd::Identity(p2, p2) - t.psi;

    // Recover the sequential parameters from the marginal ones.
    CHECK((m.coef.beta.transpose() * a1 - t.alpha.transpose()).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK((m.coef.zeta.transpose() * a2 - t.gamma.transpose()).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK((m.coef.lambda * a2 - t.omega).cwiseAbs().maxCoeff() < 1e-10);

    // Sigma must reduce back to the diagonal error variances.
    const Eigen::MatrixXd xi1 = a1.transpose() * m.sigma1 * a1;
    CHECK((xi1 - Eigen::MatrixXd(t.xi1.asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd xi2 = a2.transpose() * m.sigma2 * a2;
    CHECK((xi2 - Eigen::MatrixXd(t.xi2.asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);

    // And Sigma stays symmetric positive definite.
    CHECK((m.sigma1 - m.sigma1.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.sigma1);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("sequential truth validation rejects bad shapes") {
  std::mt19937_64 rng(1);
  SequentialTruth t = random_sequential_truth(rng, 3, 3);
  t.phi(1, 0) = 0.3;  // below the diagonal
  CHECK_THROWS_AS(sequential_to_marginal(t), DimensionMismatch);
  t.phi(1, 0) = 0.0;
  t.xi1[0] = 0.0;
  CHECK_THROWS_AS(sequential_to_marginal(t), DimensionMismatch);
}

TEST_CASE("pairwise penalty is midpoint convex for nu >= 1/2") {
  auto pair_penalty = [](double nu, double a, double b) {
    return std::abs(a * b) + nu * (a * a + b * b);
  };
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (const double nu : {0.5, 1.0, 2.0}) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
      const double mid = pair_penalty(nu, 0.5 * (a1 + a2), 0.5 * (b1 + b2));
      const double chord = 0.5 * (pair_penalty(nu, a1, b1) + pair_penalty(nu, a2, b2));
      worst = std::max(worst, mid - chord);
    }
    CHECK(worst <= 1e-9);
  }
  // Negative control: below 1/2 the relaxation stops being convex.
  double violation = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
    const double mid = pair_penalty(0.25, 0.5 * (a1 + a2), 0.5 * (b1 + b2));
    const double chord = 0.5 * (pair_penalty(0.25, a1, b1) + pair_penalty(0.25, a2, b2));
    violation = std::max(violation, mid - chord);
  }
  CHECK(violation > 1e-3);
}

TEST_CASE("rescale_to_raw scales every pathway product by y_sd / x_sd") {
  std::mt19937_64 rng(23);
  const Coefficients c = random_coefficients(rng, 3, 4);
  ColumnStats stats;
  std::uniform_real_distribution<double> u(0.5, 3.0);
  stats.x_sd = u(rng);
  stats.y_sd = u(rng);
  stats.m1_sd = Eigen::Vector3d(u(rng), u(rng), u(rng));
  stats.m2_sd = Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng));

  const Coefficients raw = rescale_to_raw(c, stats);
  const double factor = stats.y_sd / stats.x_sd;
  const PathwayEffects std_eff = pathway_effects(c, 1.0, 0.0);
  const PathwayEffects raw_eff = pathway_effects(raw, 1.0, 0.0);
  CHECK(raw_eff.ie1_total == doctest::Approx(factor * std_eff.ie1_total).epsilon(1e-12));
  CHECK(raw_eff.ie2_total == doctest::Approx(factor * std_eff.ie2_total).epsilon(1e-12));
  CHECK(raw_eff.ie12_total == doctest::Approx(factor * std_eff.ie12_total).epsilon(1e-12));
  CHECK(raw_eff.de == doctest::Approx(factor * std_eff.de).epsilon(1e-12));
}
