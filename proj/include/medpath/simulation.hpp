#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "medpath/dataset.hpp"
#include "medpath/model.hpp"
#include "medpath/tuning.hpp"

namespace medpath {

enum class ExposureKind { Gaussian, Bernoulli };

struct SimConfig {
  Eigen::Index n = 50;
  Eigen::Index p1 = 20;
  Eigen::Index p2 = 30;
  double sparsity = 0.1;         // fraction of nonzero paths per block
  double target_total_ie = 8.0;  // truth for ie1 + ie2 + ie12 at unit contrast
  double noise_m1 = 1.0;         // per-block error sds
  double noise_m2 = 1.0;
  double noise_y = 1.0;
  ExposureKind exposure = ExposureKind::Gaussian;
  std::uint64_t seed = 1;
  int replications = 1;
  // Report effects from an unpenalized refit on the selected support
  // instead of the shrunk penalized estimates.
  bool refit_estimates = true;

  void validate() const;
};

/// Deterministic sparse truth with overlapping supports so all three
/// indirect-path types are active; theta and pi are rescaled so the total
/// indirect effect at unit contrast equals target_total_ie exactly.
Coefficients default_truth(const SimConfig& config);

/// Draws one dataset from the marginal model at the given truth.
/// Deterministic given the seed.
Dataset generate(const SimConfig& config, const Coefficients& truth, std::uint64_t seed);

/// Per-replication seed stream: hash(seed, replication index).
std::uint64_t derive_seed(std::uint64_t seed, int replication);

struct ReplicationRecord {
  double est_total_ie = 0.0;  // on the generated (raw) scale
  double sq_error = 0.0;      // vs target_total_ie
  double sensitivity = 0.0;
  double specificity = 0.0;
  double mspe = 0.0;
  double seconds = 0.0;
  double selected_kappa = 0.0;
  bool failed = false;
};

struct RocPoint {
  double kappa = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct ExperimentReport {
  std::vector<ReplicationRecord> reps;
  double mean_total_ie = 0.0;
  double mse = 0.0;  // mean squared error of the total indirect effect
  double mean_sensitivity = 0.0;
  double mean_specificity = 0.0;
  double mean_mspe = 0.0;
  double mean_seconds = 0.0;
  int failures = 0;
  std::vector<RocPoint> roc;  // pooled over replications, per grid point
};

/// Nonzero-path indicators used for selection metrics: the union of the
/// three indirect-path index sets over p1 + p2 + p1*p2 slots.
std::vector<bool> path_indicators(const Coefficients& coef,
                                  double zero_tol = kActiveSetZeroTol);

std::vector<bool> path_indicators(const ActiveSets& sets, Eigen::Index p1,
                                  Eigen::Index p2);

/// Runs the replicated experiment: generate, standardize, grid-search by
/// BIC, score against the truth. Replications run on `threads` workers
/// with derived per-replication seeds.
ExperimentReport run_experiment(const SimConfig& config, const TuningPlan& plan,
                                const FitOptions& opts = {}, int threads = 1);

}  // namespace medpath
