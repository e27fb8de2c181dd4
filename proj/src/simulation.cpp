#include "medpath/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "medpath/effects.hpp"
#include "medpath/errors.hpp"

namespace medpath {

void SimConfig::validate() const {
  if (n < 1 || p1 < 1 || p2 < 1 || replications < 1)
    throw DimensionMismatch("n, p1, p2, replications must all be >= 1");
  if (sparsity <= 0.0 || sparsity > 1.0)
    throw DimensionMismatch("sparsity must lie in (0, 1]");
  if (noise_m1 < 0.0 || noise_m2 < 0.0 || noise_y < 0.0)
    throw DimensionMismatch("noise sds must be nonnegative");
}

Coefficients default_truth(const SimConfig& config) {
  config.validate();
  const auto k1 = static_cast<Eigen::Index>(std::lround(config.sparsity * config.p1));
  const auto k2 = static_cast<Eigen::Index>(std::lround(config.sparsity * config.p2));
  if (k1 < 1 || k2 < 1)
    throw InfeasibleSparsity("support sizes round to zero at sparsity " +
                             std::to_string(config.sparsity));

  Coefficients truth = Coefficients::zeros(config.p1, config.p2);
  // Fixed magnitude cycle on overlapping leading supports; all products
  // positive so the three indirect totals add up.
  for (Eigen::Index j = 0; j < k1; ++j) {
    truth.beta[j] = 1.0 + 0.25 * static_cast<double>(j % 3);
    truth.theta[j] = 1.25 - 0.25 * static_cast<double>(j % 2);
  }
  for (Eigen::Index k = 0; k < k2; ++k) {
    truth.zeta[k] = 1.0 + 0.2 * static_cast<double>(k % 2);
    truth.pi[k] = 1.2 - 0.2 * static_cast<double>(k % 3);
  }
  for (Eigen::Index j = 0; j < k1; ++j)
    for (Eigen::Index k = 0; k < k2; ++k) truth.lambda(j, k) = 0.4;
  truth.delta = 0.5;

  const PathwayEffects base = pathway_effects(truth, 1.0, 0.0);
  const double total = base.ie1_total + base.ie2_total + base.ie12_total;
  // theta and pi each enter every indirect product exactly once, so one
  // shared factor retargets the total exactly.
  const double scale = config.target_total_ie / total;
  truth.theta *= scale;
  truth.pi *= scale;
  return truth;
}

Dataset generate(const SimConfig& config, const Coefficients& truth, std::uint64_t seed) {
  config.validate();
  if (truth.p1() != config.p1 || truth.p2() != config.p2)
    throw DimensionMismatch("truth dimensions do not match config");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  Dataset data;
  data.x.resize(config.n);
  if (config.exposure == ExposureKind::Gaussian) {
    for (Eigen::Index i = 0; i < config.n; ++i) data.x[i] = gauss(rng);
  } else {
    for (Eigen::Index i = 0; i < config.n; ++i) data.x[i] = coin(rng) ? 0.5 : -0.5;
  }

  data.m1.resize(config.n, config.p1);
  for (Eigen::Index j = 0; j < config.p1; ++j)
    for (Eigen::Index i = 0; i < config.n; ++i)
      data.m1(i, j) = data.x[i] * truth.beta[j] + config.noise_m1 * gauss(rng);

  data.m2 = data.x * truth.zeta.transpose() + data.m1 * truth.lambda;
  for (Eigen::Index k = 0; k < config.p2; ++k)
    for (Eigen::Index i = 0; i < config.n; ++i)
      data.m2(i, k) += config.noise_m2 * gauss(rng);

  data.y = data.x * truth.delta + data.m1 * truth.theta + data.m2 * truth.pi;
  for (Eigen::Index i = 0; i < config.n; ++i) data.y[i] += config.noise_y * gauss(rng);

  data.standardized = false;
  return data;
}

std::uint64_t derive_seed(std::uint64_t seed, int replication) {
  // splitmix64 over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(replication) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<bool> path_indicators(const Coefficients& coef, double zero_tol) {
  return path_indicators(active_sets(coef, zero_tol), coef.p1(), coef.p2());
}

std::vector<bool> path_indicators(const ActiveSets& sets, Eigen::Index p1,
                                  Eigen::Index p2) {
  std::vector<bool> ind(static_cast<size_t>(p1 + p2 + p1 * p2), false);
  for (int j : sets.a1) ind[static_cast<size_t>(j)] = true;
  for (int k : sets.a2) ind[static_cast<size_t>(p1 + k)] = true;
  for (auto [j, k] : sets.a3)
    ind[static_cast<size_t>(p1 + p2 + static_cast<Eigen::Index>(j) * p2 + k)] = true;
  return ind;
}

namespace {

struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  void add(const std::vector<bool>& truth, const std::vector<bool>& est) {
    for (size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] && est[i]) ++tp;
      else if (!truth[i] && est[i]) ++fp;
      else if (truth[i] && !est[i]) ++fn;
      else ++tn;
    }
  }
};

}  // namespace

ExperimentReport run_experiment(const SimConfig& config, const TuningPlan& plan,
                                const FitOptions& opts, int threads) {
  config.validate();
  plan.validate();
  const Coefficients truth = default_truth(config);
  const std::vector<bool> truth_ind = path_indicators(truth);
  const size_t n_grid = plan.kappa_grid.size();

  ExperimentReport report;
  report.reps.resize(config.replications);
  // per replication, per grid point
  std::vector<std::vector<Confusion>> grid_conf(
      config.replications, std::vector<Confusion>(n_grid));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= config.replications) return;
      ReplicationRecord& rec = report.reps[r];
      const auto start = std::chrono::steady_clock::now();
      try {
        const Dataset raw = generate(config, truth, derive_seed(config.seed, r));
        const Dataset data = standardize(raw);
        const GridSearchResult gs = grid_search(data, plan, opts);

        const Coefficients estimates =
            config.refit_estimates
                ? refit_support(data, path_restricted(gs.best.coef))
                : gs.best.coef;
        const Coefficients raw_coef = rescale_to_raw(estimates, data.stats);
        const PathwayEffects eff = pathway_effects(raw_coef, 1.0, 0.0);
        rec.est_total_ie = eff.ie1_total + eff.ie2_total + eff.ie12_total;
        rec.sq_error = (rec.est_total_ie - config.target_total_ie) *
                       (rec.est_total_ie - config.target_total_ie);
        rec.selected_kappa = gs.best_kappa;

        Confusion best_conf;
        best_conf.add(truth_ind,
                      path_indicators(gs.best.active_sets, config.p1, config.p2));
        rec.sensitivity = best_conf.tp + best_conf.fn > 0
                              ? static_cast<double>(best_conf.tp) / (best_conf.tp + best_conf.fn)
                              : 1.0;
        rec.specificity = best_conf.tn + best_conf.fp > 0
                              ? static_cast<double>(best_conf.tn) / (best_conf.tn + best_conf.fp)
                              : 1.0;
        rec.mspe = mspe(raw_coef, truth, raw.x);

        for (size_t g = 0; g < n_grid; ++g) {
          if (gs.table[g].failed) continue;
          grid_conf[r][g].add(truth_ind,
                              path_indicators(gs.table[g].active, config.p1, config.p2));
        }
      } catch (const std::exception&) {
        rec.failed = true;
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  const int n_workers = std::max(1, std::min(threads, config.replications));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Aggregate over successful replications.
  int ok = 0;
  for (const auto& rec : report.reps) {
    if (rec.failed) {
      ++report.failures;
      continue;
    }
    ++ok;
    report.mean_total_ie += rec.est_total_ie;
    report.mse += rec.sq_error;
    report.mean_sensitivity += rec.sensitivity;
    report.mean_specificity += rec.specificity;
    report.mean_mspe += rec.mspe;
    report.mean_seconds += rec.seconds;
  }
  if (ok > 0) {
    report.mean_total_ie /= ok;
    report.mse /= ok;
    report.mean_sensitivity /= ok;
    report.mean_specificity /= ok;
    report.mean_mspe /= ok;
    report.mean_seconds /= ok;
  }

  report.roc.resize(n_grid);
  for (size_t g = 0; g < n_grid; ++g) {
    Confusion pooled;
    for (int r = 0; r < config.replications; ++r) {
      pooled.tp += grid_conf[r][g].tp;
      pooled.fp += grid_conf[r][g].fp;
      pooled.fn += grid_conf[r][g].fn;
      pooled.tn += grid_conf[r][g].tn;
    }
    report.roc[g].kappa = plan.kappa_grid[g];
    report.roc[g].tpr =
        pooled.tp + pooled.fn > 0 ? static_cast<double>(pooled.tp) / (pooled.tp + pooled.fn) : 0.0;
    report.roc[g].fpr =
        pooled.fp + pooled.tn > 0 ? static_cast<double>(pooled.fp) / (pooled.fp + pooled.tn) : 0.0;
  }
  return report;
}

}  // namespace medpath
