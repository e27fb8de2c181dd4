// Command-line front end: fit / tune / effects / simulate.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medpath/admm.hpp"
#include "medpath/effects.hpp"
#include "medpath/io.hpp"
#include "medpath/simulation.hpp"
#include "medpath/tuning.hpp"

namespace {

using namespace medpath;

std::set<Penalty> parse_mask(const std::string& mask) {
  std::set<Penalty> out;
  if (mask.find("P1") != std::string::npos) out.insert(Penalty::P1);
  if (mask.find("P2") != std::string::npos) out.insert(Penalty::P2);
  if (mask.find("P3") != std::string::npos) out.insert(Penalty::P3);
  if (out.empty()) throw CLI::ValidationError("--mask must name at least one of P1, P2, P3");
  return out;
}

struct DataArgs {
  std::string x_path, m1_path, m2_path, y_path;
  void attach(CLI::App* cmd) {
    cmd->add_option("--x", x_path, "exposure CSV (one column)")->required();
    cmd->add_option("--m1", m1_path, "modality-1 mediator CSV")->required();
    cmd->add_option("--m2", m2_path, "modality-2 mediator CSV")->required();
    cmd->add_option("--y", y_path, "outcome CSV (one column)")->required();
  }
};

struct FitArgs {
  double rho = 1.0;
  int max_iters = 5000;
  double rel_tol = 1e-6;
  double inner_lasso_tol = 1e-8;
  void attach(CLI::App* cmd) {
    cmd->add_option("--rho", rho, "augmented Lagrangian parameter");
    cmd->add_option("--max-iters", max_iters, "iteration cap");
    cmd->add_option("--rel-tol", rel_tol, "relative objective tolerance");
    cmd->add_option("--lasso-tol", inner_lasso_tol, "inner lasso tolerance");
  }
  FitOptions options() const {
    FitOptions opts;
    opts.rho = rho;
    opts.max_iters = max_iters;
    opts.rel_tol = rel_tol;
    opts.inner_lasso_tol = inner_lasso_tol;
    return opts;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse multimodal mediation pathway solver"};
  app.set_config("--config", "", "TOML/INI config file; flags override");
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit one penalty configuration");
  DataArgs fit_data;
  fit_data.attach(fit_cmd);
  FitArgs fit_opts;
  fit_opts.attach(fit_cmd);
  double kappa = 0.1, ratio = 0.1;
  std::string mask = "P1P2P3";
  std::string out_dir = "out";
  fit_cmd->add_option("--kappa", kappa, "shared penalty weight");
  fit_cmd->add_option("--ratio", ratio, "mu / kappa ratio");
  fit_cmd->add_option("--mask", mask, "penalty combination, e.g. P1P2P3, P2P3, P1P3");
  fit_cmd->add_option("--out", out_dir, "output directory");

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "BIC grid search over kappa");
  DataArgs tune_data;
  tune_data.attach(tune_cmd);
  FitArgs tune_opts;
  tune_opts.attach(tune_cmd);
  double tune_ratio = 0.1;
  std::string tune_mask = "P1P2P3";
  std::string tune_out = "out";
  int grid_points = 30;
  std::vector<double> explicit_grid;
  tune_cmd->add_option("--ratio", tune_ratio, "mu / kappa ratio");
  tune_cmd->add_option("--mask", tune_mask, "penalty combination");
  tune_cmd->add_option("--grid-points", grid_points, "size of the automatic kappa grid");
  tune_cmd->add_option("--kappa-grid", explicit_grid, "explicit increasing kappa grid");
  tune_cmd->add_option("--out", tune_out, "output directory");
  bool tune_refit = false;
  tune_cmd->add_flag("--refit", tune_refit,
                     "report an unpenalized refit on the selected support");

  // effects
  auto* eff_cmd = app.add_subcommand("effects", "pathway effects from saved coefficients");
  std::string coef_dir, eff_out = "out";
  double x_val = 1.0, x_star = 0.0;
  eff_cmd->add_option("--coef", coef_dir, "directory holding coefficient CSVs")->required();
  eff_cmd->add_option("--x-val", x_val, "exposure level x");
  eff_cmd->add_option("--x-star", x_star, "reference exposure level x*");
  eff_cmd->add_option("--out", eff_out, "output directory");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "replicated benchmark experiment");
  FitArgs sim_fit;
  sim_fit.attach(sim_cmd);
  SimConfig sim;
  std::string sim_mask = "P1P2P3";
  double sim_ratio = 0.1;
  int sim_grid_points = 20;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::string sim_out = "out";
  std::string exposure = "gaussian";
  sim_cmd->add_option("--n", sim.n, "sample size");
  sim_cmd->add_option("--p1", sim.p1, "modality-1 dimension");
  sim_cmd->add_option("--p2", sim.p2, "modality-2 dimension");
  sim_cmd->add_option("--sparsity", sim.sparsity, "fraction of nonzero paths");
  sim_cmd->add_option("--target-ie", sim.target_total_ie, "truth total indirect effect");
  sim_cmd->add_option("--noise-m1", sim.noise_m1, "m1 error sd");
  sim_cmd->add_option("--noise-m2", sim.noise_m2, "m2 error sd");
  sim_cmd->add_option("--noise-y", sim.noise_y, "outcome error sd");
  sim_cmd->add_option("--exposure", exposure, "gaussian or bernoulli");
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--replications", sim.replications, "number of replications");
  sim_cmd->add_option("--ratio", sim_ratio, "mu / kappa ratio");
  sim_cmd->add_option("--mask", sim_mask, "penalty combination");
  sim_cmd->add_option("--grid-points", sim_grid_points, "size of the kappa grid");
  sim_cmd->add_option("--threads", threads, "worker threads for replications");
  sim_cmd->add_option("--out", sim_out, "output directory");
  bool no_refit = false;
  sim_cmd->add_flag("--no-refit", no_refit, "report shrunk penalized estimates instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) {
      const Dataset raw = medpath::io::load_dataset(fit_data.x_path, fit_data.m1_path,
                                                    fit_data.m2_path, fit_data.y_path);
      const Dataset data = standardize(raw);
      PenaltyConfig cfg = PenaltyConfig::shared(kappa, ratio, parse_mask(mask));
      const FitResult result = fit(data, cfg, fit_opts.options());
      medpath::io::write_coefficients(result.coef, out_dir, data.m1_names, data.m2_names);
      medpath::io::write_fit_summary(result, data, out_dir + "/summary.json", kappa);
      nlohmann::json cfg_json{{"kappa", kappa}, {"ratio", ratio}, {"mask", mask},
                              {"rho", fit_opts.rho}, {"max_iters", fit_opts.max_iters},
                              {"rel_tol", fit_opts.rel_tol}};
      medpath::io::write_manifest("fit",
                                  {fit_data.x_path, fit_data.m1_path, fit_data.m2_path,
                                   fit_data.y_path},
                                  cfg_json.dump(), 0, out_dir);
    } else if (tune_cmd->parsed()) {
      const Dataset raw = medpath::io::load_dataset(tune_data.x_path, tune_data.m1_path,
                                                    tune_data.m2_path, tune_data.y_path);
      const Dataset data = standardize(raw);
      TuningPlan plan;
      plan.ratio = tune_ratio;
      plan.mask = parse_mask(tune_mask);
      plan.kappa_grid = explicit_grid.empty()
                            ? default_grid(data, plan, tune_opts.options(), grid_points)
                            : explicit_grid;
      const GridSearchResult gs = grid_search(data, plan, tune_opts.options());
      const Coefficients reported =
          tune_refit ? refit_support(data, path_restricted(gs.best.coef)) : gs.best.coef;
      medpath::io::write_coefficients(reported, tune_out, data.m1_names, data.m2_names);
      medpath::io::write_fit_summary(gs.best, data, tune_out + "/summary.json", gs.best_kappa);
      {
        std::ofstream out(tune_out + "/grid.csv");
        out << "kappa,bic,loss,active_total,iterations,converged,failed\n";
        for (const auto& rec : gs.table)
          out << rec.kappa << "," << rec.bic << "," << rec.loss << "," << rec.active_total
              << "," << rec.iterations << "," << rec.converged << "," << rec.failed << "\n";
      }
      nlohmann::json cfg_json{{"ratio", tune_ratio}, {"mask", tune_mask},
                              {"grid", plan.kappa_grid}, {"selected_kappa", gs.best_kappa}};
      medpath::io::write_manifest("tune",
                                  {tune_data.x_path, tune_data.m1_path, tune_data.m2_path,
                                   tune_data.y_path},
                                  cfg_json.dump(), 0, tune_out);
    } else if (eff_cmd->parsed()) {
      const Coefficients coef = medpath::io::load_coefficients(coef_dir);
      const PathwayEffects effects = pathway_effects(coef, x_val, x_star);
      std::filesystem::create_directories(eff_out);
      medpath::io::write_effects(effects, eff_out + "/effects.json");
      nlohmann::json cfg_json{{"x", x_val}, {"x_star", x_star}};
      medpath::io::write_manifest("effects", {coef_dir}, cfg_json.dump(), 0, eff_out);
    } else if (sim_cmd->parsed()) {
      sim.exposure = exposure == "bernoulli" ? ExposureKind::Bernoulli : ExposureKind::Gaussian;
      sim.refit_estimates = !no_refit;
      TuningPlan plan;
      plan.ratio = sim_ratio;
      plan.mask = parse_mask(sim_mask);
      // Fix the grid from a pilot replication so ROC points line up.
      const Coefficients truth = default_truth(sim);
      const Dataset pilot = standardize(generate(sim, truth, derive_seed(sim.seed, 0)));
      plan.kappa_grid = default_grid(pilot, plan, sim_fit.options(), sim_grid_points);
      const ExperimentReport report = run_experiment(sim, plan, sim_fit.options(), threads);
      medpath::io::write_experiment(report, sim_out);
      nlohmann::json cfg_json{{"n", sim.n}, {"p1", sim.p1}, {"p2", sim.p2},
                              {"sparsity", sim.sparsity}, {"target_ie", sim.target_total_ie},
                              {"ratio", sim_ratio}, {"mask", sim_mask},
                              {"replications", sim.replications},
                              {"grid", plan.kappa_grid}, {"exposure", exposure}};
      medpath::io::write_manifest("simulate", {}, cfg_json.dump(), sim.seed, sim_out);
      if (report.failures > 0)
        std::cerr << "warning: " << report.failures << " replications failed\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
