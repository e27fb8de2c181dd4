#pragma once

#include <string>
#include <vector>

#include "medpath/admm.hpp"
#include "medpath/dataset.hpp"
#include "medpath/effects.hpp"
#include "medpath/model.hpp"
#include "medpath/simulation.hpp"
#include "medpath/tuning.hpp"

namespace medpath::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Numeric CSV with a header row.
struct Csv {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

Csv read_csv(const std::string& path);

/// Assembles an unstandardized Dataset from four CSV files. Column names
/// of the mediator blocks are retained as path labels.
Dataset load_dataset(const std::string& x_path, const std::string& m1_path,
                     const std::string& m2_path, const std::string& y_path);

/// Coefficient block CSVs: beta/theta/zeta/pi/delta in long form, lambda
/// as (j,k,value) triplets with zeros omitted. 17 significant digits.
void write_coefficients(const Coefficients& coef, const std::string& dir,
                        const std::vector<std::string>& m1_names = {},
                        const std::vector<std::string>& m2_names = {});

/// Reads back what write_coefficients produced.
Coefficients load_coefficients(const std::string& dir);

/// JSON summary of a single fit (objective trace, BIC, active-set sizes,
/// effects sorted by |magnitude|).
void write_fit_summary(const FitResult& result, const Dataset& data,
                       const std::string& path, double selected_kappa = 0.0,
                       int warning_count = 0);

void write_effects(const PathwayEffects& effects, const std::string& path,
                   const std::vector<std::string>& m1_names = {},
                   const std::vector<std::string>& m2_names = {});

/// metrics.csv (one row per replication) and roc.csv (one row per grid
/// point) under dir.
void write_experiment(const ExperimentReport& report, const std::string& dir);

/// Reproducibility record written alongside every command's outputs.
void write_manifest(const std::string& command, const std::vector<std::string>& inputs,
                    const std::string& config_json, std::uint64_t seed,
                    const std::string& dir);

}  // namespace medpath::io
