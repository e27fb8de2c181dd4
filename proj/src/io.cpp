#include "medpath/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "medpath/errors.hpp"
#include "medpath/tuning.hpp"

namespace medpath::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, const std::string& file, long row, long col) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw NonNumericCell(file, row, col);
  }
  // trailing garbage counts as non-numeric
  for (size_t i = pos; i < cell.size(); ++i)
    if (!std::isspace(static_cast<unsigned char>(cell[i]))) throw NonNumericCell(file, row, col);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

}  // namespace

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, 0, "cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 0, 0, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Csv csv;
  csv.header = split_line(line);
  const size_t ncol = csv.header.size();
  if (ncol == 0) throw ParseError(path, 1, 1, "empty header row");

  std::vector<std::vector<double>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != ncol)
      throw ParseError(path, lineno, static_cast<long>(cells.size()),
                       "expected " + std::to_string(ncol) + " cells");
    std::vector<double> row(ncol);
    for (size_t c = 0; c < ncol; ++c) row[c] = parse_cell(cells[c], path, lineno, static_cast<long>(c) + 1);
    rows.push_back(std::move(row));
  }
  csv.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncol));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < ncol; ++c)
      csv.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return csv;
}

Dataset load_dataset(const std::string& x_path, const std::string& m1_path,
                     const std::string& m2_path, const std::string& y_path) {
  const Csv xc = read_csv(x_path);
  const Csv m1c = read_csv(m1_path);
  const Csv m2c = read_csv(m2_path);
  const Csv yc = read_csv(y_path);
  if (xc.values.cols() != 1) throw ParseError(x_path, 1, 1, "exposure file must have one column");
  if (yc.values.cols() != 1) throw ParseError(y_path, 1, 1, "outcome file must have one column");
  const Eigen::Index n = xc.values.rows();
  if (m1c.values.rows() != n || m2c.values.rows() != n || yc.values.rows() != n)
    throw RowCountMismatch("row counts differ: x=" + std::to_string(n) +
                           " m1=" + std::to_string(m1c.values.rows()) +
                           " m2=" + std::to_string(m2c.values.rows()) +
                           " y=" + std::to_string(yc.values.rows()));
  Dataset data;
  data.x = xc.values.col(0);
  data.m1 = m1c.values;
  data.m2 = m2c.values;
  data.y = yc.values.col(0);
  data.m1_names = m1c.header;
  data.m2_names = m2c.header;
  return data;
}

namespace {

void write_vector_csv(const std::string& path, const std::string& value_name,
                      const Eigen::VectorXd& v, const std::vector<std::string>& names) {
  auto out = open_out(path);
  out << "index,name," << value_name << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const std::string name =
        static_cast<size_t>(i) < names.size() ? names[static_cast<size_t>(i)] : "";
    out << i << "," << name << "," << fmt(v[i]) << "\n";
  }
}

}  // namespace

void write_coefficients(const Coefficients& coef, const std::string& dir,
                        const std::vector<std::string>& m1_names,
                        const std::vector<std::string>& m2_names) {
  std::filesystem::create_directories(dir);
  write_vector_csv(dir + "/beta.csv", "beta", coef.beta, m1_names);
  write_vector_csv(dir + "/theta.csv", "theta", coef.theta, m1_names);
  write_vector_csv(dir + "/zeta.csv", "zeta", coef.zeta, m2_names);
  write_vector_csv(dir + "/pi.csv", "pi", coef.pi, m2_names);
  {
    auto out = open_out(dir + "/delta.csv");
    out << "delta\n" << fmt(coef.delta) << "\n";
  }
  {
    auto out = open_out(dir + "/lambda.csv");
    out << "j,k,value\n";
    for (Eigen::Index j = 0; j < coef.lambda.rows(); ++j)
      for (Eigen::Index k = 0; k < coef.lambda.cols(); ++k)
        if (coef.lambda(j, k) != 0.0)
          out << j << "," << k << "," << fmt(coef.lambda(j, k)) << "\n";
  }
}

namespace {

// index,name,value rows; the name column is free text.
Eigen::VectorXd read_vector_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, 0, "cannot open file");
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> vals;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 3) throw ParseError(path, lineno, 1, "expected 3 cells");
    vals.push_back(parse_cell(cells[2], path, lineno, 3));
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

Coefficients load_coefficients(const std::string& dir) {
  const Eigen::VectorXd beta = read_vector_csv(dir + "/beta.csv");
  const Eigen::VectorXd zeta = read_vector_csv(dir + "/zeta.csv");
  Coefficients coef = Coefficients::zeros(beta.size(), zeta.size());
  coef.beta = beta;
  coef.theta = read_vector_csv(dir + "/theta.csv");
  coef.zeta = zeta;
  coef.pi = read_vector_csv(dir + "/pi.csv");
  coef.delta = read_csv(dir + "/delta.csv").values(0, 0);

  std::ifstream lam(dir + "/lambda.csv");
  if (!lam) throw ParseError(dir + "/lambda.csv", 0, 0, "cannot open file");
  std::string line;
  std::getline(lam, line);  // header
  long lineno = 1;
  while (std::getline(lam, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 3) throw ParseError(dir + "/lambda.csv", lineno, 1, "expected 3 cells");
    const auto j = static_cast<Eigen::Index>(parse_cell(cells[0], "lambda.csv", lineno, 1));
    const auto k = static_cast<Eigen::Index>(parse_cell(cells[1], "lambda.csv", lineno, 2));
    if (j < 0 || j >= coef.p1() || k < 0 || k >= coef.p2())
      throw ParseError(dir + "/lambda.csv", lineno, 1, "triplet index out of range");
    coef.lambda(j, k) = parse_cell(cells[2], "lambda.csv", lineno, 3);
  }
  return coef;
}

namespace {

nlohmann::json effects_json(const PathwayEffects& effects,
                            const std::vector<std::string>& m1_names,
                            const std::vector<std::string>& m2_names) {
  auto label1 = [&](Eigen::Index j) {
    return static_cast<size_t>(j) < m1_names.size() ? m1_names[static_cast<size_t>(j)]
                                                    : "M1_" + std::to_string(j);
  };
  auto label2 = [&](Eigen::Index k) {
    return static_cast<size_t>(k) < m2_names.size() ? m2_names[static_cast<size_t>(k)]
                                                    : "M2_" + std::to_string(k);
  };
  struct Row {
    std::string path;
    double value;
  };
  std::vector<Row> rows;
  for (Eigen::Index j = 0; j < effects.ie1_per_path.size(); ++j)
    if (effects.ie1_per_path[j] != 0.0) rows.push_back({label1(j), effects.ie1_per_path[j]});
  for (Eigen::Index k = 0; k < effects.ie2_per_path.size(); ++k)
    if (effects.ie2_per_path[k] != 0.0) rows.push_back({label2(k), effects.ie2_per_path[k]});
  for (Eigen::Index j = 0; j < effects.ie12_per_path.rows(); ++j)
    for (Eigen::Index k = 0; k < effects.ie12_per_path.cols(); ++k)
      if (effects.ie12_per_path(j, k) != 0.0)
        rows.push_back({label1(j) + "->" + label2(k), effects.ie12_per_path(j, k)});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::abs(a.value) > std::abs(b.value);
  });

  nlohmann::json paths = nlohmann::json::array();
  for (const auto& row : rows) paths.push_back({{"path", row.path}, {"effect", row.value}});
  return nlohmann::json{{"ie1_total", effects.ie1_total},
                        {"ie2_total", effects.ie2_total},
                        {"ie12_total", effects.ie12_total},
                        {"direct_effect", effects.de},
                        {"total_effect", effects.te},
                        {"paths", paths}};
}

}  // namespace

void write_fit_summary(const FitResult& result, const Dataset& data, const std::string& path,
                       double selected_kappa, int warning_count) {
  nlohmann::json j;
  j["objective_trace"] = result.objective_trace;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["bic"] = bic(result, data);
  j["selected_kappa"] = selected_kappa;
  j["warning_count"] = warning_count + result.lasso_budget_warnings;
  j["active_set_sizes"] = {{"a1", result.active_sets.a1.size()},
                           {"a2", result.active_sets.a2.size()},
                           {"a3", result.active_sets.a3.size()}};
  j["effects"] = effects_json(pathway_effects(result.coef, 1.0, 0.0), data.m1_names,
                              data.m2_names);
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_effects(const PathwayEffects& effects, const std::string& path,
                   const std::vector<std::string>& m1_names,
                   const std::vector<std::string>& m2_names) {
  auto out = open_out(path);
  out << effects_json(effects, m1_names, m2_names).dump(2) << "\n";
}

void write_experiment(const ExperimentReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir + "/metrics.csv");
    out << "replication,total_ie,sq_error,sensitivity,specificity,mspe,seconds,"
           "selected_kappa,failed\n";
    for (size_t r = 0; r < report.reps.size(); ++r) {
      const auto& rec = report.reps[r];
      out << r << "," << fmt(rec.est_total_ie) << "," << fmt(rec.sq_error) << ","
          << fmt(rec.sensitivity) << "," << fmt(rec.specificity) << "," << fmt(rec.mspe)
          << "," << fmt(rec.seconds) << "," << fmt(rec.selected_kappa) << ","
          << (rec.failed ? 1 : 0) << "\n";
    }
  }
  {
    auto out = open_out(dir + "/roc.csv");
    out << "kappa,tpr,fpr\n";
    for (const auto& pt : report.roc)
      out << fmt(pt.kappa) << "," << fmt(pt.tpr) << "," << fmt(pt.fpr) << "\n";
  }
  {
    nlohmann::json j;
    j["mean_total_ie"] = report.mean_total_ie;
    j["mse"] = report.mse;
    j["mean_sensitivity"] = report.mean_sensitivity;
    j["mean_specificity"] = report.mean_specificity;
    j["mean_mspe"] = report.mean_mspe;
    j["mean_seconds"] = report.mean_seconds;
    j["failures"] = report.failures;
    j["replications"] = report.reps.size();
    auto out = open_out(dir + "/summary.json");
    out << j.dump(2) << "\n";
  }
}

void write_manifest(const std::string& command, const std::vector<std::string>& inputs,
                    const std::string& config_json, std::uint64_t seed,
                    const std::string& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["command"] = command;
  j["inputs"] = inputs;
  j["config"] = nlohmann::json::parse(config_json.empty() ? "{}" : config_json);
  j["seed"] = seed;
  j["version"] = kToolVersion;
  auto out = open_out(dir + "/manifest.json");
  out << j.dump(2) << "\n";
}

}  // namespace medpath::io
