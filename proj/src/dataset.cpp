#include "medpath/dataset.hpp"

#include <cmath>

#include "medpath/errors.hpp"

namespace medpath {

void Dataset::check_dims() const {
  const Eigen::Index rows = x.size();
  if (rows < 2) throw DimensionMismatch("need at least 2 rows, got " + std::to_string(rows));
  if (m1.rows() != rows || m2.rows() != rows || y.size() != rows)
    throw DimensionMismatch("row counts differ across x/m1/m2/y blocks");
}

namespace {

// Returns (mean, sd) with divisor n-1; standardizes col in place.
std::pair<double, double> standardize_column(Eigen::Ref<Eigen::VectorXd> col,
                                             const char* block, int index) {
  const double n = static_cast<double>(col.size());
  const double mean = col.mean();
  col.array() -= mean;
  const double sd = std::sqrt(col.squaredNorm() / (n - 1.0));
  if (sd <= 0.0 || !std::isfinite(sd)) throw ConstantColumn(block, index);
  col /= sd;
  return {mean, sd};
}

}  // namespace

Dataset standardize(const Dataset& raw) {
  raw.check_dims();
  Dataset out = raw;

  std::tie(out.stats.x_mean, out.stats.x_sd) = standardize_column(out.x, "x", 0);

  out.stats.m1_mean.resize(out.p1());
  out.stats.m1_sd.resize(out.p1());
  for (Eigen::Index j = 0; j < out.p1(); ++j)
    std::tie(out.stats.m1_mean[j], out.stats.m1_sd[j]) =
        standardize_column(out.m1.col(j), "m1", static_cast<int>(j));

  out.stats.m2_mean.resize(out.p2());
  out.stats.m2_sd.resize(out.p2());
  for (Eigen::Index k = 0; k < out.p2(); ++k)
    std::tie(out.stats.m2_mean[k], out.stats.m2_sd[k]) =
        standardize_column(out.m2.col(k), "m2", static_cast<int>(k));

  std::tie(out.stats.y_mean, out.stats.y_sd) = standardize_column(out.y, "y", 0);

  out.standardized = true;
  return out;
}

}  // namespace medpath
