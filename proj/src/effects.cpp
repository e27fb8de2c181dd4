#include "medpath/effects.hpp"

#include "medpath/errors.hpp"

namespace medpath {

PathwayEffects pathway_effects(const Coefficients& coef, double x, double x_star) {
  if (!coef.all_finite()) throw DimensionMismatch("non-finite coefficients");
  const double contrast = x - x_star;
  PathwayEffects e;
  e.ie1_per_path = contrast * coef.beta.cwiseProduct(coef.theta);
  e.ie2_per_path = contrast * coef.zeta.cwiseProduct(coef.pi);
  e.ie12_per_path =
      contrast * coef.beta.asDiagonal() * coef.lambda * coef.pi.asDiagonal();
  e.ie1_total = e.ie1_per_path.sum();
  e.ie2_total = e.ie2_per_path.sum();
  e.ie12_total = e.ie12_per_path.sum();
  e.de = coef.delta * contrast;
  e.te = e.de + e.ie1_total + e.ie2_total + e.ie12_total;
  return e;
}

PredictedValues predicted_values(const Coefficients& coef, double x) {
  if (!coef.all_finite()) throw DimensionMismatch("non-finite coefficients");
  PredictedValues v;
  v.v1 = x * coef.beta.dot(coef.theta);
  v.v2 = x * coef.zeta.dot(coef.pi);
  v.v3 = x * coef.beta.dot(coef.lambda * coef.pi);
  v.total = v.v1 + v.v2 + v.v3;
  return v;
}

double mspe(const Coefficients& fitted, const Coefficients& truth,
            const Eigen::VectorXd& x_sample) {
  if (fitted.p1() != truth.p1() || fitted.p2() != truth.p2())
    throw DimensionMismatch("fitted/truth dimensions differ");
  // v_total is linear in x, so one slope difference suffices.
  const double slope_diff = predicted_values(fitted, 1.0).total -
                            predicted_values(truth, 1.0).total;
  return slope_diff * slope_diff * x_sample.squaredNorm() /
         static_cast<double>(x_sample.size());
}

}  // namespace medpath
