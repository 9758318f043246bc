#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "ydeflow/paths.hpp"

namespace ydeflow {

// A path of linear maps R^d -> R^m sampled on a grid: the integrand of a
// Young integral against a d-dimensional driver.  values[i] is m x d.
struct IntegrandPath {
  Eigen::VectorXd times;
  std::vector<Eigen::MatrixXd> values;
  double alpha = 1.0;

  Eigen::Index nodes() const { return times.size(); }
  Eigen::Index rows() const { return values.empty() ? 0 : values.front().rows(); }
  Eigen::Index cols() const { return values.empty() ? 0 : values.front().cols(); }

  // Sample a pointwise-smooth integrand along a path: node i carries f(x_i).
  // Composition with a smooth map preserves the Holder exponent, so the
  // declared alpha is inherited from x.
  static IntegrandPath along(
      const SampledPath& x,
      const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& f);
};

// Left-point Riemann-Stieltjes sum of Y against Z.  Node sets are merged;
// between its own nodes the integrand is extended as a left-constant, and so
// is the driver, so only driver nodes contribute increments.  Requires the
// Young condition Y.alpha + Z.alpha > 1 on the declared exponents.  The
// result lives on the merged grid and inherits the driver's exponent.
SampledPath young_integrate(const IntegrandPath& y, const SampledPath& z);

// Same sum evaluated on dyadically coarsened copies of both inputs
// (stride 2^(levels-1), ..., 2, 1); entry j holds the final value of level j,
// coarsest first.  Lets callers check the Cauchy-in-refinement behaviour.
std::vector<Eigen::VectorXd> young_refinement_values(const IntegrandPath& y,
                                                     const SampledPath& z,
                                                     int levels = 3);

// Integral of a one-form along x: beta(x) is a row-convention matrix (each
// row one output component), evaluated at the path's own nodes and
// integrated against dx.
SampledPath integrate_one_form(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& beta,
    const SampledPath& x);

// Defect of the chain rule along x for a map F with differential dF:
// max over grid nodes of | F(x_t) - F(x_0) - int_0^t dF(x_s) dx_s |.
// For affine F the left sums telescope and the defect is pure roundoff.
double ito_residual(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& df,
    const SampledPath& x);

}  // namespace ydeflow
