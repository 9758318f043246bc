#include "ydeflow/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ydeflow {

namespace {

void check_young_condition(double ya, double za) {
  if (!(ya + za > 1.0))
    throw std::invalid_argument(
        "young_integrate: declared exponents violate the Young condition, "
        "integrand alpha = " + std::to_string(ya) +
        ", driver alpha = " + std::to_string(za) +
        " (need their sum > 1)");
}

IntegrandPath subsample_integrand(const IntegrandPath& y, Eigen::Index stride) {
  if (stride < 1 || (y.nodes() - 1) % stride != 0)
    throw std::invalid_argument(
        "young_refinement_values: stride must divide the interval count");
  IntegrandPath out;
  const Eigen::Index m = (y.nodes() - 1) / stride + 1;
  out.times.resize(m);
  out.values.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    out.times(i) = y.times(i * stride);
    out.values.push_back(y.values[static_cast<std::size_t>(i * stride)]);
  }
  out.alpha = y.alpha;
  return out;
}

}  // namespace

IntegrandPath IntegrandPath::along(
    const SampledPath& x,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& f) {
  IntegrandPath y;
  y.times = x.times;
  y.values.reserve(static_cast<std::size_t>(x.nodes()));
  for (Eigen::Index i = 0; i < x.nodes(); ++i)
    y.values.push_back(f(x.value(i)));
  y.alpha = x.alpha;
  return y;
}

SampledPath young_integrate(const IntegrandPath& y, const SampledPath& z) {
  if (y.nodes() < 2 || z.nodes() < 2)
    throw std::invalid_argument("young_integrate: paths need at least two nodes");
  if (y.cols() != z.dim())
    throw std::invalid_argument(
        "young_integrate: integrand maps R^" + std::to_string(z.dim()) +
        " but has " + std::to_string(y.cols()) + " columns");
  check_young_condition(y.alpha, z.alpha);
  const double slack = 1e-12 * (1.0 + std::abs(z.horizon()));
  if (y.times(0) > z.times(0) + slack)
    throw std::invalid_argument(
        "young_integrate: integrand starts after the driver");

  const Eigen::Index m = y.rows();

  // Merged node walk.  Both paths are extended left-constantly between their
  // own nodes, so an interval of the merged grid picks up a driver increment
  // only when it ends on a driver node, weighted by the most recent
  // integrand value.
  std::vector<double> merged;
  merged.reserve(static_cast<std::size_t>(y.nodes() + z.nodes()));
  {
    Eigen::Index iy = 0, iz = 0;
    while (iy < y.nodes() || iz < z.nodes()) {
      double ty = iy < y.nodes() ? y.times(iy)
                                 : std::numeric_limits<double>::infinity();
      double tz = iz < z.nodes() ? z.times(iz)
                                 : std::numeric_limits<double>::infinity();
      double t = std::min(ty, tz);
      if (t < z.times(0)) {  // integrand nodes before the driver starts
        ++iy;
        continue;
      }
      if (merged.empty() || t > merged.back()) merged.push_back(t);
      if (ty == t) ++iy;
      if (tz == t) ++iz;
    }
  }

  SampledPath integral;
  integral.times = Eigen::Map<const Eigen::VectorXd>(
      merged.data(), static_cast<Eigen::Index>(merged.size()));
  integral.values.setZero(static_cast<Eigen::Index>(merged.size()), m);
  integral.alpha = z.alpha;

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
  Eigen::Index iy = 0, iz = 0;  // last node at or before the interval start
  while (iy + 1 < y.nodes() && y.times(iy + 1) <= merged[0]) ++iy;
  while (iz + 1 < z.nodes() && z.times(iz + 1) <= merged[0]) ++iz;
  for (std::size_t k = 1; k < merged.size(); ++k) {
    double t = merged[k];
    Eigen::Index iy_now = iy, iz_now = iz;
    while (iy_now + 1 < y.nodes() && y.times(iy_now + 1) <= t) ++iy_now;
    while (iz_now + 1 < z.nodes() && z.times(iz_now + 1) <= t) ++iz_now;
    // Left-point rule: the integrand value at the interval start weights the
    // driver increment across the interval.
    acc += y.values[static_cast<std::size_t>(iy)] *
           (z.value(iz_now) - z.value(iz));
    integral.values.row(static_cast<Eigen::Index>(k)) = acc.transpose();
    iy = iy_now;
    iz = iz_now;
  }
  return integral;
}

std::vector<Eigen::VectorXd> young_refinement_values(const IntegrandPath& y,
                                                     const SampledPath& z,
                                                     int levels) {
  if (levels < 1)
    throw std::invalid_argument("young_refinement_values: need levels >= 1");
  std::vector<Eigen::VectorXd> out;
  for (int level = levels - 1; level >= 0; --level) {
    const auto stride = static_cast<Eigen::Index>(1) << level;
    SampledPath zc = z.subsample(stride);
    IntegrandPath yc = subsample_integrand(y, stride);
    SampledPath integral = young_integrate(yc, zc);
    out.push_back(integral.value(integral.nodes() - 1));
  }
  return out;
}

SampledPath integrate_one_form(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& beta,
    const SampledPath& x) {
  return young_integrate(IntegrandPath::along(x, beta), x);
}

double ito_residual(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& df,
    const SampledPath& x) {
  if (x.nodes() < 2)
    throw std::invalid_argument("ito_residual: path needs at least two nodes");
  const Eigen::VectorXd f0 = f(x.value(0));
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f0.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.nodes(); ++i) {
    if (i > 0) acc += df(x.value(i - 1)) * x.increment(i - 1);
    double defect = (f(x.value(i)) - f0 - acc).norm();
    worst = std::max(worst, defect);
  }
  return worst;
}

}  // namespace ydeflow
