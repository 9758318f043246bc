#include "ydeflow/slope.hpp"

#include <cmath>
#include <stdexcept>

namespace ydeflow {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need two or more paired points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double convergence_slope(const std::vector<double>& mesh,
                         const std::vector<double>& err, double floor,
                         int* used) {
  if (mesh.size() != err.size())
    throw std::invalid_argument("convergence_slope: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (err[i] > floor) {
      lx.push_back(std::log(mesh[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  if (used) *used = static_cast<int>(lx.size());
  if (lx.size() < 2) return 0.0;
  return fit_slope(lx, ly);
}

}  // namespace ydeflow
