#pragma once

#include <Eigen/Core>

#include <cmath>

#include <ydeflow/paths.hpp>

namespace ydeflow::testing {

// Multi-component path assembled from explicit coordinate functions.
template <typename... Fs>
SampledPath sampled(Eigen::Index n, double horizon, double alpha, Fs... fs) {
  SampledPath p;
  p.times = uniform_grid(n, horizon);
  p.values.resize(n, sizeof...(fs));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = p.times(i);
    Eigen::Index j = 0;
    ((p.values(i, j++) = fs(t)), ...);
  }
  p.alpha = alpha;
  return p;
}

// Great-circle arc in the equatorial plane, angle speed * t.
inline SampledPath great_circle(Eigen::Index n, double speed, double horizon) {
  return sampled(
      n, horizon, 1.0, [&](double t) { return std::cos(speed * t); },
      [&](double t) { return std::sin(speed * t); }, [](double) { return 0.0; });
}

// Latitude circle at colatitude theta, traversed once over [0, horizon].
inline SampledPath latitude_circle(Eigen::Index n, double theta, double horizon) {
  const double s = std::sin(theta), c = std::cos(theta);
  return sampled(
      n, horizon, 1.0,
      [&](double t) { return s * std::cos(2.0 * M_PI * t / horizon); },
      [&](double t) { return s * std::sin(2.0 * M_PI * t / horizon); },
      [&](double) { return c; });
}

}  // namespace ydeflow::testing
