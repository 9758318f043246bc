#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ydeflow {

// Metadata carried next to a sampled path; round-trips through the JSON
// sidecar written by the io layer.
struct PathMeta {
  std::string generator;                 // "fbm", "weierstrass", "smooth", ...
  std::map<std::string, double> params;  // generator parameters
  std::optional<std::uint64_t> seed;
  std::string method;  // e.g. "circulant" vs "covariance" for fbm
};

// A path sampled on a uniform grid of [0, T].  Row i of `values` is the
// point z(t_i) in R^d.  `alpha` is the declared Holder exponent of the
// underlying path, used by the Young-condition checks downstream.
struct SampledPath {
  Eigen::VectorXd times;   // strictly increasing, size n >= 2
  Eigen::MatrixXd values;  // n x d
  double alpha = 1.0;
  PathMeta meta;

  Eigen::Index nodes() const { return times.size(); }
  Eigen::Index dim() const { return values.cols(); }
  double horizon() const { return times(times.size() - 1) - times(0); }
  Eigen::VectorXd value(Eigen::Index i) const { return values.row(i).transpose(); }
  Eigen::VectorXd increment(Eigen::Index i) const {
    return (values.row(i + 1) - values.row(i)).transpose();
  }

  // Keeps every stride-th node (stride must divide n-1).  Shared nodes are
  // copied bitwise, so dyadic coarsenings of one sample are nested exactly.
  SampledPath subsample(Eigen::Index stride) const;
};

// Uniform grid helper: t_i = (i * T) / (n - 1).  Evaluating with this exact
// expression makes refined grids reproduce coarse nodes bit-identically.
Eigen::VectorXd uniform_grid(Eigen::Index n, double horizon);

// Fractional Brownian motion on [0, T] with n = 2^m + 1 nodes, B(0) = 0.
// Sampling uses circulant embedding of the increment covariance; if the
// embedding is not positive semidefinite it falls back to a dense
// factorization of the covariance (meta.method records which one ran).
// The declared exponent is hurst - 0.01: the true paths are Holder of every
// order below hurst but not of order hurst itself.
// Requires hurst in (1/2, 1) so the result is a usable Young driver.
SampledPath gen_fbm(double hurst, Eigen::Index n, double horizon, std::uint64_t seed);

// For tests of the fallback: force the dense-covariance route.
SampledPath gen_fbm_covariance(double hurst, Eigen::Index n, double horizon,
                               std::uint64_t seed);

// Weierstrass function W(t) = sum_k a^k cos(b^k pi t), 0 < a < 1 < b.
// The series is truncated once a^k drops below machine precision.  The
// declared exponent is log(1/a)/log(b), clamped to 1 from above; parameter
// pairs with exponent <= 1/2 are rejected (not a Young driver).
SampledPath gen_weierstrass(double a, double b, Eigen::Index n, double horizon);

enum class SmoothKind { Linear, Sine, Polynomial };

// Smooth scalar drivers, declared exponent 1:
//   Linear:      slope * t                (coeffs = {slope})
//   Sine:        amp * sin(freq * t)      (coeffs = {amp, freq})
//   Polynomial:  sum_k coeffs[k] * t^k
SampledPath gen_smooth(SmoothKind kind, const std::vector<double>& coeffs,
                       Eigen::Index n, double horizon);

struct HolderEstimate {
  double alpha = 1.0;    // clamped to (0, 1]
  bool degenerate = false;  // constant path: no increments to regress on
};

// Regression estimate of the Holder exponent: slope of log(max increment at
// lag 2^j) against log(lag) over dyadic lags with 2^j >= min_lag, using all
// overlapping windows at each lag.  Lags above (n-1)/4 are ignored so each
// scale has enough windows to populate the maximum.
HolderEstimate estimate_holder(const SampledPath& path, Eigen::Index min_lag = 1);

}  // namespace ydeflow
