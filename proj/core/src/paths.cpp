#include "ydeflow/paths.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace ydeflow {

namespace {

// Deterministic normal deviates: explicit Box-Muller on top of mt19937_64 so
// streams are reproducible across standard libraries.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = unit();
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  // Uniform on (0, 1]: the +1 keeps log() finite.
  double unit() {
    return static_cast<double>((rng_() >> 11) + 1) * 0x1p-53;
  }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

bool power_of_two(Eigen::Index m) { return m >= 1 && (m & (m - 1)) == 0; }

// Autocovariance of fBm increments on a grid of spacing dt:
// gamma(k) = dt^{2H} * ( |k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H} ) / 2.
std::vector<double> fgn_covariance(double hurst, Eigen::Index count, double dt) {
  std::vector<double> gamma(static_cast<std::size_t>(count));
  const double scale = std::pow(dt, 2.0 * hurst);
  const double e = 2.0 * hurst;
  for (Eigen::Index k = 0; k < count; ++k) {
    double kk = static_cast<double>(k);
    double v = std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e);
    if (k > 0) v += std::pow(kk - 1.0, e);
    gamma[static_cast<std::size_t>(k)] = 0.5 * scale * v;
  }
  return gamma;
}

void check_fbm_args(double hurst, Eigen::Index n, double horizon) {
  if (!(hurst > 0.5 && hurst < 1.0))
    throw std::invalid_argument("gen_fbm: hurst must lie in (1/2, 1), got " +
                                std::to_string(hurst));
  if (n < 3 || !power_of_two(n - 1))
    throw std::invalid_argument(
        "gen_fbm: node count must be a power of two plus one, got " +
        std::to_string(n));
  if (!(horizon > 0.0))
    throw std::invalid_argument("gen_fbm: horizon must be positive");
}

SampledPath assemble_fbm(const std::vector<double>& fgn, double hurst,
                         Eigen::Index n, double horizon, std::uint64_t seed,
                         const char* method) {
  SampledPath path;
  path.times = uniform_grid(n, horizon);
  path.values.resize(n, 1);
  path.values(0, 0) = 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    acc += fgn[static_cast<std::size_t>(i)];
    path.values(i + 1, 0) = acc;
  }
  path.alpha = hurst - 0.01;  // Holder of every order below hurst, not at it
  path.meta.generator = "fbm";
  path.meta.params = {{"hurst", hurst}, {"horizon", horizon},
                      {"n", static_cast<double>(n)}};
  path.meta.seed = seed;
  path.meta.method = method;
  return path;
}

// Dense route: eigen-factorize the Toeplitz increment covariance.  Used when
// the circulant embedding fails (or is forced from tests); O(N^3).
std::vector<double> fgn_by_covariance(double hurst, Eigen::Index count, double dt,
                                      std::uint64_t seed) {
  const auto gamma = fgn_covariance(hurst, count, dt);
  Eigen::MatrixXd cov(count, count);
  for (Eigen::Index i = 0; i < count; ++i)
    for (Eigen::Index j = 0; j < count; ++j)
      cov(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  NormalStream normal(seed);
  Eigen::VectorXd g(count);
  for (Eigen::Index i = 0; i < count; ++i) g(i) = normal();
  Eigen::VectorXd x = es.eigenvectors() * lam.asDiagonal() * g;
  return {x.data(), x.data() + count};
}

// Circulant embedding: eigenvalues of the 2N-circulant built from the
// increment covariance, via one forward FFT.  Returns false if the embedding
// has a materially negative eigenvalue.
bool fgn_by_circulant(double hurst, Eigen::Index count, double dt,
                      std::uint64_t seed, std::vector<double>* out) {
  const Eigen::Index m = 2 * count;
  const auto gamma = fgn_covariance(hurst, count + 1, dt);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j <= count; ++j)
    buf[static_cast<std::size_t>(j)] = gamma[static_cast<std::size_t>(j)];
  for (Eigen::Index j = count + 1; j < m; ++j)
    buf[static_cast<std::size_t>(j)] = gamma[static_cast<std::size_t>(m - j)];

  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(m), reinterpret_cast<fftw_complex*>(buf.data()),
      reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);

  std::vector<double> lambda(static_cast<std::size_t>(m));
  double max_lambda = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    lambda[static_cast<std::size_t>(j)] = buf[static_cast<std::size_t>(j)].real();
    max_lambda = std::max(max_lambda, lambda[static_cast<std::size_t>(j)]);
  }
  // The embedding routinely has eigenvalues slightly below zero (observed down
  // to about -7e-4 of the largest for H near 0.9); clamping them perturbs the
  // covariance negligibly.  Bail out only on materially negative values.
  double min_lambda = *std::min_element(lambda.begin(), lambda.end());
  if (min_lambda < -1e-3 * max_lambda) {
    fftw_destroy_plan(plan);
    return false;  // embedding not usably PSD; caller falls back
  }

  NormalStream normal(seed);
  const double inv_m = 1.0 / static_cast<double>(m);
  auto eig = [&](Eigen::Index j) {
    return std::max(lambda[static_cast<std::size_t>(j)], 0.0);
  };
  buf[0] = std::sqrt(eig(0) * inv_m) * normal();
  for (Eigen::Index j = 1; j < count; ++j) {
    double s = std::sqrt(0.5 * eig(j) * inv_m);
    double a = normal();
    double b = normal();
    buf[static_cast<std::size_t>(j)] = std::complex<double>(s * a, s * b);
    buf[static_cast<std::size_t>(m - j)] = std::conj(buf[static_cast<std::size_t>(j)]);
  }
  buf[static_cast<std::size_t>(count)] = std::sqrt(eig(count) * inv_m) * normal();

  fftw_execute(plan);  // same in-place forward transform
  fftw_destroy_plan(plan);

  out->resize(static_cast<std::size_t>(count));
  for (Eigen::Index j = 0; j < count; ++j)
    (*out)[static_cast<std::size_t>(j)] = buf[static_cast<std::size_t>(j)].real();
  return true;
}

}  // namespace

Eigen::VectorXd uniform_grid(Eigen::Index n, double horizon) {
  Eigen::VectorXd t(n);
  const double denom = static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < n; ++i)
    t(i) = (static_cast<double>(i) * horizon) / denom;
  return t;
}

SampledPath SampledPath::subsample(Eigen::Index stride) const {
  if (stride < 1 || (nodes() - 1) % stride != 0)
    throw std::invalid_argument("subsample: stride must divide the interval count");
  const Eigen::Index m = (nodes() - 1) / stride + 1;
  SampledPath out;
  out.times.resize(m);
  out.values.resize(m, dim());
  for (Eigen::Index i = 0; i < m; ++i) {
    out.times(i) = times(i * stride);
    out.values.row(i) = values.row(i * stride);
  }
  out.alpha = alpha;
  out.meta = meta;
  return out;
}

SampledPath gen_fbm(double hurst, Eigen::Index n, double horizon,
                    std::uint64_t seed) {
  check_fbm_args(hurst, n, horizon);
  const double dt = horizon / static_cast<double>(n - 1);
  std::vector<double> fgn;
  if (fgn_by_circulant(hurst, n - 1, dt, seed, &fgn))
    return assemble_fbm(fgn, hurst, n, horizon, seed, "circulant");
  fgn = fgn_by_covariance(hurst, n - 1, dt, seed);
  return assemble_fbm(fgn, hurst, n, horizon, seed, "covariance");
}

SampledPath gen_fbm_covariance(double hurst, Eigen::Index n, double horizon,
                               std::uint64_t seed) {
  check_fbm_args(hurst, n, horizon);
  const double dt = horizon / static_cast<double>(n - 1);
  auto fgn = fgn_by_covariance(hurst, n - 1, dt, seed);
  return assemble_fbm(fgn, hurst, n, horizon, seed, "covariance");
}

SampledPath gen_weierstrass(double a, double b, Eigen::Index n, double horizon) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("gen_weierstrass: need 0 < a < 1");
  if (!(b > 1.0))
    throw std::invalid_argument("gen_weierstrass: need b > 1");
  if (n < 2) throw std::invalid_argument("gen_weierstrass: need n >= 2");
  if (!(horizon > 0.0))
    throw std::invalid_argument("gen_weierstrass: horizon must be positive");

  const double exponent = std::log(1.0 / a) / std::log(b);
  if (exponent <= 0.5)
    throw std::invalid_argument(
        "gen_weierstrass: exponent log(1/a)/log(b) = " + std::to_string(exponent) +
        " is outside the Young regime (need > 1/2); a = " + std::to_string(a) +
        ", b = " + std::to_string(b));

  // Truncate once a^k is below machine precision; also stop before b^k loses
  // the phase entirely (b^k above 2^53 has absolute error larger than 2*pi).
  Eigen::Index terms = 0;
  {
    double ak = 1.0, bk = 1.0;
    while (ak >= 1e-16 && bk <= 0x1p53) {
      ++terms;
      ak *= a;
      bk *= b;
    }
  }

  SampledPath path;
  path.times = uniform_grid(n, horizon);
  path.values.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = path.times(i);
    double sum = 0.0, ak = 1.0, bk = 1.0;
    for (Eigen::Index k = 0; k < terms; ++k) {
      sum += ak * std::cos(bk * M_PI * t);
      ak *= a;
      bk *= b;
    }
    path.values(i, 0) = sum;
  }
  path.alpha = std::min(exponent, 1.0);
  path.meta.generator = "weierstrass";
  path.meta.params = {{"a", a}, {"b", b}, {"horizon", horizon},
                      {"n", static_cast<double>(n)},
                      {"terms", static_cast<double>(terms)}};
  return path;
}

SampledPath gen_smooth(SmoothKind kind, const std::vector<double>& coeffs,
                       Eigen::Index n, double horizon) {
  if (n < 2) throw std::invalid_argument("gen_smooth: need n >= 2");
  if (!(horizon > 0.0))
    throw std::invalid_argument("gen_smooth: horizon must be positive");

  SampledPath path;
  path.times = uniform_grid(n, horizon);
  path.values.resize(n, 1);
  path.alpha = 1.0;
  path.meta.generator = "smooth";

  auto coeff = [&](std::size_t i, double fallback) {
    return i < coeffs.size() ? coeffs[i] : fallback;
  };

  switch (kind) {
    case SmoothKind::Linear: {
      double slope = coeff(0, 1.0);
      for (Eigen::Index i = 0; i < n; ++i)
        path.values(i, 0) = slope * path.times(i);
      path.meta.params = {{"slope", slope}, {"horizon", horizon}};
      path.meta.method = "linear";
      break;
    }
    case SmoothKind::Sine: {
      double amp = coeff(0, 1.0);
      double freq = coeff(1, 1.0);
      for (Eigen::Index i = 0; i < n; ++i)
        path.values(i, 0) = amp * std::sin(freq * path.times(i));
      path.meta.params = {{"amp", amp}, {"freq", freq}, {"horizon", horizon}};
      path.meta.method = "sine";
      break;
    }
    case SmoothKind::Polynomial: {
      if (coeffs.empty())
        throw std::invalid_argument("gen_smooth: polynomial needs coefficients");
      for (Eigen::Index i = 0; i < n; ++i) {
        double t = path.times(i);
        double v = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) v = v * t + coeffs[k];
        path.values(i, 0) = v;
      }
      path.meta.params = {{"degree", static_cast<double>(coeffs.size() - 1)},
                          {"horizon", horizon}};
      path.meta.method = "polynomial";
      break;
    }
  }
  return path;
}

HolderEstimate estimate_holder(const SampledPath& path, Eigen::Index min_lag) {
  const Eigen::Index n = path.nodes();
  if (n < 3 || min_lag < 1)
    throw std::invalid_argument("estimate_holder: need n >= 3 and min_lag >= 1");

  Eigen::Index lag = 1;
  while (lag < min_lag) lag *= 2;

  // Regress over at most seven octaves.  The expected max increment at lag h
  // carries a sqrt(log(n/h)) extreme-value factor whose drift biases the
  // slope downward; it is negligible over a short window of small lags but
  // approaches -0.4 near h = n/4, so wide windows underestimate badly.
  const Eigen::Index max_lag = lag << 6;

  std::vector<double> log_h, log_m;
  const double dt = path.horizon() / static_cast<double>(n - 1);
  for (; lag <= std::min(max_lag, (n - 1) / 4); lag *= 2) {
    double max_inc = 0.0;
    for (Eigen::Index i = 0; i + lag < n; ++i) {
      double inc = (path.values.row(i + lag) - path.values.row(i)).norm();
      max_inc = std::max(max_inc, inc);
    }
    if (max_inc <= 0.0) continue;  // flat at this scale
    log_h.push_back(std::log(static_cast<double>(lag) * dt));
    log_m.push_back(std::log(max_inc));
  }

  if (log_h.size() < 2) return {1.0, true};

  // Least-squares slope of log(max increment) against log(scale).
  const auto count = static_cast<double>(log_h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    sx += log_h[i];
    sy += log_m[i];
    sxx += log_h[i] * log_h[i];
    sxy += log_h[i] * log_m[i];
  }
  double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  slope = std::min(slope, 1.0);
  if (slope <= 0.0) slope = std::numeric_limits<double>::min();
  return {slope, false};
}

}  // namespace ydeflow
