#include "ydeflow/linear.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "ydeflow/expm.hpp"

namespace ydeflow {

namespace {

void check_scalar_driver(const SampledPath& z, const char* who) {
  if (z.nodes() < 2)
    throw std::invalid_argument(std::string(who) + ": driver needs two nodes");
  if (z.dim() != 1)
    throw std::invalid_argument(std::string(who) + ": driver must be scalar");
  if (!(z.alpha > 0.5))
    throw std::invalid_argument(
        std::string(who) + ": driver exponent " + std::to_string(z.alpha) +
        " is outside the Young regime (need > 1/2)");
}

bool blocks_ok(const std::vector<const Eigen::MatrixXd*>& blocks, double guard) {
  for (const auto* b : blocks)
    if (!b->allFinite() || b->norm() > guard) return false;
  return true;
}

}  // namespace

LinearSystem::LinearSystem(Eigen::MatrixXd a_in, Eigen::Index k_in)
    : a(std::move(a_in)), k(k_in) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("LinearSystem: matrix must be square");
  if (k < 1 || k >= a.rows())
    throw std::invalid_argument("LinearSystem: need 1 <= k <= n-1, got k = " +
                                std::to_string(k) + " for n = " +
                                std::to_string(a.rows()));
}

MatrixPath fundamental_solution(const Eigen::MatrixXd& a, const SampledPath& z) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("fundamental_solution: matrix must be square");
  check_scalar_driver(z, "fundamental_solution");
  MatrixPath f;
  f.times = z.times;
  f.values.reserve(static_cast<std::size_t>(z.nodes()));
  const double z0 = z.values(0, 0);
  for (Eigen::Index i = 0; i < z.nodes(); ++i)
    f.values.push_back(expm(a * (z.values(i, 0) - z0)));
  return f;
}

Eigen::MatrixXd BlockDecomposition::eta(Eigen::Index i) const {
  const auto& b1 = g1[static_cast<std::size_t>(i)];
  const auto& b2 = g2[static_cast<std::size_t>(i)];
  const Eigen::Index k = b1.rows(), l = b2.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + l, k + l);
  m.topLeftCorner(k, k) = b1;
  m.topRightCorner(k, l) = b2;
  m.bottomRightCorner(l, l).setIdentity();
  return m;
}

Eigen::MatrixXd BlockDecomposition::psi(Eigen::Index i) const {
  const auto& b3 = g3[static_cast<std::size_t>(i)];
  const auto& b4 = g4[static_cast<std::size_t>(i)];
  const Eigen::Index l = b4.rows(), k = b3.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + l, k + l);
  m.topLeftCorner(k, k).setIdentity();
  m.bottomLeftCorner(l, k) = b3;
  m.bottomRightCorner(l, l) = b4;
  return m;
}

BlockDecomposition decompose_blocks(const LinearSystem& sys, const SampledPath& z,
                                    const DecomposeOptions& opts) {
  check_scalar_driver(z, "decompose_blocks");
  const Eigen::Index k = sys.k, l = sys.l();
  const MatrixPath f = fundamental_solution(sys.a, z);

  BlockDecomposition out;
  std::vector<double> kept_times;
  for (Eigen::Index i = 0; i < f.nodes(); ++i) {
    const Eigen::MatrixXd& ft = f.values[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd f4 = ft.bottomRightCorner(l, l);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        f4, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(l - 1);
    if (smin < opts.singular_threshold * std::max(1.0, smax)) {
      out.explosion_index = i;
      break;
    }
    const Eigen::MatrixXd f4_inv =
        svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
        svd.matrixU().transpose();
    const Eigen::MatrixXd g2 = ft.topRightCorner(k, l) * f4_inv;
    out.g2.push_back(g2);
    out.g1.push_back(ft.topLeftCorner(k, k) - g2 * ft.bottomLeftCorner(l, k));
    out.g3.push_back(ft.bottomLeftCorner(l, k));
    out.g4.push_back(f4);
    kept_times.push_back(f.times(i));
  }
  out.times = Eigen::Map<const Eigen::VectorXd>(
      kept_times.data(), static_cast<Eigen::Index>(kept_times.size()));
  return out;
}

BlockDecomposition decompose_via_yde(const LinearSystem& sys, const SampledPath& z,
                                     const DecomposeOptions& opts) {
  check_scalar_driver(z, "decompose_via_yde");
  const Eigen::Index k = sys.k, l = sys.l();
  const Eigen::MatrixXd a1 = sys.a1(), a2 = sys.a2(), a3 = sys.a3(), a4 = sys.a4();

  Eigen::MatrixXd g1 = Eigen::MatrixXd::Identity(k, k);
  Eigen::MatrixXd g2 = Eigen::MatrixXd::Zero(k, l);
  Eigen::MatrixXd g3 = Eigen::MatrixXd::Zero(l, k);
  Eigen::MatrixXd g4 = Eigen::MatrixXd::Identity(l, l);

  BlockDecomposition out;
  std::vector<double> kept_times;
  auto push = [&](Eigen::Index i) {
    out.g1.push_back(g1);
    out.g2.push_back(g2);
    out.g3.push_back(g3);
    out.g4.push_back(g4);
    kept_times.push_back(z.times(i));
  };
  push(0);
  for (Eigen::Index i = 0; i + 1 < z.nodes(); ++i) {
    const double dz = z.values(i + 1, 0) - z.values(i, 0);
    const Eigen::MatrixXd n1 = g1 + (a1 * g1 - g2 * a3 * g1) * dz;
    const Eigen::MatrixXd n2 =
        g2 + (a1 * g2 + a2 - g2 * a4 - g2 * a3 * g2) * dz;
    const Eigen::MatrixXd n3 = g3 + (a3 * g1 + a3 * g2 * g3 + a4 * g3) * dz;
    const Eigen::MatrixXd n4 = g4 + (a3 * g2 * g4 + a4 * g4) * dz;
    g1 = n1;
    g2 = n2;
    g3 = n3;
    g4 = n4;
    if (!blocks_ok({&g1, &g2, &g3, &g4}, opts.blowup_guard)) {
      out.explosion_index = i + 1;
      break;
    }
    push(i + 1);
  }
  out.times = Eigen::Map<const Eigen::VectorXd>(
      kept_times.data(), static_cast<Eigen::Index>(kept_times.size()));
  return out;
}

std::optional<double> detect_explosion(const LinearSystem& sys,
                                       const SampledPath& z, double threshold) {
  check_scalar_driver(z, "detect_explosion");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("detect_explosion: threshold must lie in (0,1)");
  const Eigen::Index l = sys.l();
  const double z0 = z.values(0, 0);

  auto smin_at = [&](double zeta) {
    const Eigen::MatrixXd ft = expm(sys.a * (zeta - z0));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ft.bottomRightCorner(l, l));
    return svd.singularValues()(l - 1);
  };

  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    if (smin_at(z.values(i, 0)) >= threshold) continue;
    if (i == 0) return z.times(0);
    // Bisect in time with Z interpolated linearly between the bracket nodes.
    double lo = z.times(i - 1), hi = z.times(i);
    const double t_lo = lo, node_dt = hi - lo;
    const double zlo = z.values(i - 1, 0), zhi = z.values(i, 0);
    auto zeta = [&](double t) { return zlo + (t - t_lo) / node_dt * (zhi - zlo); };
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (smin_at(zeta(mid)) >= threshold)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::nullopt;
}

SchurFoliation schur_foliation(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("schur_foliation: matrix must be square");
  const Eigen::Index n = a.rows();
  if (n < 2)
    throw std::invalid_argument(
        "schur_foliation: no interior splitting exists for n = 1");

  Eigen::RealSchur<Eigen::MatrixXd> schur(a);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("schur_foliation: factorization failed");
  Eigen::MatrixXd t = schur.matrixT();
  Eigen::MatrixXd p = schur.matrixU();

  // Read the quasi-triangular block structure off the subdiagonal, then make
  // every structural zero exact.
  std::vector<Eigen::Index> boundaries;
  Eigen::Index j = 0;
  while (j < n) {
    const bool pair = j + 1 < n && t(j + 1, j) != 0.0;
    j += pair ? 2 : 1;
    if (j < n) boundaries.push_back(j);
  }
  for (Eigen::Index col = 0; col < n; ++col)
    for (Eigen::Index row = col + 2; row < n; ++row) t(row, col) = 0.0;
  for (Eigen::Index b : boundaries) t(b, b - 1) = 0.0;

  if (boundaries.empty())
    throw std::invalid_argument(
        "schur_foliation: a 2 x 2 system with a complex eigenvalue pair has no "
        "real invariant line; an invariant splitting needs dimension > 2");

  SchurFoliation out;
  out.p = std::move(p);
  out.t = std::move(t);
  out.k = boundaries.front();  // smallest admissible boundary
  return out;
}

}  // namespace ydeflow
