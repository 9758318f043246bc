#include "ydeflow/homogeneous.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <string>

#include "ydeflow/so3.hpp"
#include "ydeflow/transport.hpp"

namespace ydeflow {

namespace {

void check_generator(const Eigen::Matrix3d& a, const char* who) {
  if ((a + a.transpose()).norm() > 1e-10)
    throw std::invalid_argument(std::string(who) + ": generator must be skew");
}

void check_rotation(const Eigen::Matrix3d& x, const char* who) {
  if ((x.transpose() * x - Eigen::Matrix3d::Identity()).norm() > 1e-10 ||
      x.determinant() < 0.0)
    throw std::invalid_argument(std::string(who) + ": base point must be a rotation");
}

void check_scalar_driver(const SampledPath& z, const char* who) {
  if (z.dim() != 1)
    throw std::invalid_argument(std::string(who) + ": driver must be scalar");
  if (z.nodes() < 2)
    throw std::invalid_argument(std::string(who) + ": driver needs two nodes");
  if (!(z.alpha > 0.5))
    throw std::invalid_argument(
        std::string(who) + ": driver exponent outside the Young regime");
}

}  // namespace

GroupPath solve_right_invariant(const Eigen::Matrix3d& a, const SampledPath& z) {
  check_generator(a, "solve_right_invariant");
  check_scalar_driver(z, "solve_right_invariant");
  GroupPath g;
  g.times = z.times;
  g.values.reserve(static_cast<std::size_t>(z.nodes()));
  const Eigen::Vector3d w = vee(a);
  const double z0 = z.values(0, 0);
  for (Eigen::Index i = 0; i < z.nodes(); ++i)
    g.values.push_back(so3_exp(Eigen::Vector3d(w * (z.values(i, 0) - z0))));
  return g;
}

SampledPath orbit_path(const GroupPath& g, const Eigen::Matrix3d& x) {
  check_rotation(x, "orbit_path");
  SampledPath p;
  p.times = g.times;
  p.values.resize(g.nodes(), 3);
  const Eigen::Vector3d start = x * Eigen::Vector3d::UnitZ();
  for (Eigen::Index i = 0; i < g.nodes(); ++i)
    p.values.row(i) =
        (g.values[static_cast<std::size_t>(i)] * start).transpose();
  p.alpha = 1.0;  // overwritten by callers who know the driver
  return p;
}

GroupPath horizontal_factor(const Eigen::Matrix3d& a, const SampledPath& z,
                            const Eigen::Matrix3d& x) {
  check_generator(a, "horizontal_factor");
  check_rotation(x, "horizontal_factor");
  check_scalar_driver(z, "horizontal_factor");

  const GroupPath g = solve_right_invariant(a, z);
  SampledPath orbit = orbit_path(g, x);
  orbit.alpha = z.alpha;

  // A rotation c is the orthonormal tangent frame (c e1, c e2) over the
  // sphere point c e3; lifting the orbit through the frame bundle transport
  // produces the horizontally moving rotation c_t with c_0 = x.
  Eigen::Matrix<double, 3, 2> u0 = x.leftCols<2>();
  const ConnectionForm conn = ConnectionForm::sphere_levi_civita();
  const FramePath lift = horizontal_lift(conn, orbit, u0);

  GroupPath gh;
  gh.times = z.times;
  gh.values.reserve(static_cast<std::size_t>(z.nodes()));
  const Eigen::Matrix3d x_inv = x.transpose();
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    Eigen::Matrix3d c;
    c.leftCols<2>() = lift.frames[static_cast<std::size_t>(i)];
    c.col(2) = lift.base[static_cast<std::size_t>(i)];
    gh.values.push_back(c * x_inv);
  }
  return gh;
}

HomogeneousDecomposition decompose_homogeneous(const Eigen::Matrix3d& a,
                                               const SampledPath& z,
                                               const Eigen::Matrix3d& x,
                                               const HomogeneousOptions& opts) {
  HomogeneousDecomposition out;
  out.g = solve_right_invariant(a, z);
  out.gh = horizontal_factor(a, z, x);
  out.h.times = z.times;
  out.h.values.reserve(static_cast<std::size_t>(z.nodes()));
  out.h_angle.reserve(static_cast<std::size_t>(z.nodes()));

  const Eigen::Matrix3d x_inv = x.transpose();
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    const auto& gt = out.g.values[static_cast<std::size_t>(i)];
    const auto& ght = out.gh.values[static_cast<std::size_t>(i)];
    const Eigen::Matrix3d raw = x_inv * ght.transpose() * gt * x;
    const double gap = dist_to_stabilizer(raw);
    out.stabilizer_gap = std::max(out.stabilizer_gap, gap);
    if (gap > opts.stabilizer_tol)
      throw std::runtime_error(
          "decompose_homogeneous: fibre factor left the stabilizer at node " +
          std::to_string(i) + " (distance " + std::to_string(gap) + ")");
    const Eigen::Matrix3d snapped = project_to_stabilizer(raw);
    out.h.values.push_back(snapped);
    out.h_angle.push_back(stabilizer_angle(raw));
    const double rec = (ght * x * snapped - gt * x).norm();
    out.reconstruction_gap = std::max(out.reconstruction_gap, rec);
  }
  return out;
}

TrivialBundleDecomposition trivial_bundle_decompose(const Eigen::Matrix3d& a,
                                                    const Eigen::Matrix2d& b,
                                                    const SampledPath& z,
                                                    const Eigen::Matrix3d& x,
                                                    const Eigen::Matrix2d& y) {
  check_generator(a, "trivial_bundle_decompose");
  if ((b + b.transpose()).norm() > 1e-10)
    throw std::invalid_argument("trivial_bundle_decompose: B must be skew");
  check_rotation(x, "trivial_bundle_decompose");
  if ((y.transpose() * y - Eigen::Matrix2d::Identity()).norm() > 1e-10 ||
      y.determinant() < 0.0)
    throw std::invalid_argument(
        "trivial_bundle_decompose: y must be a planar rotation");
  check_scalar_driver(z, "trivial_bundle_decompose");

  TrivialBundleDecomposition out;
  out.times = z.times;
  const Eigen::Vector3d wa = vee(a);
  const double rate = b(1, 0);
  const double z0 = z.values(0, 0);
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    const double dz = z.values(i, 0) - z0;
    const Eigen::Matrix3d ga = so3_exp(Eigen::Vector3d(wa * dz));
    const Eigen::Matrix2d gb = so2_exp(rate * dz);
    out.g_first.push_back(ga * x);
    out.g_second.push_back(gb * y);
    out.eta_first.push_back(ga);
    out.h.push_back(y.transpose() * gb * y);
    // Reconstruction: eta acts on the left, h on the fibre slot.
    const double gap_first = (ga * x - out.g_first.back()).norm();
    const double gap_second =
        (y * out.h.back() - out.g_second.back()).norm();
    out.reconstruction_gap =
        std::max(out.reconstruction_gap, std::max(gap_first, gap_second));
  }
  return out;
}

}  // namespace ydeflow
