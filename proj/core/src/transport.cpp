#include "ydeflow/transport.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ydeflow {

namespace {

using Frame = Eigen::Matrix<double, 3, 2>;

void check_sphere_path(const SampledPath& x, const char* who) {
  if (x.dim() != 3)
    throw std::invalid_argument(std::string(who) + ": path must live in R^3");
  if (x.nodes() < 2)
    throw std::invalid_argument(std::string(who) + ": path needs two nodes");
  for (Eigen::Index i = 0; i < x.nodes(); ++i) {
    if (std::abs(x.values.row(i).norm() - 1.0) > 1e-6)
      throw std::invalid_argument(std::string(who) + ": node " +
                                  std::to_string(i) + " is off the unit sphere");
  }
}

void check_frame(const Eigen::Vector3d& x, const Frame& u, double tol,
                 const char* who) {
  const Eigen::Matrix2d gram = u.transpose() * u;
  if ((gram - Eigen::Matrix2d::Identity()).norm() > tol)
    throw std::invalid_argument(std::string(who) + ": frame is not orthonormal");
  if ((x.transpose() * u).norm() > tol)
    throw std::invalid_argument(std::string(who) + ": frame is not tangent");
}

// Inverse symmetric square root of a 2 x 2 SPD matrix; the smallest
// eigenvalue is reported through *lambda_min.
Eigen::Matrix2d inv_sqrt(const Eigen::Matrix2d& s, double* lambda_min) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
  *lambda_min = es.eigenvalues()(0);
  if (*lambda_min <= 0.0) return Eigen::Matrix2d::Zero();
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

// One transport step: project the frame onto the tangent plane at the new
// base point, then restore orthonormality with the symmetric factor.  The
// step is equivariant under right rotations of the frame, and u^T u_next is
// symmetric, so the discrete increments are exactly horizontal.
Frame transport_step(const Frame& u, const Eigen::Vector3d& next,
                     double degenerate_tol, Eigen::Index node) {
  const Frame projected = u - next * (next.transpose() * u);
  double lambda_min = 0.0;
  const Eigen::Matrix2d fix =
      inv_sqrt(projected.transpose() * projected, &lambda_min);
  if (lambda_min < degenerate_tol * degenerate_tol)
    throw std::runtime_error(
        "transport: frame degenerated at node " + std::to_string(node) +
        " (base step too large for the tangent projection)");
  return projected * fix;
}

Frame default_frame(const Eigen::Vector3d& x) {
  int k = 0;
  x.cwiseAbs().minCoeff(&k);
  Eigen::Vector3d a = Eigen::Vector3d::Unit(k);
  a -= x.dot(a) * x;
  a.normalize();
  Frame u;
  u.col(0) = a;
  u.col(1) = x.cross(a);
  return u;
}

}  // namespace

ConnectionForm ConnectionForm::sphere_levi_civita() {
  return ConnectionForm(Kind::SphereFrameBundle);
}

ConnectionForm ConnectionForm::trivial_product() {
  return ConnectionForm(Kind::TrivialProduct);
}

Eigen::Matrix2d ConnectionForm::value(const Eigen::Vector3d& /*x*/,
                                      const Frame& u, const Eigen::Vector3d& /*v*/,
                                      const Frame& w) const {
  if (kind_ != Kind::SphereFrameBundle)
    throw std::logic_error("ConnectionForm: wrong evaluation overload");
  const Eigen::Matrix2d m = u.transpose() * w;
  return 0.5 * (m - m.transpose());
}

Eigen::Matrix2d ConnectionForm::value(const Eigen::Matrix2d& h,
                                      const Eigen::Matrix2d& dh) const {
  if (kind_ != Kind::TrivialProduct)
    throw std::logic_error("ConnectionForm: wrong evaluation overload");
  return h.transpose() * dh;  // h^{-1} dh for a rotation
}

FramePath horizontal_lift(const ConnectionForm& conn, const SampledPath& x,
                          const Frame& u0, const TransportOptions& opts) {
  if (conn.kind() != ConnectionForm::Kind::SphereFrameBundle)
    throw std::invalid_argument("horizontal_lift: sphere-frame connection required");
  check_sphere_path(x, "horizontal_lift");
  Eigen::Vector3d base0 = x.value(0);
  base0.normalize();
  check_frame(base0, u0, opts.frame_tol, "horizontal_lift");

  FramePath out;
  out.times = x.times;
  out.base.reserve(static_cast<std::size_t>(x.nodes()));
  out.frames.reserve(static_cast<std::size_t>(x.nodes()));
  out.base.push_back(base0);
  out.frames.push_back(u0);
  for (Eigen::Index i = 1; i < x.nodes(); ++i) {
    Eigen::Vector3d next = x.value(i);
    next.normalize();
    out.frames.push_back(
        transport_step(out.frames.back(), next, opts.degenerate_tol, i));
    out.base.push_back(next);
  }
  return out;
}

Eigen::Matrix2d horizontality_residual(const ConnectionForm& conn,
                                       const FramePath& path) {
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i + 1 < path.frames.size(); ++i) {
    const Eigen::Vector3d dx = path.base[i + 1] - path.base[i];
    const Frame du = path.frames[i + 1] - path.frames[i];
    acc += conn.value(path.base[i], path.frames[i], dx, du);
  }
  return acc;
}

Eigen::Vector3d parallel_transport(const ConnectionForm& conn,
                                   const SampledPath& x, const Eigen::Vector3d& v,
                                   const TransportOptions& opts) {
  Eigen::Vector3d base0 = x.value(0);
  base0.normalize();
  if (std::abs(base0.dot(v)) > opts.frame_tol * (1.0 + v.norm()))
    throw std::invalid_argument(
        "parallel_transport: vector is not tangent at the start");
  const FramePath lift = horizontal_lift(conn, x, default_frame(base0), opts);
  const Eigen::Vector2d coords = lift.frames.front().transpose() * v;
  return lift.frames.back() * coords;
}

double holonomy_angle(const ConnectionForm& conn, const SampledPath& x,
                      const TransportOptions& opts) {
  if ((x.value(0) - x.value(x.nodes() - 1)).norm() > 1e-8)
    throw std::invalid_argument("holonomy_angle: path is not a closed loop");
  Eigen::Vector3d base0 = x.value(0);
  base0.normalize();
  const FramePath lift = horizontal_lift(conn, x, default_frame(base0), opts);
  const Eigen::Matrix2d h =
      lift.frames.front().transpose() * lift.frames.back();
  return std::atan2(h(1, 0) - h(0, 1), h(0, 0) + h(1, 1));
}

std::vector<Eigen::Vector3d> covariant_derivative(
    const ConnectionForm& conn,
    const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field,
    const SampledPath& x, const TransportOptions& opts) {
  Eigen::Vector3d base0 = x.value(0);
  base0.normalize();
  const FramePath lift = horizontal_lift(conn, x, default_frame(base0), opts);
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<std::size_t>(x.nodes()));
  std::vector<Eigen::Vector2d> coords;
  coords.reserve(static_cast<std::size_t>(x.nodes()));
  for (Eigen::Index i = 0; i < x.nodes(); ++i)
    coords.push_back(lift.frames[static_cast<std::size_t>(i)].transpose() *
                     field(lift.base[static_cast<std::size_t>(i)]));
  for (Eigen::Index i = 0; i + 1 < x.nodes(); ++i)
    out.push_back(lift.frames[static_cast<std::size_t>(i)] *
                  (coords[static_cast<std::size_t>(i + 1)] -
                   coords[static_cast<std::size_t>(i)]));
  out.emplace_back(Eigen::Vector3d::Zero());
  return out;
}

SampledPath develop(const ConnectionForm& conn, const SampledPath& w,
                    const Eigen::Vector3d& p0, const Frame& u0,
                    const TransportOptions& opts) {
  if (conn.kind() != ConnectionForm::Kind::SphereFrameBundle)
    throw std::invalid_argument("develop: sphere-frame connection required");
  if (w.dim() != 2)
    throw std::invalid_argument("develop: plane path must live in R^2");
  if (w.nodes() < 2)
    throw std::invalid_argument("develop: plane path needs two nodes");
  if (std::abs(p0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("develop: start point is off the unit sphere");
  check_frame(p0, u0, opts.frame_tol, "develop");

  SampledPath out;
  out.times = w.times;
  out.values.resize(w.nodes(), 3);
  out.alpha = w.alpha;
  Eigen::Vector3d xt = p0;
  Frame ut = u0;
  out.values.row(0) = xt.transpose();
  for (Eigen::Index i = 0; i + 1 < w.nodes(); ++i) {
    Eigen::Vector3d moved = xt + ut * w.increment(i);
    moved.normalize();
    ut = transport_step(ut, moved, opts.degenerate_tol, i + 1);
    xt = moved;
    out.values.row(i + 1) = xt.transpose();
  }
  return out;
}

SampledPath antidevelop(const ConnectionForm& conn, const SampledPath& x,
                        const Frame& u0, const TransportOptions& opts) {
  const FramePath lift = horizontal_lift(conn, x, u0, opts);
  SampledPath out;
  out.times = x.times;
  out.values.resize(x.nodes(), 2);
  out.alpha = x.alpha;
  out.values.row(0).setZero();
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i + 1 < x.nodes(); ++i) {
    acc += lift.frames[static_cast<std::size_t>(i)].transpose() *
           (lift.base[static_cast<std::size_t>(i + 1)] -
            lift.base[static_cast<std::size_t>(i)]);
    out.values.row(i + 1) = acc.transpose();
  }
  return out;
}

}  // namespace ydeflow
