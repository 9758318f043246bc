#include "ydeflow/manifold.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "ydeflow/so3.hpp"

namespace ydeflow {

Eigen::MatrixXd EmbeddedManifold::projection_differential(
    const Eigen::VectorXd& x) const {
  const Eigen::Index n = ambient_dim();
  const double h = 1e-6 * (1.0 + x.norm());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd lo = x, hi = x;
    lo(j) -= h;
    hi(j) += h;
    d.col(j) = (project(hi) - project(lo)) / (2.0 * h);
  }
  return d;
}

Sphere::Sphere(double radius) : radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("Sphere: radius must be positive");
}

Eigen::VectorXd Sphere::project(const Eigen::VectorXd& x) const {
  const double n = x.norm();
  if (n == 0.0)
    throw std::invalid_argument("Sphere: the origin has no nearest point");
  return (radius_ / n) * x;
}

Eigen::MatrixXd Sphere::tangent_projector(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd u = x / x.norm();
  return Eigen::MatrixXd::Identity(3, 3) - u * u.transpose();
}

Eigen::MatrixXd Sphere::projection_differential(const Eigen::VectorXd& x) const {
  const double n = x.norm();
  const Eigen::VectorXd u = x / n;
  return (radius_ / n) * (Eigen::MatrixXd::Identity(3, 3) - u * u.transpose());
}

namespace {

Eigen::Matrix3d unvec(const Eigen::VectorXd& x) {
  return Eigen::Map<const Eigen::Matrix3d>(x.data());
}

Eigen::VectorXd vec(const Eigen::Matrix3d& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), 9);
}

}  // namespace

Eigen::VectorXd RotationGroup::project(const Eigen::VectorXd& x) const {
  return vec(project_to_so3(unvec(x)));
}

Eigen::MatrixXd RotationGroup::tangent_projector(const Eigen::VectorXd& x) const {
  // Tangent vectors at R are R * skew; the projector takes V to
  // R * skewpart(R^T V).  Assembled columnwise on the 9-dimensional ambient.
  const Eigen::Matrix3d r = unvec(x);
  Eigen::MatrixXd p(9, 9);
  for (Eigen::Index j = 0; j < 9; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(9);
    e(j) = 1.0;
    const Eigen::Matrix3d v = unvec(e);
    const Eigen::Matrix3d s = 0.5 * (r.transpose() * v - v.transpose() * r);
    p.col(j) = vec(r * s);
  }
  return p;
}

LevelSet::LevelSet(Eigen::Index ambient_dim, Eigen::Index codim,
                   std::function<Eigen::VectorXd(const Eigen::VectorXd&)> g,
                   std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jac,
                   double tol, int max_iter)
    : ambient_(ambient_dim),
      codim_(codim),
      g_(std::move(g)),
      jac_(std::move(jac)),
      tol_(tol),
      max_iter_(max_iter) {
  if (ambient_ < 1 || codim_ < 1 || codim_ >= ambient_)
    throw std::invalid_argument("LevelSet: need 1 <= codim < ambient_dim");
  if (!g_ || !jac_) throw std::invalid_argument("LevelSet: g and jac required");
}

Eigen::VectorXd LevelSet::project(const Eigen::VectorXd& x) const {
  // Gauss-Newton onto the constraint: y <- y - J^T (J J^T)^{-1} g(y).
  // For small offsets this lands at the nearest manifold point to first
  // order; on-manifold queries return unchanged.
  Eigen::VectorXd y = x;
  for (int it = 0; it < max_iter_; ++it) {
    const Eigen::VectorXd r = g_(y);
    if (r.norm() <= tol_) return y;
    const Eigen::MatrixXd j = jac_(y);
    y -= j.transpose() * (j * j.transpose()).ldlt().solve(r).eval();
  }
  if (g_(y).norm() <= 10.0 * tol_) return y;
  throw std::runtime_error("LevelSet: projection did not converge");
}

Eigen::MatrixXd LevelSet::tangent_projector(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd j = jac_(x);
  return Eigen::MatrixXd::Identity(ambient_, ambient_) -
         j.transpose() * (j * j.transpose()).ldlt().solve(j).eval();
}

Trajectory solve_yde_on_manifold(const EmbeddedManifold& m,
                                 const VectorFieldFamily& x, const SampledPath& z,
                                 const Eigen::VectorXd& x0,
                                 const ManifoldSolveOptions& opts) {
  if (x.state_dim != m.ambient_dim())
    throw std::invalid_argument(
        "solve_yde_on_manifold: field lives in R^" + std::to_string(x.state_dim) +
        " but the manifold sits in R^" + std::to_string(m.ambient_dim()));
  if (z.dim() != x.driver_dim)
    throw std::invalid_argument("solve_yde_on_manifold: driver dimension mismatch");
  if (!(z.alpha > 0.5))
    throw std::invalid_argument(
        "solve_yde_on_manifold: driver exponent outside the Young regime");
  if ((m.project(x0) - x0).norm() > opts.on_manifold_tol)
    throw std::invalid_argument(
        "solve_yde_on_manifold: initial point is off the manifold");

  auto tangency_defect = [&](const Eigen::VectorXd& p,
                             const Eigen::MatrixXd& fields) {
    const Eigen::MatrixXd proj = m.tangent_projector(p);
    return (fields - proj * fields).norm();
  };

  std::vector<Eigen::VectorXd> states{x0};
  std::optional<Eigen::Index> explosion;
  Eigen::VectorXd xt = x0;
  for (Eigen::Index i = 0; i + 1 < z.nodes(); ++i) {
    const Eigen::MatrixXd fields = x.eval(xt);
    if (tangency_defect(xt, fields) > opts.tangency_tol)
      throw std::invalid_argument(
          "solve_yde_on_manifold: field is not tangent at node " +
          std::to_string(i));
    Eigen::VectorXd moved = xt + fields * z.increment(i);
    if (!moved.allFinite() || moved.norm() > opts.blowup_guard) {
      explosion = i + 1;
      break;
    }
    xt = m.project(moved);
    if (!xt.allFinite()) {
      explosion = i + 1;
      break;
    }
    states.push_back(xt);
  }

  Trajectory out;
  const auto kept = static_cast<Eigen::Index>(states.size());
  out.times = z.times.head(kept);
  out.states.resize(kept, m.ambient_dim());
  for (Eigen::Index i = 0; i < kept; ++i) out.states.row(i) = states[i].transpose();
  out.explosion_index = explosion;
  return out;
}

double path_as_yde_residual(const EmbeddedManifold& m, const SampledPath& y) {
  if (y.dim() != m.ambient_dim())
    throw std::invalid_argument("path_as_yde_residual: path dimension mismatch");
  if (y.nodes() < 2)
    throw std::invalid_argument("path_as_yde_residual: path needs two nodes");

  Eigen::VectorXd xt = y.value(0);
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < y.nodes(); ++i) {
    xt += m.projection_differential(xt) * y.increment(i);
    worst = std::max(worst, (xt - y.value(i + 1)).norm());
  }
  return worst;
}

}  // namespace ydeflow
