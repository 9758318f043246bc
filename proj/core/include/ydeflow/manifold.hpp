#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>

#include "ydeflow/paths.hpp"
#include "ydeflow/solver.hpp"

namespace ydeflow {

// A smooth manifold sitting inside R^N, described by a retraction onto it
// and the orthogonal projector onto its tangent spaces.
class EmbeddedManifold {
 public:
  virtual ~EmbeddedManifold() = default;

  virtual Eigen::Index ambient_dim() const = 0;
  virtual Eigen::Index dim() const = 0;

  // Nearest manifold point (closed form where available, Newton otherwise).
  virtual Eigen::VectorXd project(const Eigen::VectorXd& x) const = 0;

  // Orthogonal projector onto the tangent space at an on-manifold point.
  virtual Eigen::MatrixXd tangent_projector(const Eigen::VectorXd& x) const = 0;

  // Differential of the retraction at x (ambient to ambient).  The default
  // uses central differences of project; subclasses with closed forms
  // override.
  virtual Eigen::MatrixXd projection_differential(const Eigen::VectorXd& x) const;
};

// The round sphere of the given radius in R^3.
class Sphere : public EmbeddedManifold {
 public:
  explicit Sphere(double radius = 1.0);
  Eigen::Index ambient_dim() const override { return 3; }
  Eigen::Index dim() const override { return 2; }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd tangent_projector(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd projection_differential(const Eigen::VectorXd& x) const override;
  double radius() const { return radius_; }

 private:
  double radius_;
};

// The rotation group as the set of vectorized (column-major) 3 x 3 matrices
// with orthonormal columns and determinant one; projection is the polar
// factor.
class RotationGroup : public EmbeddedManifold {
 public:
  Eigen::Index ambient_dim() const override { return 9; }
  Eigen::Index dim() const override { return 3; }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd tangent_projector(const Eigen::VectorXd& x) const override;
};

// Zero set {g = 0} of a submersion g: R^N -> R^c.  Projection runs
// Gauss-Newton from the query point; jac is the c x N derivative of g.
class LevelSet : public EmbeddedManifold {
 public:
  LevelSet(Eigen::Index ambient_dim, Eigen::Index codim,
           std::function<Eigen::VectorXd(const Eigen::VectorXd&)> g,
           std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jac,
           double tol = 1e-13, int max_iter = 60);
  Eigen::Index ambient_dim() const override { return ambient_; }
  Eigen::Index dim() const override { return ambient_ - codim_; }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd tangent_projector(const Eigen::VectorXd& x) const override;

 private:
  Eigen::Index ambient_, codim_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> g_;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jac_;
  double tol_;
  int max_iter_;
};

struct ManifoldSolveOptions {
  double on_manifold_tol = 1e-10;  // for the initial point
  double tangency_tol = 1e-8;      // for the field at each visited point
  double blowup_guard = 1e8;
};

// Projected Euler for dx = X(x) dZ on the manifold:
//   x_{i+1} = project(x_i + X(x_i) (Z_{i+1} - Z_i)).
// Requires x0 on the manifold and X(x) tangent at every visited point (both
// within tolerance); violations throw, blow-ups are recorded as explosions.
Trajectory solve_yde_on_manifold(const EmbeddedManifold& m,
                                 const VectorFieldFamily& x, const SampledPath& z,
                                 const Eigen::VectorXd& x0,
                                 const ManifoldSolveOptions& opts = {});

// How far a manifold-valued path is from solving its own reconstruction
// equation dx = D(project)(x) dy driven by itself: integrates the right side
// with left-point Euler from y_0 and returns max_t | x_t - y_t |.
double path_as_yde_residual(const EmbeddedManifold& m, const SampledPath& y);

}  // namespace ydeflow
