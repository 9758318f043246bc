#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "ydeflow/paths.hpp"

namespace ydeflow {

// An orthonormal tangent frame moving over a path on the unit sphere:
// base[i] is on S^2 and frame[i] is 3 x 2 with orthonormal columns
// perpendicular to base[i].
struct FramePath {
  Eigen::VectorXd times;
  std::vector<Eigen::Vector3d> base;
  std::vector<Eigen::Matrix<double, 3, 2>> frames;

  Eigen::Index nodes() const { return times.size(); }
};

// Principal connection forms for the two bundles in play.  Values live in
// the structure-group algebra: 2 x 2 skew matrices throughout.
class ConnectionForm {
 public:
  enum class Kind {
    SphereFrameBundle,  // metric connection on orthonormal frames of S^2
    TrivialProduct,     // product bundle (G x H) -> G, omega_(g,h)(g',h') = h^{-1} h'
  };

  static ConnectionForm sphere_levi_civita();
  static ConnectionForm trivial_product();

  Kind kind() const { return kind_; }

  // SphereFrameBundle: value at (x, u) on the bundle tangent (v, w), where
  // w collects the column velocities.  Reduces to skewpart(u^T w) for
  // admissible tangents.
  Eigen::Matrix2d value(const Eigen::Vector3d& x,
                        const Eigen::Matrix<double, 3, 2>& u,
                        const Eigen::Vector3d& v,
                        const Eigen::Matrix<double, 3, 2>& w) const;

  // TrivialProduct: value at (g, h) on (dg, dh) is h^{-1} dh.
  Eigen::Matrix2d value(const Eigen::Matrix2d& h, const Eigen::Matrix2d& dh) const;

 private:
  explicit ConnectionForm(Kind kind) : kind_(kind) {}
  Kind kind_;
};

struct TransportOptions {
  double frame_tol = 1e-8;    // orthonormality/tangency of the initial frame
  double degenerate_tol = 1e-6;  // smallest singular value of a projected frame
};

// Horizontal lift of a sphere path: the base is taken as given and the frame
// is carried by projecting the previous frame onto the new tangent plane and
// re-orthonormalizing with the symmetric (polar) factor.  Each step's frame
// change has symmetric u_i^T u_{i+1}, so the connection form annihilates the
// discrete increments exactly.  Aborts (with the node index in the message)
// if a projected frame degenerates.
FramePath horizontal_lift(const ConnectionForm& conn, const SampledPath& x,
                          const Eigen::Matrix<double, 3, 2>& u0,
                          const TransportOptions& opts = {});

// Discrete connection-form integral along a frame path,
// sum_i omega(x_i, u_i)(dx_i, du_i); the horizontality defect of the lift.
Eigen::Matrix2d horizontality_residual(const ConnectionForm& conn,
                                       const FramePath& path);

// Parallel transport of the tangent vector v along the path: read v in the
// initial lifted frame and write those coordinates in the final frame.
// The result does not depend on the frame choice.
Eigen::Vector3d parallel_transport(const ConnectionForm& conn,
                                   const SampledPath& x, const Eigen::Vector3d& v,
                                   const TransportOptions& opts = {});

// Rotation angle in the initial tangent plane after transport around a loop
// (first and last path nodes must agree): the holonomy of the loop.
double holonomy_angle(const ConnectionForm& conn, const SampledPath& x,
                      const TransportOptions& opts = {});

// Frame-coordinate increments of a tangent field Y along the path:
// node i carries u_i (c_{i+1} - c_i) with c_j = u_j^T Y(x_j), the discrete
// covariant differential; the last node is zero-padded.
std::vector<Eigen::Vector3d> covariant_derivative(
    const ConnectionForm& conn,
    const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field,
    const SampledPath& x, const TransportOptions& opts = {});

// Rolls the sphere along a plane curve w (in R^2): solves
// dx = u dw with the frame carried horizontally; the inverse map integrates
// dy = u^T dx.  Straight lines develop to great-circle arcs of equal length.
SampledPath develop(const ConnectionForm& conn, const SampledPath& w,
                    const Eigen::Vector3d& p0,
                    const Eigen::Matrix<double, 3, 2>& u0,
                    const TransportOptions& opts = {});

SampledPath antidevelop(const ConnectionForm& conn, const SampledPath& x,
                        const Eigen::Matrix<double, 3, 2>& u0,
                        const TransportOptions& opts = {});

}  // namespace ydeflow
