#pragma once

#include <Eigen/Core>

#include <vector>

#include "ydeflow/paths.hpp"

namespace ydeflow {

// A path in the rotation group on the driver's grid.
struct GroupPath {
  Eigen::VectorXd times;
  std::vector<Eigen::Matrix3d> values;

  Eigen::Index nodes() const { return times.size(); }
};

// Solution of the right-invariant equation dg = A g dZ, g_0 = I, for a
// constant generator A in so(3) and scalar driver: g_t = exp(A (Z_t - Z_0)).
GroupPath solve_right_invariant(const Eigen::Matrix3d& a, const SampledPath& z);

// The sphere orbit t -> g_t x e3 of the north pole under the group motion,
// with base point x in SO(3) fixing the starting fibre.
SampledPath orbit_path(const GroupPath& g, const Eigen::Matrix3d& x);

// Horizontal factor of the motion through x: the lift of the orbit path
// into the group, starting at x, horizontal for the metric connection of
// the fibration SO(3) -> S^2 (rotations about e3 as fibres).  Expressed on
// the group via the frame transport: a rotation is the frame
// (columns 1, 2) over its base point (column 3).  Returns gH with
// gH_t x = lift_t, gH_0 = I.
GroupPath horizontal_factor(const Eigen::Matrix3d& a, const SampledPath& z,
                            const Eigen::Matrix3d& x);

// Full decomposition g_t x = gH_t x h_t: gH from horizontal_factor and
// h_t = x^{-1} gH_t^{-1} g_t x, which lands in the stabilizer of e3 by
// construction of the lift.  h is reported both raw and snapped to the
// stabilizer; `stabilizer_gap` records the largest pre-snap distance.
struct HomogeneousDecomposition {
  GroupPath g;    // full motion
  GroupPath gh;   // horizontal factor
  GroupPath h;    // stabilizer factor, snapped
  std::vector<double> h_angle;  // rotation angle of each h_t about e3
  double stabilizer_gap = 0.0;
  double reconstruction_gap = 0.0;  // max |gH_t x h_t - g_t x|
};

struct HomogeneousOptions {
  double stabilizer_tol = 1e-6;  // hard failure beyond this
};

HomogeneousDecomposition decompose_homogeneous(
    const Eigen::Matrix3d& a, const SampledPath& z, const Eigen::Matrix3d& x,
    const HomogeneousOptions& opts = {});

// Product bundle SO(3) x SO(2) with the connection that ignores the first
// factor: the flow of (dg, dh) = (A g dZ, B h dZ) through (x, y) splits into
// a horizontal factor eta_t = (exp(A (Z_t - Z_0)), I) and the fibre motion
// h_t = y^{-1} exp(B (Z_t - Z_0)) y.  All three are closed-form here; the
// decomposition identity holds to roundoff for any driver.
struct TrivialBundleDecomposition {
  Eigen::VectorXd times;
  std::vector<Eigen::Matrix3d> g_first;   // SO(3) component of the flow
  std::vector<Eigen::Matrix2d> g_second;  // SO(2) component of the flow
  std::vector<Eigen::Matrix3d> eta_first;  // horizontal factor, first slot
  std::vector<Eigen::Matrix2d> h;          // fibre factor
  double reconstruction_gap = 0.0;
};

TrivialBundleDecomposition trivial_bundle_decompose(const Eigen::Matrix3d& a,
                                                    const Eigen::Matrix2d& b,
                                                    const SampledPath& z,
                                                    const Eigen::Matrix3d& x,
                                                    const Eigen::Matrix2d& y);

}  // namespace ydeflow
