#pragma once

#include <Eigen/Core>

namespace ydeflow {

// so(3) <-> R^3
Eigen::Matrix3d hat(const Eigen::Vector3d& w);
Eigen::Vector3d vee(const Eigen::Matrix3d& w);

// Rodrigues exponential and its inverse (principal branch).
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w);
Eigen::Matrix3d so3_exp(const Eigen::Matrix3d& w);
Eigen::Vector3d so3_log(const Eigen::Matrix3d& r);

// Planar rotation by angle and the so(2) generator [[0,-1],[1,0]] * rate.
Eigen::Matrix2d so2_exp(double angle);
Eigen::Matrix2d so2_gen(double rate);

// Nearest rotation in Frobenius norm (polar factor via SVD, det fixed to +1).
Eigen::Matrix3d project_to_so3(const Eigen::Matrix3d& m);

// The subgroup H of rotations about e3 (the stabilizer of the north pole).
// Distance of g to H: deviation of g*e3 from e3 plus the skew-asymmetry
// defect of the upper-left 2x2 block against a planar rotation.
double dist_to_stabilizer(const Eigen::Matrix3d& g);

// Rotation angle of the H-component: atan2 over the upper-left block.
double stabilizer_angle(const Eigen::Matrix3d& g);

// Nearest element of H: rotation about e3 by stabilizer_angle(g).
Eigen::Matrix3d project_to_stabilizer(const Eigen::Matrix3d& g);

}  // namespace ydeflow
