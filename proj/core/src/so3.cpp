#include "ydeflow/so3.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace ydeflow {

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& w) {
  return {w(2, 1), w(0, 2), w(1, 0)};
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d k = hat(w);
  if (theta < 1e-8)
    return Eigen::Matrix3d::Identity() + k + 0.5 * k * k;
  const double s = std::sin(theta) / theta;
  const double c = (1.0 - std::cos(theta)) / (theta * theta);
  return Eigen::Matrix3d::Identity() + s * k + c * k * k;
}

Eigen::Matrix3d so3_exp(const Eigen::Matrix3d& w) { return so3_exp(vee(w)); }

Eigen::Vector3d so3_log(const Eigen::Matrix3d& r) {
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  const double theta = std::acos(c);
  if (theta < 1e-8) return vee(0.5 * (r - r.transpose()));
  if (M_PI - theta < 1e-6) {
    // Near a half turn the skew part degenerates; recover the axis from the
    // dominant diagonal of (r + I)/2 = axis axis^T + O(pi - theta).
    Eigen::Matrix3d b = 0.5 * (r + Eigen::Matrix3d::Identity());
    int k = 0;
    b.diagonal().maxCoeff(&k);
    Eigen::Vector3d axis = b.col(k) / std::sqrt(b(k, k));
    axis.normalize();
    // Fix the sign so that exp matches r's skew part direction.
    Eigen::Vector3d skew = vee(0.5 * (r - r.transpose()));
    if (skew.dot(axis) < 0.0) axis = -axis;
    return theta * axis;
  }
  return theta / (2.0 * std::sin(theta)) * vee(r - r.transpose());
}

Eigen::Matrix2d so2_exp(double angle) {
  Eigen::Matrix2d m;
  m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return m;
}

Eigen::Matrix2d so2_gen(double rate) {
  Eigen::Matrix2d m;
  m << 0.0, -rate, rate, 0.0;
  return m;
}

Eigen::Matrix3d project_to_so3(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

double dist_to_stabilizer(const Eigen::Matrix3d& g) {
  const Eigen::Vector3d e3(0.0, 0.0, 1.0);
  const Eigen::Matrix2d b = g.topLeftCorner<2, 2>();
  const Eigen::Matrix2d nearest = so2_exp(stabilizer_angle(g));
  return (g * e3 - e3).norm() + (b - nearest).norm();
}

double stabilizer_angle(const Eigen::Matrix3d& g) {
  const Eigen::Matrix2d b = g.topLeftCorner<2, 2>();
  return std::atan2(b(1, 0) - b(0, 1), b(0, 0) + b(1, 1));
}

Eigen::Matrix3d project_to_stabilizer(const Eigen::Matrix3d& g) {
  Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
  h.topLeftCorner<2, 2>() = so2_exp(stabilizer_angle(g));
  return h;
}

}  // namespace ydeflow
