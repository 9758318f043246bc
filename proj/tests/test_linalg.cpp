#include <doctest.h>

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <ydeflow/expm.hpp>
#include <ydeflow/slope.hpp>
#include <ydeflow/so3.hpp>

using namespace ydeflow;

TEST_SUITE("linalg") {

TEST_CASE("matrix exponential of zero is the identity") {
  CHECK((expm(Eigen::MatrixXd::Zero(4, 4)) - Eigen::MatrixXd::Identity(4, 4))
            .norm() < 1e-15);
}

TEST_CASE("matrix exponential of a diagonal matrix is entrywise exp") {
  Eigen::MatrixXd d = Eigen::Vector3d(0.3, -1.2, 2.5).asDiagonal();
  auto e = expm(d);
  for (int i = 0; i < 3; ++i)
    CHECK(e(i, i) == doctest::Approx(std::exp(d(i, i))).epsilon(1e-14));
  CHECK(std::abs(e(0, 1)) + std::abs(e(1, 0)) + std::abs(e(2, 1)) == 0.0);
}

TEST_CASE("matrix exponential of a rotation generator is the rotation") {
  Eigen::MatrixXd j(2, 2);
  j << 0, -1, 1, 0;
  const double th = M_PI / 4.0;
  auto e = expm(th * j);
  CHECK(e(0, 0) == doctest::Approx(std::cos(th)).epsilon(1e-14));
  CHECK(e(1, 0) == doctest::Approx(std::sin(th)).epsilon(1e-14));
  CHECK(e(0, 1) == doctest::Approx(-std::sin(th)).epsilon(1e-14));
}

TEST_CASE("matrix exponential inverts under negation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = 2.0 * nd(rng);
  CHECK((expm(a) * expm(-a) - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-11);
}

TEST_CASE("matrix exponential multiplies over commuting arguments") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = nd(rng);
  Eigen::MatrixXd b = 2.0 * a + 3.0 * Eigen::MatrixXd::Identity(4, 4);
  CHECK((expm(a + b) - expm(a) * expm(b)).norm() < 1e-11 * expm(a + b).norm());
}

TEST_CASE("hat and vee invert each other") {
  Eigen::Vector3d w(0.3, -1.1, 2.0);
  CHECK((vee(hat(w)) - w).norm() == 0.0);
  Eigen::Matrix3d h = hat(w);
  CHECK((h + h.transpose()).norm() == 0.0);
  CHECK((h * w).norm() == 0.0);  // axis is the kernel
}

TEST_CASE("rodrigues exponential agrees with the general exponential") {
  Eigen::Vector3d w(0.4, 0.2, -0.9);
  CHECK((so3_exp(w) - Eigen::Matrix3d(expm(hat(w)))).norm() < 1e-13);
  CHECK((so3_exp(hat(w)) - so3_exp(w)).norm() == 0.0);
}

TEST_CASE("rotation log inverts the exponential away from the cut locus") {
  for (double scale : {1e-8, 0.1, 1.5, M_PI - 0.1}) {
    Eigen::Vector3d w = scale * Eigen::Vector3d(0.6, -0.48, 0.64).normalized();
    CHECK((so3_log(so3_exp(w)) - w).norm() < 1e-10 * (1.0 + scale));
  }
}

TEST_CASE("planar rotation helpers") {
  auto r = so2_exp(0.7);
  CHECK(r(0, 0) == doctest::Approx(std::cos(0.7)));
  CHECK(r(1, 0) == doctest::Approx(std::sin(0.7)));
  auto g = so2_gen(2.0);
  CHECK(g(0, 1) == -2.0);
  CHECK(g(1, 0) == 2.0);
  CHECK(g(0, 0) == 0.0);
}

TEST_CASE("projection to the rotation group is orthogonal and idempotent") {
  Eigen::Matrix3d r = so3_exp(Eigen::Vector3d(0.3, 0.5, -0.2));
  Eigen::Matrix3d noisy = r + 0.05 * Eigen::Matrix3d::Ones();
  Eigen::Matrix3d p = project_to_so3(noisy);
  CHECK((p.transpose() * p - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(p.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((project_to_so3(p) - p).norm() < 1e-13);
  CHECK((project_to_so3(r) - r).norm() < 1e-13);
}

TEST_CASE("stabilizer distance separates polar rotations from tilts") {
  Eigen::Matrix3d rz = so3_exp(Eigen::Vector3d(0.0, 0.0, 0.8));
  Eigen::Matrix3d rx = so3_exp(Eigen::Vector3d(0.5, 0.0, 0.0));
  CHECK(dist_to_stabilizer(rz) < 1e-12);
  CHECK(dist_to_stabilizer(rx) > 0.1);
  CHECK(stabilizer_angle(rz) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK((project_to_stabilizer(rz) - rz).norm() < 1e-12);
  Eigen::Matrix3d snapped = project_to_stabilizer(rx * rz);
  CHECK(dist_to_stabilizer(snapped) < 1e-12);
}

TEST_CASE("slope fit recovers an exact power law") {
  std::vector<double> mesh{1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  std::vector<double> err;
  for (double m : mesh) err.push_back(3.0 * std::pow(m, 0.73));
  CHECK(convergence_slope(mesh, err) == doctest::Approx(0.73).epsilon(1e-12));
}

TEST_CASE("slope fit drops entries at or below the floor") {
  std::vector<double> mesh{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> err{1e-2, 1e-3, 1e-16, 1e-16};
  int used = 0;
  convergence_slope(mesh, err, 1e-12, &used);
  CHECK(used == 2);
  int all = 0;
  convergence_slope(mesh, err, 0.0, &all);
  CHECK(all == 4);
  // every point floored: no slope to report
  CHECK(convergence_slope(mesh, {1e-16, 1e-16, 1e-16, 1e-16}, 1e-12) == 0.0);
}

TEST_CASE("slope fit rejects mismatched inputs") {
  CHECK_THROWS_AS(fit_slope({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_slope({1.0, 2.0}, {1.0}), std::invalid_argument);
}

}  // TEST_SUITE
