#include <doctest.h>

#include <cmath>

#include <ydeflow/homogeneous.hpp>
#include <ydeflow/paths.hpp>
#include <ydeflow/so3.hpp>
#include <ydeflow/transport.hpp>

#include "helpers.hpp"

using namespace ydeflow;

TEST_SUITE("homogeneous") {

TEST_CASE("right-invariant motion with zero generator stays at the identity") {
  auto z = gen_fbm(0.75, 257, 1.0, 1);
  auto g = solve_right_invariant(Eigen::Matrix3d::Zero(), z);
  for (const auto& m : g.values)
    CHECK((m - Eigen::Matrix3d::Identity()).norm() == 0.0);
}

TEST_CASE("right-invariant motion about the pole is the polar rotation") {
  auto z = gen_smooth(SmoothKind::Linear, {1.0}, 257, 1.5);
  auto g = solve_right_invariant(hat(Eigen::Vector3d::UnitZ()), z);
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    Eigen::Matrix3d want = so3_exp(Eigen::Vector3d(0, 0, z.values(i, 0)));
    CHECK((g.values[static_cast<std::size_t>(i)] - want).norm() < 1e-13);
  }
}

TEST_CASE("right-invariant motion stays in the rotation group for rough drivers") {
  auto z = gen_fbm(0.75, 1025, 1.0, 5);
  auto g = solve_right_invariant(hat(Eigen::Vector3d(1.0, -0.4, 0.7)), z);
  for (const auto& m : g.values) {
    CHECK((m.transpose() * m - Eigen::Matrix3d::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("vertical generators produce no base motion and a trivial lift") {
  auto z = gen_smooth(SmoothKind::Sine, {1.0, 2.0}, 513, 1.0);
  Eigen::Matrix3d a = hat(Eigen::Vector3d::UnitZ());  // fixes the pole
  auto gh = horizontal_factor(a, z, Eigen::Matrix3d::Identity());
  for (const auto& m : gh.values)
    CHECK((m - Eigen::Matrix3d::Identity()).norm() < 1e-12);
}

TEST_CASE("horizontal generators make the lift follow the full motion") {
  // The orbit of hat(e1) is a great circle, and frame transport along a great
  // circle is the ambient rotation itself, so the lift reproduces the motion
  // node by node at roundoff on any grid.
  auto z = gen_smooth(SmoothKind::Sine, {0.2, 1.0}, 2049, 1.0);
  Eigen::Matrix3d a = hat(Eigen::Vector3d::UnitX());  // horizontal at identity
  auto g = solve_right_invariant(a, z);
  auto gh = horizontal_factor(a, z, Eigen::Matrix3d::Identity());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z.nodes(); ++i)
    worst = std::max(worst, (gh.values[static_cast<std::size_t>(i)] -
                             g.values[static_cast<std::size_t>(i)]).norm());
  CHECK(worst < 1e-12);
}

TEST_CASE("zero generator decomposes into identities") {
  auto z = gen_fbm(0.75, 257, 1.0, 7);
  auto dec =
      decompose_homogeneous(Eigen::Matrix3d::Zero(), z, Eigen::Matrix3d::Identity());
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    CHECK((dec.gh.values[static_cast<std::size_t>(i)] -
           Eigen::Matrix3d::Identity()).norm() == 0.0);
    CHECK((dec.h.values[static_cast<std::size_t>(i)] -
           Eigen::Matrix3d::Identity()).norm() < 1e-14);
  }
}

TEST_CASE("vertical generator decomposes into pure fibre motion") {
  auto z = gen_smooth(SmoothKind::Sine, {0.9, 2.0}, 513, 1.0);
  Eigen::Matrix3d a = 0.8 * hat(Eigen::Vector3d::UnitZ());
  auto dec = decompose_homogeneous(a, z, Eigen::Matrix3d::Identity());
  double worst_gh = 0.0, worst_h = 0.0;
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    const double dz = z.values(i, 0) - z.values(0, 0);
    worst_gh = std::max(worst_gh, (dec.gh.values[static_cast<std::size_t>(i)] -
                                   Eigen::Matrix3d::Identity()).norm());
    worst_h = std::max(worst_h, (dec.h.values[static_cast<std::size_t>(i)] -
                                 so3_exp(Eigen::Vector3d(0, 0, 0.8 * dz))).norm());
  }
  CHECK(worst_gh < 1e-12);
  CHECK(worst_h < 1e-12);
  CHECK(std::abs(dec.h_angle[256] - 0.8 * (z.values(256, 0) - z.values(0, 0))) <
        1e-12);
}

TEST_CASE("generic decomposition satisfies its reconstruction identities") {
  auto z = gen_smooth(SmoothKind::Sine, {0.8, 2.0}, 1025, 1.0);
  Eigen::Matrix3d a = hat(Eigen::Vector3d(1.0, 0.7, 0.4));
  auto dec = decompose_homogeneous(a, z, Eigen::Matrix3d::Identity());
  CHECK(dec.reconstruction_gap < 1e-10);
  CHECK(dec.stabilizer_gap < 1e-10);
  for (const auto& h : dec.h.values) CHECK(dist_to_stabilizer(h) < 1e-10);

  // the horizontal factor carries the base orbit
  auto orbit = orbit_path(dec.g, Eigen::Matrix3d::Identity());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    Eigen::Vector3d base =
        dec.gh.values[static_cast<std::size_t>(i)] * Eigen::Vector3d::UnitZ();
    worst = std::max(worst, (base - orbit.value(i)).norm());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("generic decomposition is horizontal in the bundle sense") {
  auto z = gen_smooth(SmoothKind::Sine, {0.8, 2.0}, 1025, 1.0);
  Eigen::Matrix3d a = hat(Eigen::Vector3d(1.0, 0.7, 0.4));
  auto dec = decompose_homogeneous(a, z, Eigen::Matrix3d::Identity());
  FramePath lifted;
  lifted.times = z.times;
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    const Eigen::Matrix3d& m = dec.gh.values[static_cast<std::size_t>(i)];
    lifted.base.push_back(m.col(2));
    lifted.frames.push_back(m.leftCols<2>());
  }
  auto conn = ConnectionForm::sphere_levi_civita();
  CHECK(horizontality_residual(conn, lifted).norm() < 1e-12);
}

TEST_CASE("decomposition refines consistently toward the fine grid") {
  auto z = gen_smooth(SmoothKind::Sine, {0.8, 2.0}, 4097, 1.0);
  Eigen::Matrix3d a = hat(Eigen::Vector3d(1.0, 0.7, 0.4));
  auto fine = decompose_homogeneous(a, z, Eigen::Matrix3d::Identity());
  double prev = 1e300;
  for (Eigen::Index stride : {8, 2}) {
    auto dec = decompose_homogeneous(a, z.subsample(stride),
                                     Eigen::Matrix3d::Identity());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < dec.gh.nodes(); ++i)
      worst = std::max(worst,
                       (dec.gh.values[static_cast<std::size_t>(i)] -
                        fine.gh.values[static_cast<std::size_t>(i * stride)])
                           .norm());
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("rough drivers keep the decomposition identities") {
  auto z = gen_fbm(0.75, 1025, 1.0, 11);
  Eigen::Matrix3d a = hat(Eigen::Vector3d(0.9, -0.3, 0.5));
  Eigen::Matrix3d x = so3_exp(Eigen::Vector3d(0.2, 0.4, -0.1));
  auto dec = decompose_homogeneous(a, z, x);
  CHECK(dec.reconstruction_gap < 1e-10);
  CHECK(dec.stabilizer_gap < 1e-10);
}

TEST_CASE("product bundle with no fibre generator keeps the fibre still") {
  auto z = gen_fbm(0.75, 513, 1.0, 13);
  auto dec = trivial_bundle_decompose(
      hat(Eigen::Vector3d(0.4, 0.1, -0.8)), Eigen::Matrix2d::Zero(), z,
      so3_exp(Eigen::Vector3d(0.1, 0.0, 0.3)), so2_exp(0.4));
  for (const auto& h : dec.h)
    CHECK((h - Eigen::Matrix2d::Identity()).norm() < 1e-14);
  CHECK(dec.reconstruction_gap < 1e-10);
}

TEST_CASE("product bundle with no base generator is pure fibre motion") {
  auto z = gen_smooth(SmoothKind::Sine, {1.1, 2.0}, 513, 1.0);
  const double rate = 0.9;
  auto dec = trivial_bundle_decompose(Eigen::Matrix3d::Zero(), so2_gen(rate), z,
                                      Eigen::Matrix3d::Identity(),
                                      Eigen::Matrix2d::Identity());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    const double dz = z.values(i, 0) - z.values(0, 0);
    worst = std::max(worst, (dec.h[static_cast<std::size_t>(i)] -
                             so2_exp(rate * dz)).norm());
    CHECK((dec.g_first[static_cast<std::size_t>(i)] -
           Eigen::Matrix3d::Identity()).norm() == 0.0);
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("product bundle reconstruction is exact for any driver") {
  Eigen::Matrix3d a = hat(Eigen::Vector3d(0.7, -0.2, 0.5));
  Eigen::Matrix2d b = so2_gen(1.3);
  Eigen::Matrix3d x = so3_exp(Eigen::Vector3d(0.3, 0.1, -0.6));
  Eigen::Matrix2d y = so2_exp(0.8);
  auto smooth = gen_smooth(SmoothKind::Sine, {1.0, 3.0}, 1025, 1.0);
  auto rough = gen_fbm(0.75, 1025, 1.0, 17);
  auto wiggly = gen_weierstrass(0.55, 3.0, 1025, 1.0);
  for (const auto* z : {&smooth, &rough, &wiggly}) {
    auto dec = trivial_bundle_decompose(a, b, *z, x, y);
    CHECK(dec.reconstruction_gap < 1e-10);
    // fibre factor follows the conjugated closed form
    double worst = 0.0;
    for (Eigen::Index i = 0; i < z->nodes(); ++i) {
      const double dz = z->values(i, 0) - z->values(0, 0);
      Eigen::Matrix2d want = y.transpose() * (so2_exp(1.3 * dz) * y);
      worst = std::max(worst, (dec.h[static_cast<std::size_t>(i)] - want).norm());
    }
    CHECK(worst < 1e-12);
    // the horizontal factor pushed through x reproduces the base flow
    for (Eigen::Index i = 0; i < z->nodes(); ++i)
      CHECK((dec.eta_first[static_cast<std::size_t>(i)] * x -
             dec.g_first[static_cast<std::size_t>(i)]).norm() < 1e-14);
  }
}

}  // TEST_SUITE
