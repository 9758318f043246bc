#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include <ydeflow/expm.hpp>
#include <ydeflow/linear.hpp>
#include <ydeflow/paths.hpp>

#include "helpers.hpp"

using namespace ydeflow;

namespace {

Eigen::MatrixXd rotation_generator() {
  Eigen::MatrixXd a(2, 2);
  a << 0, -1, 1, 0;
  return a;
}

Eigen::MatrixXd random_matrix(Eigen::Index n, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = scale * nd(rng);
  return a;
}

}  // namespace

TEST_SUITE("linear") {

TEST_CASE("block partition reassembles the matrix exactly") {
  Eigen::MatrixXd a = random_matrix(5, 1, 1.0);
  LinearSystem sys(a, 2);
  Eigen::MatrixXd re(5, 5);
  re << sys.a1(), sys.a2(), sys.a3(), sys.a4();
  CHECK(re == a);
  CHECK_THROWS_AS(LinearSystem(a, 0), std::invalid_argument);
  CHECK_THROWS_AS(LinearSystem(a, 5), std::invalid_argument);
  CHECK_THROWS_AS(LinearSystem(random_matrix(4, 1, 1.0).topRows(3), 1),
                  std::invalid_argument);
}

TEST_CASE("fundamental solution of the zero matrix is the identity") {
  auto z = gen_fbm(0.75, 257, 1.0, 2);
  auto f = fundamental_solution(Eigen::MatrixXd::Zero(3, 3), z);
  for (const auto& m : f.values)
    CHECK((m - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("fundamental solution of a diagonal matrix is entrywise exponential") {
  auto z = gen_smooth(SmoothKind::Sine, {1.3, 2.0}, 257, 1.0);
  Eigen::MatrixXd a = Eigen::Vector2d(0.7, -1.1).asDiagonal();
  auto f = fundamental_solution(a, z);
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    const double dz = z.values(i, 0) - z.values(0, 0);
    CHECK(f.values[i](0, 0) == doctest::Approx(std::exp(0.7 * dz)).epsilon(1e-13));
    CHECK(f.values[i](1, 1) == doctest::Approx(std::exp(-1.1 * dz)).epsilon(1e-13));
    CHECK(std::abs(f.values[i](0, 1)) + std::abs(f.values[i](1, 0)) == 0.0);
  }
}

TEST_CASE("fundamental solution of the rotation generator rotates by Z") {
  auto z = gen_smooth(SmoothKind::Linear, {1.0}, 129, 1.2);
  auto f = fundamental_solution(rotation_generator(), z);
  for (Eigen::Index i = 0; i < z.nodes(); ++i) {
    const double th = z.values(i, 0);
    CHECK(f.values[i](0, 0) == doctest::Approx(std::cos(th)).epsilon(1e-13));
    CHECK(f.values[i](1, 0) == doctest::Approx(std::sin(th)).epsilon(1e-13));
  }
}

TEST_CASE("rotation blocks at a quarter turn match the closed forms") {
  // Z runs linearly up to pi/4, where eta and psi have exact values.
  auto z = gen_smooth(SmoothKind::Linear, {1.0}, 129, M_PI / 4.0);
  LinearSystem sys(rotation_generator(), 1);
  auto dec = decompose_blocks(sys, z);
  REQUIRE(!dec.exploded());
  const Eigen::Index last = dec.nodes() - 1;

  Eigen::MatrixXd eta = dec.eta(last), psi = dec.psi(last);
  const double r2 = std::sqrt(2.0);
  CHECK(eta(0, 0) == doctest::Approx(r2).epsilon(1e-12));
  CHECK(eta(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eta(1, 0) == 0.0);
  CHECK(eta(1, 1) == 1.0);
  CHECK(psi(0, 0) == 1.0);
  CHECK(psi(0, 1) == 0.0);
  CHECK(psi(1, 0) == doctest::Approx(r2 / 2.0).epsilon(1e-12));
  CHECK(psi(1, 1) == doctest::Approx(r2 / 2.0).epsilon(1e-12));
}

TEST_CASE("decomposition at the start node is the identity pair") {
  auto z = gen_fbm(0.75, 257, 1.0, 3);
  LinearSystem sys(random_matrix(4, 7, 0.6), 2);
  auto dec = decompose_blocks(sys, z);
  CHECK((dec.eta(0) - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);
  CHECK((dec.psi(0) - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("structural zeros of the factors are exact") {
  auto z = gen_fbm(0.75, 257, 1.0, 5);
  LinearSystem sys(random_matrix(5, 11, 0.5), 2);
  auto dec = decompose_blocks(sys, z);
  REQUIRE(!dec.exploded());
  for (Eigen::Index i = 0; i < dec.nodes(); ++i) {
    Eigen::MatrixXd eta = dec.eta(i), psi = dec.psi(i);
    CHECK(eta.bottomLeftCorner(3, 2).norm() == 0.0);
    CHECK(psi.topRightCorner(2, 3).norm() == 0.0);
    CHECK((psi.topLeftCorner(2, 2) - Eigen::MatrixXd::Identity(2, 2)).norm() ==
          0.0);
  }
}

TEST_CASE("factors multiply back to the fundamental solution") {
  auto z = gen_smooth(SmoothKind::Linear, {1.0}, 1025, 1.2);
  LinearSystem sys(rotation_generator(), 1);
  auto dec = decompose_blocks(sys, z);
  auto f = fundamental_solution(sys.a, z);
  REQUIRE(!dec.exploded());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < dec.nodes(); ++i)
    worst = std::max(
        worst, (dec.eta(i) * dec.psi(i) - f.values[i]).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-12);
}

TEST_CASE("rotation crossing a quarter period explodes the factorization") {
  auto z = gen_smooth(SmoothKind::Linear, {1.0}, 4097, 2.0);
  LinearSystem sys(rotation_generator(), 1);
  DecomposeOptions opts;
  opts.singular_threshold = 1e-3;
  auto dec = decompose_blocks(sys, z, opts);
  REQUIRE(dec.exploded());
  const double t_star = z.times(*dec.explosion_index);
  CHECK(std::abs(t_star - M_PI / 2.0) < 2e-3);
  CHECK(dec.nodes() == *dec.explosion_index);
  CHECK(static_cast<Eigen::Index>(dec.g1.size()) == dec.nodes());
}

TEST_CASE("block equations agree with the direct factorization") {
  // Lower-left coupling absent: the decomposition is global.
  Eigen::MatrixXd a(3, 3);
  a << 0.4, -0.8, 0.3, 0.0, 0.1, -0.5, 0.0, 0.7, -0.3;
  LinearSystem sys(a, 1);
  auto z = gen_smooth(SmoothKind::Sine, {1.0, 2.0}, 2049, 1.0);
  auto via = decompose_via_yde(sys, z);
  auto direct = decompose_blocks(sys, z);
  REQUIRE(!via.exploded());
  REQUIRE(!direct.exploded());

  // the uncoupled third block never leaves zero
  for (const auto& g3 : via.g3) CHECK(g3.norm() == 0.0);

  double worst = 0.0;
  for (Eigen::Index i = 0; i < via.nodes(); ++i)
    worst = std::max(worst,
                     (via.eta(i) * via.psi(i) -
                      direct.eta(i) * direct.psi(i)).cwiseAbs().maxCoeff());
  CHECK(worst < 5e-3);
}

TEST_CASE("block equations with the zero matrix stay at the initial data") {
  auto z = gen_fbm(0.75, 257, 1.0, 7);
  LinearSystem sys(Eigen::MatrixXd::Zero(4, 4), 2);
  auto dec = decompose_via_yde(sys, z);
  for (Eigen::Index i = 0; i < dec.nodes(); ++i) {
    CHECK((dec.g1[i] - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    CHECK(dec.g2[i].norm() == 0.0);
    CHECK(dec.g3[i].norm() == 0.0);
    CHECK((dec.g4[i] - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
  }
}

TEST_CASE("block equations reproduce the secant solution for rotations") {
  auto z = gen_smooth(SmoothKind::Sine, {1.2, 1.0}, 4097, 1.0);
  LinearSystem sys(rotation_generator(), 1);
  auto dec = decompose_via_yde(sys, z);
  REQUIRE(!dec.exploded());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < dec.nodes(); ++i)
    worst = std::max(worst, std::abs(dec.g1[i](0, 0) -
                                     1.0 / std::cos(z.values(i, 0))));
  CHECK(worst < 5e-3);
}

TEST_CASE("explosion detection refines the quarter-period crossing") {
  auto z = gen_smooth(SmoothKind::Linear, {1.0}, 4097, 2.0);
  LinearSystem sys(rotation_generator(), 1);
  auto t = detect_explosion(sys, z, 5e-4);
  REQUIRE(t.has_value());
  CHECK(std::abs(*t - M_PI / 2.0) < 1e-3);
}

TEST_CASE("explosion detection stays silent without coupling") {
  auto z = gen_fbm(0.75, 1025, 1.0, 9);
  Eigen::MatrixXd a(3, 3);
  a << 0.4, -0.8, 0.3, 0.0, 0.1, -0.5, 0.0, 0.7, -0.3;
  CHECK(!detect_explosion(LinearSystem(a, 1), z, 1e-8).has_value());
  CHECK(!detect_explosion(LinearSystem(Eigen::MatrixXd::Zero(3, 3), 1), z, 1e-8)
             .has_value());
  CHECK_THROWS_AS(detect_explosion(LinearSystem(a, 1), z, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(detect_explosion(LinearSystem(a, 1), z, 1.0),
                  std::invalid_argument);
}

TEST_CASE("triangular input passes through the foliation unchanged") {
  Eigen::MatrixXd a(3, 3);
  a << 1.0, 0.4, -0.2, 0.0, 0.5, 0.3, 0.0, 0.0, -0.7;
  auto fol = schur_foliation(a);
  CHECK(fol.k == 1);
  CHECK((fol.p.cwiseAbs() - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK((fol.p.transpose() * a * fol.p - fol.t).norm() < 1e-12);
}

TEST_CASE("foliation splits a rotation block from a scalar direction") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a.topLeftCorner(2, 2) = rotation_generator();
  a(2, 2) = 2.0;
  auto fol = schur_foliation(a);
  CHECK((fol.k == 1 || fol.k == 2));
  CHECK(fol.t.bottomLeftCorner(3 - fol.k, fol.k).norm() == 0.0);
  CHECK((fol.p.transpose() * fol.p - Eigen::MatrixXd::Identity(3, 3)).norm() <
        1e-13);
  CHECK((fol.p.transpose() * a * fol.p - fol.t).norm() < 1e-12 * a.norm());
}

TEST_CASE("plane rotation admits no foliation") {
  CHECK_THROWS_AS(schur_foliation(rotation_generator()), std::invalid_argument);
  CHECK_THROWS_AS(schur_foliation(Eigen::MatrixXd::Identity(1, 1)),
                  std::invalid_argument);
}

TEST_CASE("foliated coordinates never explode") {
  Eigen::MatrixXd a = random_matrix(5, 21, 0.8);
  auto fol = schur_foliation(a);
  LinearSystem sys(fol.t, fol.k);
  for (std::uint64_t seed : {1, 2, 3}) {
    auto z = gen_fbm(0.75, 1025, 1.0, seed);
    auto dec = decompose_blocks(sys, z);
    CHECK(!dec.exploded());
  }
}

TEST_CASE("conjugating the foliation reproduces the original flow") {
  Eigen::MatrixXd a = random_matrix(4, 33, 0.7);
  auto fol = schur_foliation(a);
  auto z = gen_smooth(SmoothKind::Sine, {1.0, 2.0}, 257, 1.0);
  auto fa = fundamental_solution(a, z);
  auto ft = fundamental_solution(fol.t, z);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z.nodes(); ++i)
    worst = std::max(worst, (fa.values[i] -
                             fol.p * ft.values[i] * fol.p.transpose()).norm());
  CHECK(worst < 1e-11);
}

}  // TEST_SUITE
