#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <ydeflow/paths.hpp>

#include "helpers.hpp"

using namespace ydeflow;

TEST_SUITE("paths") {

TEST_CASE("linear generator samples slope times t exactly") {
  auto p = gen_smooth(SmoothKind::Linear, {1.0}, 11, 1.0);
  REQUIRE(p.nodes() == 11);
  CHECK(p.dim() == 1);
  CHECK(p.alpha == 1.0);
  for (Eigen::Index i = 0; i < 11; ++i) {
    CHECK(p.values(i, 0) == doctest::Approx(0.1 * double(i)).epsilon(1e-15));
    CHECK(p.times(i) == doctest::Approx(0.1 * double(i)).epsilon(1e-15));
  }
}

TEST_CASE("sine generator is periodic over a full period") {
  auto p = gen_smooth(SmoothKind::Sine, {1.0, 1.0}, 257, 2.0 * M_PI);
  CHECK(std::abs(p.values(256, 0)) < 1e-12);
  CHECK(std::abs(p.values(0, 0)) < 1e-15);
}

TEST_CASE("polynomial generator evaluates t^2 at the grid") {
  auto p = gen_smooth(SmoothKind::Polynomial, {0.0, 0.0, 1.0}, 3, 1.0);
  CHECK(p.values(0, 0) == 0.0);
  CHECK(p.values(1, 0) == 0.25);
  CHECK(p.values(2, 0) == 1.0);
}

TEST_CASE("smooth generators reject bad arguments") {
  CHECK_THROWS_AS(gen_smooth(SmoothKind::Sine, {1.0, 1.0}, 1, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_smooth(SmoothKind::Sine, {1.0, 1.0}, 9, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_smooth(SmoothKind::Polynomial, {}, 9, 1.0),
                  std::invalid_argument);
}

TEST_CASE("refining a smooth sample reproduces coarse nodes bitwise") {
  auto coarse = gen_smooth(SmoothKind::Sine, {0.7, 3.0}, 257, 2.0);
  auto fine = gen_smooth(SmoothKind::Sine, {0.7, 3.0}, 1025, 2.0);
  auto sub = fine.subsample(4);
  REQUIRE(sub.nodes() == coarse.nodes());
  for (Eigen::Index i = 0; i < sub.nodes(); ++i) {
    CHECK(sub.times(i) == coarse.times(i));
    CHECK(sub.values(i, 0) == coarse.values(i, 0));
  }
}

TEST_CASE("fbm is deterministic in the seed and starts at zero") {
  auto a = gen_fbm(0.75, 257, 1.0, 42);
  auto b = gen_fbm(0.75, 257, 1.0, 42);
  auto c = gen_fbm(0.75, 257, 1.0, 43);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.values(0, 0) == 0.0);
  CHECK(a.alpha == doctest::Approx(0.74).epsilon(1e-12));
  CHECK(a.meta.generator == "fbm");
  CHECK(a.meta.seed == 42);
}

TEST_CASE("fbm argument validation") {
  CHECK_THROWS_AS(gen_fbm(0.5, 257, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_fbm(1.0, 257, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_fbm(0.75, 100, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_fbm(0.75, 257, 0.0, 1), std::invalid_argument);
}

TEST_CASE("fbm reports which sampling method ran") {
  // The embedding eigenvalues dip slightly negative for high hurst on short
  // grids, so the generator falls back to the dense factorization there and
  // uses the fast route once the grid is long enough.
  CHECK(gen_fbm(0.75, 1025, 1.0, 7).meta.method == "circulant");
  CHECK(gen_fbm(0.75, 257, 1.0, 7).meta.method == "covariance");
}

TEST_CASE("fbm covariance fallback produces a usable path") {
  auto p = gen_fbm_covariance(0.75, 129, 1.0, 7);
  CHECK(p.meta.method == "covariance");
  CHECK(p.values(0, 0) == 0.0);
  CHECK(p.values.allFinite());
  // Rough sanity on the marginal scale: Var B_1 = 1, so |B_1| < 5 almost
  // surely; a broken factorization typically lands orders away.
  CHECK(std::abs(p.values(128, 0)) < 5.0);
}

TEST_CASE("subsample keeps shared nodes bitwise and nests dyadically") {
  auto p = gen_fbm(0.75, 1025, 1.0, 9);
  auto s4 = p.subsample(4);
  auto s22 = p.subsample(2).subsample(2);
  CHECK(s4.values == s22.values);
  CHECK(s4.times == s22.times);
  for (Eigen::Index i = 0; i < s4.nodes(); ++i) {
    CHECK(s4.values(i, 0) == p.values(4 * i, 0));
    CHECK(s4.times(i) == p.times(4 * i));
  }
  CHECK_THROWS_AS(p.subsample(3), std::invalid_argument);
}

TEST_CASE("weierstrass value at zero matches the geometric series") {
  // The series is truncated once b^k exhausts double phase accuracy, which
  // for b = 3 leaves a tail of about a^33 / (1 - a) at t = 0.
  const double a = 0.5, b = 3.0;
  auto p = gen_weierstrass(a, b, 257, 1.0);
  CHECK(p.values(0, 0) == doctest::Approx(1.0 / (1.0 - a)).epsilon(1e-9));
  CHECK(p.alpha == doctest::Approx(std::log(1.0 / a) / std::log(b)).epsilon(1e-12));
}

TEST_CASE("weierstrass rejects parameters outside the Young regime") {
  CHECK_THROWS_AS(gen_weierstrass(0.5, 5.0, 257, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gen_weierstrass(1.2, 3.0, 257, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gen_weierstrass(0.5, 0.9, 257, 1.0), std::invalid_argument);
}

TEST_CASE("weierstrass exponent above one is clamped") {
  auto p = gen_weierstrass(0.1, 1.5, 129, 1.0);  // log 10 / log 1.5 > 1
  CHECK(p.alpha == 1.0);
}

TEST_CASE("holder estimate of a linear path is one") {
  auto p = gen_smooth(SmoothKind::Linear, {2.5}, 1025, 1.0);
  auto est = estimate_holder(p);
  CHECK(!est.degenerate);
  CHECK(est.alpha == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("holder estimate flags a constant path as degenerate") {
  auto p = gen_smooth(SmoothKind::Polynomial, {3.0}, 129, 1.0);
  auto est = estimate_holder(p);
  CHECK(est.degenerate);
  CHECK(est.alpha == 1.0);
}

TEST_CASE("holder estimate of one fbm sample lands near its exponent") {
  auto p = gen_fbm(0.75, 1025, 1.0, 42);
  auto est = estimate_holder(p);
  CHECK(!est.degenerate);
  CHECK(est.alpha > 0.55);
  CHECK(est.alpha < 0.95);
}

TEST_CASE("composition with a smooth map preserves the estimated exponent") {
  auto p = gen_fbm(0.75, 4097, 1.0, 42);
  SampledPath q = p;
  for (Eigen::Index i = 0; i < q.nodes(); ++i)
    q.values(i, 0) = std::tanh(p.values(i, 0));
  const double ep = estimate_holder(p).alpha;
  const double eq = estimate_holder(q).alpha;
  CHECK(std::abs(ep - eq) < 0.05);
}

TEST_CASE("uniform grid endpoints and spacing are exact") {
  auto t = uniform_grid(5, 2.0);
  CHECK(t(0) == 0.0);
  CHECK(t(4) == 2.0);
  CHECK(t(2) == 1.0);
}

}  // TEST_SUITE
