#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "ydeflow/paths.hpp"

namespace ydeflow {

// The linear system dx = A x dZ with a chosen splitting R^n = R^k x R^l.
// Blocks follow the splitting: A = [[A1, A2], [A3, A4]] with A1 k x k.
struct LinearSystem {
  Eigen::MatrixXd a;
  Eigen::Index k = 0;

  LinearSystem(Eigen::MatrixXd a_in, Eigen::Index k_in);

  Eigen::Index n() const { return a.rows(); }
  Eigen::Index l() const { return a.rows() - k; }
  Eigen::MatrixXd a1() const { return a.topLeftCorner(k, k); }
  Eigen::MatrixXd a2() const { return a.topRightCorner(k, l()); }
  Eigen::MatrixXd a3() const { return a.bottomLeftCorner(l(), k); }
  Eigen::MatrixXd a4() const { return a.bottomRightCorner(l(), l()); }
};

// A matrix-valued path on the driver's grid.
struct MatrixPath {
  Eigen::VectorXd times;
  std::vector<Eigen::MatrixXd> values;

  Eigen::Index nodes() const { return times.size(); }
};

// F_t = exp(A (Z_t - Z_0)) node by node; the flow of dx = A x dZ for a
// scalar driver.
MatrixPath fundamental_solution(const Eigen::MatrixXd& a, const SampledPath& z);

// Factorization F = eta * psi with
//   eta = [[g1, g2], [0, I]]   (preserves the last l coordinates)
//   psi = [[I, 0], [g3, g4]]   (preserves the first k coordinates)
// The factor paths stop at the first node where F4 fails the invertibility
// guard; that node index is recorded in explosion_index.  The structural
// zero and identity blocks are exact by construction.
struct BlockDecomposition {
  Eigen::VectorXd times;
  std::vector<Eigen::MatrixXd> g1, g2;  // eta blocks (k x k, k x l)
  std::vector<Eigen::MatrixXd> g3, g4;  // psi blocks (l x k, l x l)
  std::optional<Eigen::Index> explosion_index;

  Eigen::Index nodes() const { return times.size(); }
  bool exploded() const { return explosion_index.has_value(); }
  Eigen::MatrixXd eta(Eigen::Index i) const;
  Eigen::MatrixXd psi(Eigen::Index i) const;
};

struct DecomposeOptions {
  // F4 counts as singular when smin(F4) < threshold * max(1, smax(F4)); the
  // floor keeps the test meaningful for 1 x 1 blocks, where smin = smax.
  double singular_threshold = 1e-8;
  double blowup_guard = 1e8;  // for the block-equation route
};

// Direct route: slice F_t and form g2 = F2 F4^{-1}, g1 = F1 - g2 F3,
// g3 = F3, g4 = F4.
BlockDecomposition decompose_blocks(const LinearSystem& sys, const SampledPath& z,
                                    const DecomposeOptions& opts = {});

// Scheme route: left-point Euler on the four coupled block equations
//   dg1 = [A1 g1 - g2 A3 g1] dZ              g1(0) = I
//   dg2 = [A1 g2 + A2 - g2 A4 - g2 A3 g2] dZ g2(0) = 0
//   dg3 = [A3 g1 + A3 g2 g3 + A4 g3] dZ      g3(0) = 0
//   dg4 = [A3 g2 g4 + A4 g4] dZ              g4(0) = I
BlockDecomposition decompose_via_yde(const LinearSystem& sys, const SampledPath& z,
                                     const DecomposeOptions& opts = {});

// First time at which smin(F4(t)) crosses below `threshold` (absolute,
// in (0,1)), refined between the bracketing grid nodes by bisection with Z
// interpolated linearly in t.  Empty when no node crosses.
std::optional<double> detect_explosion(const LinearSystem& sys,
                                       const SampledPath& z, double threshold);

// Orthogonal change of coordinates A = P T P^T (real Schur form) plus the
// smallest admissible boundary k splitting T's leading diagonal blocks from
// the rest, so the transformed system has an exactly zero lower-left block
// and the factorization exists globally.  T is returned with its structural
// zeros hard-set.  Fails for n = 1 and for 2 x 2 blocks that cannot split
// (a complex eigenvalue pair needs an invariant plane, so dimension > 2).
struct SchurFoliation {
  Eigen::MatrixXd p;
  Eigen::MatrixXd t;
  Eigen::Index k = 0;
};

SchurFoliation schur_foliation(const Eigen::MatrixXd& a);

}  // namespace ydeflow
