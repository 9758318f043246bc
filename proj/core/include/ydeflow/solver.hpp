#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <vector>

#include "ydeflow/paths.hpp"

namespace ydeflow {

// A family of driving vector fields X_1, ..., X_d on R^n, presented as one
// map x -> [X_1(x) | ... | X_d(x)] (n x d).  jacobian(x)[j] is the n x n
// derivative of X_j at x; when absent it is formed by central differences of
// eval.  A nonempty `linear` means X_j(x) = linear[j] * x, which the solvers
// use to shortcut flow-map evaluations (the arithmetic per step is the same).
struct VectorFieldFamily {
  Eigen::Index state_dim = 0;
  Eigen::Index driver_dim = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eval;
  std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> jacobian;
  std::vector<Eigen::MatrixXd> linear;

  bool is_linear() const { return !linear.empty(); }

  Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const { return eval(x); }
  std::vector<Eigen::MatrixXd> jac(const Eigen::VectorXd& x) const;

  // Largest relative gap between jacobian() and finite differences of eval
  // over the probe points.
  double jacobian_defect(const std::vector<Eigen::VectorXd>& probes) const;

  static VectorFieldFamily from_linear(const Eigen::MatrixXd& a);
  static VectorFieldFamily from_linear(const std::vector<Eigen::MatrixXd>& as);
  static VectorFieldFamily from_functions(
      Eigen::Index state_dim, Eigen::Index driver_dim,
      std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eval,
      std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)>
          jacobian = nullptr);
};

struct SolveOptions {
  double blowup_guard = 1e8;  // |x| above this records an explosion
};

// A discrete solution.  times/states cover the nodes reached before any
// blow-up; explosion_index is the driver-grid index at which the guard
// tripped (the first node with no finite state).
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;                  // nodes x state_dim
  std::vector<Eigen::MatrixXd> jacobians;  // optional, one per node
  std::optional<Eigen::Index> explosion_index;

  bool exploded() const { return explosion_index.has_value(); }
  Eigen::Index nodes() const { return times.size(); }
  Eigen::VectorXd state(Eigen::Index i) const { return states.row(i).transpose(); }
};

// Left-point Euler for dx = X(x) dZ on the driver's grid:
//   x_{i+1} = x_i + X(x_i) (Z_{i+1} - Z_i).
// Requires Z.alpha > 1/2 so that, with smooth fields, the scheme is in the
// Young regime (convergence order 2*alpha - 1).
Trajectory solve_euler(const VectorFieldFamily& x, const SampledPath& z,
                       const Eigen::VectorXd& x0, const SolveOptions& opts = {});

// One trajectory per initial point, same grid.
std::vector<Trajectory> solve_flow(const VectorFieldFamily& x,
                                   const SampledPath& z,
                                   const std::vector<Eigen::VectorXd>& x0s,
                                   const SolveOptions& opts = {});

// Euler trajectory plus the derivative of the flow map along it:
//   J_{i+1} = J_i + sum_j DX_j(x_i) J_i (Z^j_{i+1} - Z^j_i),  J_0 = I.
Trajectory variational_jacobian(const VectorFieldFamily& x, const SampledPath& z,
                                const Eigen::VectorXd& x0,
                                const SolveOptions& opts = {});

// The time-reversal companion: integrates
//   dz_t = -(D eta_t)^{-1}(z_t) X(eta_t(z_t)) dZ_t,  z_0 = z0,
// whose solution is eta_t^{-1}(z0) for the forward flow eta.  At each node
// the flow value and its Jacobian at the current z are produced by re-running
// the forward scheme from z over [0, t_i] (linear fields reuse one matrix
// solve), so a single scheme controls the whole error budget.  A singular
// Jacobian is recorded as an explosion.
Trajectory inverse_flow(const VectorFieldFamily& x, const SampledPath& z,
                        const Eigen::VectorXd& z0, const SolveOptions& opts = {});

struct CompositionCheck {
  double residual = 0.0;  // max gap between the two constructions
  bool exploded = false;
};

// Compares the composition of the two flows with the direct integration of
// the composed dynamics: eta follows X, psi follows Y, and the candidate w
// integrates
//   dw = X(w) dZ + D eta_t(eta_t^{-1}(w)) Y(eta_t^{-1}(w)) dZ,
// i.e. the Y field pushed forward through eta_t.  Returns the largest
// discrepancy max_t | w_t - eta_t(psi_t(x0)) |.  For nonlinear fields the
// flow-map and inverse evaluations cost a forward re-solve per node (the
// inverse by warm-started Newton), so grids should stay moderate.
CompositionCheck ito_kunita_check(const VectorFieldFamily& x,
                                  const VectorFieldFamily& y,
                                  const SampledPath& z,
                                  const Eigen::VectorXd& x0,
                                  const SolveOptions& opts = {});

}  // namespace ydeflow
