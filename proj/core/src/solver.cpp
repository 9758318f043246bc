#include "ydeflow/solver.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ydeflow {

namespace {

void check_driver(const VectorFieldFamily& x, const SampledPath& z,
                  const Eigen::VectorXd& x0, const char* who) {
  if (!x.eval) throw std::invalid_argument(std::string(who) + ": field has no eval");
  if (z.nodes() < 2)
    throw std::invalid_argument(std::string(who) + ": driver needs two nodes");
  if (z.dim() != x.driver_dim)
    throw std::invalid_argument(std::string(who) + ": driver dimension " +
                                std::to_string(z.dim()) + " does not match field (" +
                                std::to_string(x.driver_dim) + ")");
  if (x0.size() != x.state_dim)
    throw std::invalid_argument(std::string(who) + ": initial point dimension " +
                                std::to_string(x0.size()) + " does not match field (" +
                                std::to_string(x.state_dim) + ")");
  if (!(z.alpha > 0.5))
    throw std::invalid_argument(
        std::string(who) + ": driver exponent " + std::to_string(z.alpha) +
        " is outside the Young regime (need > 1/2)");
}

bool state_ok(const Eigen::VectorXd& v, double guard) {
  return v.allFinite() && v.norm() <= guard;
}

Eigen::MatrixXd field_at(const VectorFieldFamily& x, const Eigen::VectorXd& p) {
  if (x.is_linear()) {
    Eigen::MatrixXd out(x.state_dim, x.driver_dim);
    for (Eigen::Index j = 0; j < x.driver_dim; ++j)
      out.col(j) = x.linear[static_cast<std::size_t>(j)] * p;
    return out;
  }
  return x.eval(p);
}

// Forward Euler from `from` over driver nodes [0, upto], optionally carrying
// the derivative of the discrete flow map.  Returns false on blow-up.
bool march(const VectorFieldFamily& x, const SampledPath& z, Eigen::Index upto,
           const Eigen::VectorXd& from, double guard, Eigen::VectorXd* state,
           Eigen::MatrixXd* jac) {
  Eigen::VectorXd xt = from;
  if (jac) jac->setIdentity(x.state_dim, x.state_dim);
  for (Eigen::Index i = 0; i < upto; ++i) {
    const Eigen::VectorXd dz = z.increment(i);
    if (jac) {
      const auto dxs = x.jac(xt);
      Eigen::MatrixXd step = Eigen::MatrixXd::Identity(x.state_dim, x.state_dim);
      for (Eigen::Index j = 0; j < x.driver_dim; ++j)
        step += dxs[static_cast<std::size_t>(j)] * dz(j);
      *jac = step * *jac;
    }
    xt += field_at(x, xt) * dz;
    if (!state_ok(xt, guard)) return false;
  }
  *state = xt;
  return true;
}

Trajectory truncate(Eigen::VectorXd times, std::vector<Eigen::VectorXd> states,
                    std::vector<Eigen::MatrixXd> jacs,
                    std::optional<Eigen::Index> explosion) {
  Trajectory out;
  const auto kept = static_cast<Eigen::Index>(states.size());
  out.times = times.head(kept);
  out.states.resize(kept, states.empty() ? 0 : states.front().size());
  for (Eigen::Index i = 0; i < kept; ++i) out.states.row(i) = states[i].transpose();
  out.jacobians = std::move(jacs);
  out.explosion_index = explosion;
  return out;
}

}  // namespace

std::vector<Eigen::MatrixXd> VectorFieldFamily::jac(const Eigen::VectorXd& p) const {
  if (jacobian) return jacobian(p);
  if (is_linear()) return linear;
  // Central differences of eval, column j of each probe giving DX_j's column.
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(driver_dim),
                                   Eigen::MatrixXd(state_dim, state_dim));
  const double h = 1e-6 * (1.0 + p.norm());
  for (Eigen::Index c = 0; c < state_dim; ++c) {
    Eigen::VectorXd lo = p, hi = p;
    lo(c) -= h;
    hi(c) += h;
    Eigen::MatrixXd d = (eval(hi) - eval(lo)) / (2.0 * h);
    for (Eigen::Index j = 0; j < driver_dim; ++j)
      out[static_cast<std::size_t>(j)].col(c) = d.col(j);
  }
  return out;
}

double VectorFieldFamily::jacobian_defect(
    const std::vector<Eigen::VectorXd>& probes) const {
  if (!jacobian && !is_linear()) return 0.0;  // nothing to compare against
  double worst = 0.0;
  for (const auto& p : probes) {
    const auto analytic = jac(p);
    VectorFieldFamily fd = *this;
    fd.jacobian = nullptr;
    fd.linear.clear();
    fd.eval = eval ? eval : [this](const Eigen::VectorXd& q) { return field_at(*this, q); };
    const auto numeric = fd.jac(p);
    for (Eigen::Index j = 0; j < driver_dim; ++j) {
      const auto& a = analytic[static_cast<std::size_t>(j)];
      const auto& n = numeric[static_cast<std::size_t>(j)];
      worst = std::max(worst, (a - n).norm() / std::max(1.0, a.norm()));
    }
  }
  return worst;
}

VectorFieldFamily VectorFieldFamily::from_linear(const Eigen::MatrixXd& a) {
  return from_linear(std::vector<Eigen::MatrixXd>{a});
}

VectorFieldFamily VectorFieldFamily::from_linear(
    const std::vector<Eigen::MatrixXd>& as) {
  if (as.empty()) throw std::invalid_argument("from_linear: no matrices");
  const Eigen::Index n = as.front().rows();
  for (const auto& a : as)
    if (a.rows() != n || a.cols() != n)
      throw std::invalid_argument("from_linear: matrices must be square, equal size");
  VectorFieldFamily f;
  f.state_dim = n;
  f.driver_dim = static_cast<Eigen::Index>(as.size());
  f.linear = as;
  f.eval = [as, n](const Eigen::VectorXd& p) {
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(as.size()));
    for (std::size_t j = 0; j < as.size(); ++j)
      out.col(static_cast<Eigen::Index>(j)) = as[j] * p;
    return out;
  };
  return f;
}

VectorFieldFamily VectorFieldFamily::from_functions(
    Eigen::Index state_dim, Eigen::Index driver_dim,
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eval,
    std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> jacobian) {
  VectorFieldFamily f;
  f.state_dim = state_dim;
  f.driver_dim = driver_dim;
  f.eval = std::move(eval);
  f.jacobian = std::move(jacobian);
  return f;
}

Trajectory solve_euler(const VectorFieldFamily& x, const SampledPath& z,
                       const Eigen::VectorXd& x0, const SolveOptions& opts) {
  check_driver(x, z, x0, "solve_euler");
  std::vector<Eigen::VectorXd> states{x0};
  std::optional<Eigen::Index> explosion;
  Eigen::VectorXd xt = x0;
  for (Eigen::Index i = 0; i + 1 < z.nodes(); ++i) {
    xt += field_at(x, xt) * z.increment(i);
    if (!state_ok(xt, opts.blowup_guard)) {
      explosion = i + 1;
      break;
    }
    states.push_back(xt);
  }
  return truncate(z.times, std::move(states), {}, explosion);
}

std::vector<Trajectory> solve_flow(const VectorFieldFamily& x,
                                   const SampledPath& z,
                                   const std::vector<Eigen::VectorXd>& x0s,
                                   const SolveOptions& opts) {
  std::vector<Trajectory> out;
  out.reserve(x0s.size());
  for (const auto& p : x0s) out.push_back(solve_euler(x, z, p, opts));
  return out;
}

Trajectory variational_jacobian(const VectorFieldFamily& x, const SampledPath& z,
                                const Eigen::VectorXd& x0,
                                const SolveOptions& opts) {
  check_driver(x, z, x0, "variational_jacobian");
  std::vector<Eigen::VectorXd> states{x0};
  std::vector<Eigen::MatrixXd> jacs{
      Eigen::MatrixXd::Identity(x.state_dim, x.state_dim)};
  std::optional<Eigen::Index> explosion;
  Eigen::VectorXd xt = x0;
  Eigen::MatrixXd jt = jacs.front();
  for (Eigen::Index i = 0; i + 1 < z.nodes(); ++i) {
    const Eigen::VectorXd dz = z.increment(i);
    const auto dxs = x.jac(xt);
    Eigen::MatrixXd step = Eigen::MatrixXd::Identity(x.state_dim, x.state_dim);
    for (Eigen::Index j = 0; j < x.driver_dim; ++j)
      step += dxs[static_cast<std::size_t>(j)] * dz(j);
    jt = step * jt;
    xt += field_at(x, xt) * dz;
    if (!state_ok(xt, opts.blowup_guard) || !jt.allFinite()) {
      explosion = i + 1;
      break;
    }
    states.push_back(xt);
    jacs.push_back(jt);
  }
  return truncate(z.times, std::move(states), std::move(jacs), explosion);
}

Trajectory inverse_flow(const VectorFieldFamily& x, const SampledPath& z,
                        const Eigen::VectorXd& z0, const SolveOptions& opts) {
  check_driver(x, z, z0, "inverse_flow");
  std::vector<Eigen::VectorXd> states{z0};
  std::optional<Eigen::Index> explosion;
  Eigen::VectorXd zt = z0;

  // Linear fields: the flow map is one matrix path, shared by every node.
  std::vector<Eigen::MatrixXd> fundamental;
  if (x.is_linear()) {
    fundamental.reserve(static_cast<std::size_t>(z.nodes()));
    Eigen::MatrixXd e = Eigen::MatrixXd::Identity(x.state_dim, x.state_dim);
    fundamental.push_back(e);
    for (Eigen::Index i = 0; i + 1 < z.nodes(); ++i) {
      const Eigen::VectorXd dz = z.increment(i);
      Eigen::MatrixXd step = Eigen::MatrixXd::Identity(x.state_dim, x.state_dim);
      for (Eigen::Index j = 0; j < x.driver_dim; ++j)
        step += x.linear[static_cast<std::size_t>(j)] * dz(j);
      e = step * e;
      fundamental.push_back(e);
    }
  }

  for (Eigen::Index i = 0; i + 1 < z.nodes(); ++i) {
    Eigen::VectorXd at;        // eta_{t_i}(z_i)
    Eigen::MatrixXd jac;       // D eta_{t_i}(z_i)
    bool ok = true;
    if (x.is_linear()) {
      jac = fundamental[static_cast<std::size_t>(i)];
      at = jac * zt;
    } else {
      ok = march(x, z, i, zt, opts.blowup_guard, &at, &jac);
    }
    if (ok) {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
      const Eigen::VectorXd rhs = field_at(x, at) * z.increment(i);
      const Eigen::VectorXd delta = lu.solve(rhs);
      zt -= delta;
      ok = delta.allFinite() && state_ok(zt, opts.blowup_guard);
    }
    if (!ok) {
      explosion = i + 1;
      break;
    }
    states.push_back(zt);
  }
  return truncate(z.times, std::move(states), {}, explosion);
}

CompositionCheck ito_kunita_check(const VectorFieldFamily& x,
                                  const VectorFieldFamily& y,
                                  const SampledPath& z,
                                  const Eigen::VectorXd& x0,
                                  const SolveOptions& opts) {
  check_driver(x, z, x0, "ito_kunita_check");
  check_driver(y, z, x0, "ito_kunita_check");
  if (x.state_dim != y.state_dim)
    throw std::invalid_argument("ito_kunita_check: state dimensions differ");

  CompositionCheck result;

  const Trajectory psi = solve_euler(y, z, x0, opts);
  if (psi.exploded()) result.exploded = true;

  std::vector<Eigen::MatrixXd> fundamental;  // linear-X flow matrices
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lus;
  if (x.is_linear()) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Identity(x.state_dim, x.state_dim);
    for (Eigen::Index i = 0; i < psi.nodes(); ++i) {
      if (i > 0) {
        const Eigen::VectorXd dz = z.increment(i - 1);
        Eigen::MatrixXd step = Eigen::MatrixXd::Identity(x.state_dim, x.state_dim);
        for (Eigen::Index j = 0; j < x.driver_dim; ++j)
          step += x.linear[static_cast<std::size_t>(j)] * dz(j);
        e = step * e;
      }
      fundamental.push_back(e);
      lus.emplace_back(e);
    }
  }

  Eigen::VectorXd w = x0;  // candidate for the composed flow
  Eigen::VectorXd q = x0;  // warm start for eta^{-1}(w)
  for (Eigen::Index i = 0; i < psi.nodes(); ++i) {
    // Reference: eta_{t_i} applied to the psi trajectory.
    Eigen::VectorXd ref;
    bool ok;
    if (x.is_linear()) {
      ref = fundamental[static_cast<std::size_t>(i)] * psi.state(i);
      ok = ref.allFinite();
    } else {
      ok = march(x, z, i, psi.state(i), opts.blowup_guard, &ref, nullptr);
    }
    if (!ok) {
      result.exploded = true;
      break;
    }
    result.residual = std::max(result.residual, (w - ref).norm());

    if (i + 1 == psi.nodes()) break;
    const Eigen::VectorXd dz = z.increment(i);

    // Push the Y field through eta_{t_i}: evaluate at q = eta^{-1}(w) and
    // carry the result forward with the flow derivative there.
    Eigen::MatrixXd jac;
    if (x.is_linear()) {
      q = lus[static_cast<std::size_t>(i)].solve(w);
      jac = fundamental[static_cast<std::size_t>(i)];
      ok = q.allFinite();
    } else {
      ok = false;
      for (int it = 0; it < 8; ++it) {
        Eigen::VectorXd val;
        if (!march(x, z, i, q, opts.blowup_guard, &val, &jac)) break;
        const Eigen::VectorXd gap = w - val;
        if (gap.norm() <= 1e-11 * (1.0 + w.norm())) {
          ok = true;  // jac is current at the converged q
          break;
        }
        q += jac.partialPivLu().solve(gap);
        if (!q.allFinite()) break;
      }
    }
    if (!ok) {
      result.exploded = true;
      break;
    }

    w += field_at(x, w) * dz + jac * (field_at(y, q) * dz);
    if (!state_ok(w, opts.blowup_guard)) {
      result.exploded = true;
      break;
    }
  }
  return result;
}

}  // namespace ydeflow
