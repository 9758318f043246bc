#pragma once

#include <Eigen/Core>

namespace ydeflow {

// Matrix exponential by scaling and squaring with a degree-13 Pade
// approximant: A is scaled by 2^-s until its 1-norm is below the order-13
// accuracy radius, the approximant is evaluated, and the result squared s
// times.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace ydeflow
