#pragma once

#include <vector>

namespace ydeflow {

// Least-squares slope of y against x.  Needs at least two points.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log(err) against log(mesh), skipping entries with err <= floor.
// Returns the number of usable points through *used (optional).  When fewer
// than two points survive (errors at the floating-point floor) the slope is
// meaningless; callers should treat that case as "converged".
double convergence_slope(const std::vector<double>& mesh,
                         const std::vector<double>& err,
                         double floor = 0.0, int* used = nullptr);

}  // namespace ydeflow
