#pragma once

#include <cstdint>
#include <vector>

#include "core/operator.hpp"

namespace regstop {

struct FdStep {
  double step = 0.0;
  double rel_err = 0.0;
  bool skipped = false;  // a probe point left the domain
};

struct FdReport {
  double best_rel_err = 0.0;
  std::vector<FdStep> steps;
};

/// Central-difference check of deriv(x,h) against (F(x+th)-F(x-th))/(2t)
/// over a sweep of steps. Errors are relative to ||deriv(x,h)|| in Y, or
/// absolute when that norm vanishes. Steps whose probes fall outside the
/// domain are recorded as skipped, and the best error is taken over the
/// rest; every step skipped is an error.
FdReport fd_derivative_check(const Problem& p, const GridFunction& x,
                             const GridFunction& h,
                             const std::vector<double>& steps);

/// Default step sweep 1e-1 .. 1e-8, one decade apart.
std::vector<double> default_fd_steps();

/// Worst relative defect |<F'(x)h, r>_Y - <h, F'(x)* r>_X| over random
/// draws of h and r, normalized by ||F'(x)h|| ||r|| (plus a tiny guard).
/// Each trial also probes r aligned with F'(x)h, where a sign or transpose
/// slip shows up at full magnitude instead of hiding behind near-orthogonal
/// random directions.
double adjoint_check(const Problem& p, const GridFunction& x, int trials,
                     uint64_t seed);

}  // namespace regstop
