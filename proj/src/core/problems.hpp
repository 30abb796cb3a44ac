#pragma once

#include <string>
#include <vector>

#include "core/operator.hpp"

namespace regstop {

/// F(x)(s) = int_0^s x(t)^3 dt on a nodal grid, H1 domain, L2 range.
/// The domain keeps samples bounded away from zero.
ProblemPtr make_hammerstein(int n = 128);

/// Recover the coefficient a in -(a u')' = f, u(0) = u(1) = 0, from the
/// solution u. H1 domain, L2 range, both on the same nodal grid; benchmark
/// data is produced on a fine_factor-times finer grid and restricted.
ProblemPtr make_diffusion1d(int n = 50, int fine_factor = 4);

/// Periodic auto-convolution F(x) = x * x on a uniform periodic grid,
/// L2 domain and range.
ProblemPtr make_autoconv(int n = 60);

struct ProblemOptions {
  int n = 0;            // 0 keeps the problem default
  int fine_factor = 0;  // 0 keeps the default; only diffusion1d reads it
};

/// Registry order is fixed, which keeps every listing deterministic.
const std::vector<std::string>& problem_names();

/// Builds a registered problem by name; unknown names report the registry.
ProblemPtr make_problem(const std::string& name, const ProblemOptions& opts = {});

/// Discrete solver behind diffusion1d, exposed for convergence studies:
/// piecewise-linear elements, the coefficient averaged onto cell midpoints,
/// consistent-mass load, zero Dirichlet values. a and f are nodal samples;
/// the result carries the boundary zeros.
std::vector<double> diffusion_solve(const Grid& grid, const std::vector<double>& a,
                                    const std::vector<double>& f);

}  // namespace regstop
