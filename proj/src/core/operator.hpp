#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/spaces.hpp"

namespace regstop {

struct DomainCheck {
  bool inside = true;
  std::string reason;  // empty when inside
};

/// Reference setup shipped with each problem: exact solution, initial
/// guess, discrepancy factor and the default experiment ranges. kmax is
/// sized so the error minimum sits inside the budget on the shipped noise
/// levels; k_min_search skips the range where every heuristic functional
/// is still climbing out of its spurious start (both were tuned on the
/// shipped benchmarks and are plain defaults, not constraints).
struct BenchmarkSetup {
  GridFunction x_dagger;
  GridFunction x0;
  double tau = 1.1;
  std::vector<double> delta_rel_list;  // descending would be a lie; stored ascending
  int kmax = 5000;
  int k_min_search = 10;
};

/// A nonlinear forward operator F between two grid-based Hilbert spaces,
/// with its Frechet derivative and the exact adjoint of that derivative.
/// Implementations are immutable after construction and hold no mutable
/// caches, so one instance can serve concurrent runs.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual const std::string& name() const = 0;
  virtual const InnerProduct& domain() const = 0;  // X
  virtual const InnerProduct& range() const = 0;   // Y

  virtual GridFunction apply(const GridFunction& x) const = 0;
  virtual GridFunction deriv(const GridFunction& x, const GridFunction& h) const = 0;
  virtual GridFunction adjoint(const GridFunction& x, const GridFunction& r) const = 0;
  virtual DomainCheck domain_check(const GridFunction& x) const = 0;

  virtual const BenchmarkSetup& benchmark() const = 0;

  /// Exact data for the benchmark solution. Problems that need to dodge the
  /// inverse crime generate on a finer grid and restrict here.
  virtual GridFunction synthesize_data() const { return apply(benchmark().x_dagger); }

  /// A random point well inside the domain, for operator gate checks.
  virtual GridFunction sample_domain_point(uint64_t seed) const;

 protected:
  void require_domain_point(const GridFunction& x) const;
  void require_range_point(const GridFunction& y) const;
};

using ProblemPtr = std::shared_ptr<const Problem>;

}  // namespace regstop
