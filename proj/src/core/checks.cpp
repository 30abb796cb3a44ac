#include "core/checks.hpp"

#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace regstop {

void Problem::require_domain_point(const GridFunction& x) const {
  if (x.grid != domain().grid()) throw std::invalid_argument(name() + ": domain grid mismatch");
  if (!all_finite(x.values)) throw std::invalid_argument(name() + ": non-finite domain point");
}

void Problem::require_range_point(const GridFunction& y) const {
  if (y.grid != range().grid()) throw std::invalid_argument(name() + ": range grid mismatch");
  if (!all_finite(y.values)) throw std::invalid_argument(name() + ": non-finite range point");
}

GridFunction Problem::sample_domain_point(uint64_t seed) const {
  // smooth low-frequency perturbation around the reference solution; the
  // default amplitude keeps all three shipped problems well inside their
  // domains, problems with tighter constraints override
  const GridFunction& base = benchmark().x_dagger;
  CounterRng rng(seed, 7);
  GridFunction x = base;
  const double two_pi = 6.283185307179586476925286766559;
  for (int m = 1; m <= 5; ++m) {
    const double a = 0.2 * (2.0 * rng.uniform(static_cast<uint64_t>(2 * m)) - 1.0) / m;
    const double b = 0.2 * (2.0 * rng.uniform(static_cast<uint64_t>(2 * m + 1)) - 1.0) / m;
    for (int i = 0; i < x.size(); ++i) {
      const double s = x.grid.point(i);
      x.values[static_cast<size_t>(i)] += a * std::cos(two_pi * m * s) + b * std::sin(two_pi * m * s);
    }
  }
  const DomainCheck dc = domain_check(x);
  if (!dc.inside) throw std::runtime_error(name() + ": sampled point left the domain: " + dc.reason);
  return x;
}

std::vector<double> default_fd_steps() {
  std::vector<double> steps;
  for (int e = 1; e <= 8; ++e) steps.push_back(std::pow(10.0, -e));
  return steps;
}

FdReport fd_derivative_check(const Problem& p, const GridFunction& x, const GridFunction& h,
                             const std::vector<double>& steps) {
  if (steps.empty()) throw std::invalid_argument("fd_derivative_check: empty step list");
  const InnerProduct& y_ip = p.range();
  const GridFunction jh = p.deriv(x, h);
  const double scale = y_ip.norm(jh);

  FdReport rep;
  rep.best_rel_err = std::numeric_limits<double>::infinity();
  for (double t : steps) {
    if (!(t > 0.0)) throw std::invalid_argument("fd_derivative_check: steps must be positive");
    GridFunction xp = x;
    axpy(t, h, xp);
    GridFunction xm = x;
    axpy(-t, h, xm);
    if (!p.domain_check(xp).inside || !p.domain_check(xm).inside) {
      rep.steps.push_back({t, 0.0, true});
      continue;
    }
    GridFunction diff = subtract(p.apply(xp), p.apply(xm));
    for (double& v : diff.values) v /= 2.0 * t;
    axpy(-1.0, jh, diff);
    const double err = y_ip.norm(diff);
    const double rel = scale > 0.0 ? err / scale : err;
    rep.steps.push_back({t, rel, false});
    rep.best_rel_err = std::min(rep.best_rel_err, rel);
  }
  if (!std::isfinite(rep.best_rel_err))
    throw std::runtime_error("fd_derivative_check: every step left the domain");
  return rep;
}

double adjoint_check(const Problem& p, const GridFunction& x, int trials, uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("adjoint_check: trials must be positive");
  const InnerProduct& x_ip = p.domain();
  const InnerProduct& y_ip = p.range();
  constexpr double tiny = 1e-300;

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction h = make_function(x_ip.grid(), x_ip.space());
    h.values = gaussian_vector(seed, static_cast<uint64_t>(2 * t), h.size());
    GridFunction r = make_function(y_ip.grid(), y_ip.space());
    r.values = gaussian_vector(seed, static_cast<uint64_t>(2 * t + 1), r.size());

    const GridFunction jh = p.deriv(x, h);
    const double njh = y_ip.norm(jh);

    const auto defect = [&](const GridFunction& rr) {
      const double lhs = y_ip.inner(jh, rr);
      const double rhs = x_ip.inner(h, p.adjoint(x, rr));
      return std::abs(lhs - rhs) / (njh * y_ip.norm(rr) + tiny);
    };

    worst = std::max(worst, defect(r));
    if (njh > 0.0) worst = std::max(worst, defect(jh));
  }
  return worst;
}

}  // namespace regstop
