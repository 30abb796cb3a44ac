#include "support/reference.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

namespace regstop {
namespace testref {

StoredRun run_stored(const Problem& p, const GridFunction& y_delta,
                     const GridFunction& x0, const IterationConfig& cfg,
                     const GridFunction* x_dagger) {
  if (!(cfg.omega > 0.0)) throw std::invalid_argument("run_stored: omega must be positive");
  if (cfg.kmax < 1) throw std::invalid_argument("run_stored: kmax must be at least 1");

  const InnerProduct& xip = p.domain();
  const InnerProduct& yip = p.range();

  StoredRun run;
  run.x.push_back(x0);
  run.fx.push_back(p.apply(x0));

  const double r0 = yip.norm(subtract(y_delta, run.fx[0]));
  const double blowup_cap = cfg.residual_blowup > 0.0
                                ? cfg.residual_blowup * r0
                                : std::numeric_limits<double>::infinity();

  const long long seq_end = 2LL * cfg.kmax;
  for (long long j = 1; j <= seq_end; ++j) {
    GridFunction next = run.x.back();
    axpy(cfg.omega, p.adjoint(run.x.back(), subtract(y_delta, run.fx.back())), next);
    if (!all_finite(next.values)) {
      run.termination = Termination::non_finite;
      run.termination_index = j;
      break;
    }
    const DomainCheck dc = p.domain_check(next);
    if (!dc.inside) {
      run.termination = Termination::domain_violation;
      run.termination_index = j;
      break;
    }
    if (cfg.divergence_radius > 0.0 && xip.norm(subtract(next, x0)) > cfg.divergence_radius) {
      run.termination = Termination::radius_exceeded;
      run.termination_index = j;
      break;
    }
    GridFunction fnext = p.apply(next);
    if (!all_finite(fnext.values)) {
      run.termination = Termination::non_finite;
      run.termination_index = j;
      break;
    }
    if (yip.norm(subtract(y_delta, fnext)) > blowup_cap) {
      run.termination = Termination::residual_blowup;
      run.termination_index = j;
      break;
    }
    run.x.push_back(std::move(next));
    run.fx.push_back(std::move(fnext));
  }

  const long long last = static_cast<long long>(run.x.size()) - 1;
  const long long tortoise_end = std::min<long long>(cfg.kmax, last);
  for (long long k = 0; k <= tortoise_end; ++k) {
    const size_t i = static_cast<size_t>(k);
    run.residual_norm.push_back(yip.norm(subtract(y_delta, run.fx[i])));
    run.dist_to_x0.push_back(xip.norm(subtract(run.x[i], x0)));
    if (x_dagger) run.error.push_back(xip.norm(subtract(run.x[i], *x_dagger)));
  }
  const long long paired_end = std::min<long long>(cfg.kmax, last / 2);
  for (long long k = 0; k <= paired_end; ++k) {
    const size_t i = static_cast<size_t>(k);
    const size_t i2 = static_cast<size_t>(2 * k);
    const GridFunction gap = subtract(run.x[i2], run.x[i]);
    run.qo.push_back(xip.norm(gap));
    run.ls.push_back(xip.inner(run.x[i], gap));
    run.hr_pair.push_back(
        yip.inner(subtract(y_delta, run.fx[i2]), subtract(y_delta, run.fx[i])));
  }
  return run;
}

StubProblem::StubProblem(int n, std::string name)
    : name_(std::move(name)), ip_(InnerProduct::l2(make_grid(n, Layout::nodal))) {
  apply_ = [](const GridFunction& x) { return x; };
  deriv_ = [](const GridFunction&, const GridFunction& h) { return h; };
  adjoint_ = [](const GridFunction&, const GridFunction& r) { return r; };
  fence_ = [](const GridFunction&) { return DomainCheck{}; };
  bench_.x_dagger = make_function(ip_.grid(), Space::l2);
  bench_.x0 = make_function(ip_.grid(), Space::l2);
}

StubProblem make_diagonal_stub(const std::vector<double>& d, const std::vector<double>& c) {
  if (d.size() != c.size() || d.size() < 3)
    throw std::invalid_argument("make_diagonal_stub: need matching sizes, at least 3 samples");
  StubProblem p(static_cast<int>(d.size()) - 1, "diagonal_stub");
  p.apply_ = [d, c](const GridFunction& x) {
    GridFunction out = x;
    for (int i = 0; i < out.size(); ++i)
      out.values[i] = d[static_cast<size_t>(i)] * x.values[i] +
                      c[static_cast<size_t>(i)] * x.values[i] * x.values[i];
    return out;
  };
  p.deriv_ = [d, c](const GridFunction& x, const GridFunction& h) {
    GridFunction out = h;
    for (int i = 0; i < out.size(); ++i)
      out.values[i] = (d[static_cast<size_t>(i)] + 2.0 * c[static_cast<size_t>(i)] * x.values[i]) *
                      h.values[i];
    return out;
  };
  p.adjoint_ = [d, c](const GridFunction& x, const GridFunction& r) {
    GridFunction out = r;
    for (int i = 0; i < out.size(); ++i)
      out.values[i] = (d[static_cast<size_t>(i)] + 2.0 * c[static_cast<size_t>(i)] * x.values[i]) *
                      r.values[i];
    return out;
  };
  return p;
}

}  // namespace testref
}  // namespace regstop
