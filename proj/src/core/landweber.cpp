#include "core/landweber.hpp"

#include <cmath>
#include <limits>

namespace regstop {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::domain_violation: return "domain_violation";
    case Termination::radius_exceeded: return "radius_exceeded";
    case Termination::residual_blowup: return "residual_blowup";
    case Termination::non_finite: return "non_finite";
  }
  return "unknown";
}

GridFunction landweber_step(const Problem& p, const GridFunction& x,
                            const GridFunction& y_delta, double omega) {
  const GridFunction residual = subtract(y_delta, p.apply(x));
  GridFunction next = x;
  axpy(omega, p.adjoint(x, residual), next);
  return next;
}

namespace {

/// One replay of the iterate sequence with a cached forward value. Both
/// passes run the identical update, so they see bitwise-identical iterates
/// and trip the same guard at the same sequence index.
struct Stream {
  GridFunction x;
  GridFunction fx;
  double resid = 0.0;
  long long index = 0;
  bool alive = true;
};

}  // namespace

PairedTrace run_paired(const Problem& p, const GridFunction& y_delta, const GridFunction& x0,
                       const IterationConfig& cfg, const GridFunction* x_dagger) {
  if (!(cfg.omega > 0.0)) throw std::invalid_argument("run_paired: omega must be positive");
  if (cfg.kmax < 1) throw std::invalid_argument("run_paired: kmax must be at least 1");
  if (y_delta.grid != p.range().grid()) throw std::invalid_argument("run_paired: data grid mismatch");
  {
    const DomainCheck dc = p.domain_check(x0);
    if (!dc.inside) throw std::invalid_argument("run_paired: x0 outside domain: " + dc.reason);
  }
  if (x_dagger && x_dagger->grid != p.domain().grid())
    throw std::invalid_argument("run_paired: reference solution grid mismatch");

  const InnerProduct& xip = p.domain();
  const InnerProduct& yip = p.range();

  PairedTrace trace;
  trace.residual_norm.reserve(static_cast<size_t>(cfg.kmax) + 1);
  trace.qo.reserve(static_cast<size_t>(cfg.kmax) + 1);

  auto record_termination = [&](Termination why, long long at) {
    if (trace.termination == Termination::completed) {
      trace.termination = why;
      trace.termination_index = at;
    }
  };

  auto start = [&](Stream& s) {
    s.x = x0;
    s.fx = p.apply(s.x);
    ++trace.forward_evals;
    s.resid = yip.norm(subtract(y_delta, s.fx));
    s.index = 0;
    s.alive = true;
  };

  Stream tortoise, hare;
  start(tortoise);
  start(hare);

  const double blowup_cap =
      cfg.residual_blowup > 0.0 ? cfg.residual_blowup * tortoise.resid
                                : std::numeric_limits<double>::infinity();

  // Advances one stream by a single step; on a guard trip the stream keeps
  // its last valid state and only flips its liveness.
  auto advance = [&](Stream& s, long long& steps) {
    GridFunction next = s.x;
    axpy(cfg.omega, p.adjoint(s.x, subtract(y_delta, s.fx)), next);
    ++trace.adjoint_evals;
    ++steps;
    const long long j = s.index + 1;

    if (!all_finite(next.values)) {
      record_termination(Termination::non_finite, j);
      s.alive = false;
      return;
    }
    const DomainCheck dc = p.domain_check(next);
    if (!dc.inside) {
      record_termination(Termination::domain_violation, j);
      s.alive = false;
      return;
    }
    if (cfg.divergence_radius > 0.0 && xip.norm(subtract(next, x0)) > cfg.divergence_radius) {
      record_termination(Termination::radius_exceeded, j);
      s.alive = false;
      return;
    }
    GridFunction fnext = p.apply(next);
    ++trace.forward_evals;
    if (!all_finite(fnext.values)) {
      record_termination(Termination::non_finite, j);
      s.alive = false;
      return;
    }
    const double rnext = yip.norm(subtract(y_delta, fnext));
    if (rnext > blowup_cap) {
      record_termination(Termination::residual_blowup, j);
      s.alive = false;
      return;
    }
    s.x = std::move(next);
    s.fx = std::move(fnext);
    s.resid = rnext;
    s.index = j;
  };

  for (int k = 0;; ++k) {
    trace.residual_norm.push_back(tortoise.resid);
    trace.dist_to_x0.push_back(xip.norm(subtract(tortoise.x, x0)));
    if (x_dagger) trace.error.push_back(xip.norm(subtract(tortoise.x, *x_dagger)));
    if (hare.alive) {
      const GridFunction gap = subtract(hare.x, tortoise.x);
      trace.qo.push_back(xip.norm(gap));
      trace.ls.push_back(xip.inner(tortoise.x, gap));
      trace.hr_pair.push_back(yip.inner(subtract(y_delta, hare.fx), subtract(y_delta, tortoise.fx)));
    }
    if (k == cfg.kmax) break;

    if (hare.alive) {
      advance(hare, trace.hare_steps);
      if (hare.alive) advance(hare, trace.hare_steps);
    }
    advance(tortoise, trace.tortoise_steps);
    if (!tortoise.alive) break;
  }
  return trace;
}

double auto_stepsize(const Problem& p, const GridFunction& x_ref, double safety, int iters,
                     double tol) {
  if (!(safety > 0.0)) throw std::invalid_argument("auto_stepsize: safety must be positive");
  const double opnorm = estimate_opnorm(
      [&](const GridFunction& h) { return p.deriv(x_ref, h); },
      [&](const GridFunction& r) { return p.adjoint(x_ref, r); }, p.domain(), iters, tol);
  if (!(opnorm > 0.0))
    throw std::runtime_error("auto_stepsize: derivative norm vanished at the reference point");
  return safety / (opnorm * opnorm);
}

}  // namespace regstop
