// Acceptance gates for the toolkit, one line per criterion:
//
//   [PASS] criterion N: <label> ... [12.3s]
//   [FAIL] criterion N: <label>: <first failing check> [12.3s]
//
// The exit code is the number of failed criteria. Every numeric limit and
// every wall-time budget is pinned right here, next to the check it gates,
// so a drift in behavior or speed turns red without any external config.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "core/checks.hpp"
#include "core/diagnostics.hpp"
#include "core/experiment.hpp"
#include "core/landweber.hpp"
#include "core/problems.hpp"
#include "core/rng.hpp"
#include "core/rules.hpp"
#include "support/reference.hpp"

using namespace regstop;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  std::string label;
  double budget_s = 0.0;
  std::string failure;  // empty until the first failed check
  std::string note;     // measurements shown on the PASS line
  double seconds = 0.0;
};

/// Records the first failing check; later ones would usually be noise
/// caused by the first.
void expect(Outcome& o, bool ok, const std::string& what) {
  if (!ok && o.failure.empty()) o.failure = what;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

GridFunction sampled(const Grid& grid, Space space, const std::function<double(double)>& f) {
  GridFunction out = make_function(grid, space);
  for (int i = 0; i < out.size(); ++i)
    out.values[static_cast<size_t>(i)] = f(grid.point(i));
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return kInf;
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// Worst relative gap, with an absolute floor of 1 so near-zero entries
/// compare absolutely.
double rel_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return kInf;
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

/* ------------------------------------------------------------------ */
/* criterion 1: derivative and adjoint gates on every problem          */

void criterion_gates(Outcome& o) {
  constexpr double kAdjointLimit = 1e-10;
  struct Case {
    ProblemPtr p;
    double fd_limit;
  };
  const Case cases[] = {
      {make_hammerstein(), 1e-6},
      {make_diffusion1d(), 1e-6},
      {make_autoconv(), 1e-12},  // quadratic map, central differences are exact
  };
  double worst_fd = 0.0, worst_adj = 0.0;
  for (const Case& c : cases) {
    const Problem& p = *c.p;
    std::vector<GridFunction> points = {p.benchmark().x_dagger, p.benchmark().x0};
    for (uint64_t s = 1; s <= 5; ++s) points.push_back(p.sample_domain_point(s));
    for (size_t i = 0; i < points.size(); ++i) {
      GridFunction h = make_function(p.domain().grid(), p.domain().space());
      h.values = gaussian_vector(derive_seed(77, i), 1, h.size());
      const double fd = fd_derivative_check(p, points[i], h, default_fd_steps()).best_rel_err;
      const double adj = adjoint_check(p, points[i], 20, 101 + static_cast<uint64_t>(i));
      expect(o, fd <= c.fd_limit,
             p.name() + " derivative error " + fmt(fd) + " at point " + std::to_string(i) +
                 " exceeds " + fmt(c.fd_limit));
      expect(o, adj <= kAdjointLimit,
             p.name() + " adjoint defect " + fmt(adj) + " at point " + std::to_string(i) +
                 " exceeds " + fmt(kAdjointLimit));
      if (c.p == cases[2].p) continue;
      worst_fd = std::max(worst_fd, fd);
      worst_adj = std::max(worst_adj, adj);
    }
  }
  o.note = "worst non-quadratic fd " + fmt(worst_fd) + ", worst adjoint " + fmt(worst_adj);
}

/* ------------------------------------------------------------------ */
/* criterion 2: closed-form oracles for each forward solver            */

void criterion_analytic(Outcome& o) {
  constexpr double kExact = 1e-12;
  constexpr double kOrderSlack = 0.2;
  constexpr double kPi = 3.14159265358979323846;
  constexpr double kTwoPi = 6.28318530717958647692;

  // the unit coefficient with constant load 2 has the parabola s(1-s)
  {
    const Grid grid = make_grid(40, Layout::nodal);
    const std::vector<double> a(41, 1.0), f(41, 2.0);
    const std::vector<double> u = diffusion_solve(grid, a, f);
    std::vector<double> exact(41);
    for (int i = 0; i <= 40; ++i) exact[static_cast<size_t>(i)] = grid.point(i) * (1.0 - grid.point(i));
    const double gap = max_abs_diff(u, exact);
    expect(o, gap <= kExact, "diffusion parabola gap " + fmt(gap));
  }

  // the sine load converges at second order in the grid spacing
  std::vector<double> errs;
  for (int n : {25, 50, 100}) {
    const Grid grid = make_grid(n, Layout::nodal);
    std::vector<double> a(static_cast<size_t>(n + 1), 1.0);
    std::vector<double> f(static_cast<size_t>(n + 1));
    std::vector<double> exact(static_cast<size_t>(n + 1));
    for (int i = 0; i <= n; ++i) {
      f[static_cast<size_t>(i)] = kPi * kPi * std::sin(kPi * grid.point(i));
      exact[static_cast<size_t>(i)] = std::sin(kPi * grid.point(i));
    }
    errs.push_back(max_abs_diff(diffusion_solve(grid, a, f), exact));
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  expect(o, std::abs(order1 - 2.0) <= kOrderSlack, "convergence order " + fmt(order1));
  expect(o, std::abs(order2 - 2.0) <= kOrderSlack, "convergence order " + fmt(order2));

  // the cosine self-convolves to half its own amplitude
  {
    const ProblemPtr p = make_autoconv(24);
    const GridFunction x =
        sampled(p->domain().grid(), p->domain().space(), [&](double s) { return std::cos(kTwoPi * s); });
    const GridFunction y = p->apply(x);
    const GridFunction expected = sampled(
        p->range().grid(), p->range().space(), [&](double s) { return 0.5 * std::cos(kTwoPi * s); });
    const double gap = max_abs_diff(y.values, expected.values);
    expect(o, gap <= kExact, "autoconv cosine gap " + fmt(gap));
  }

  // the constant two integrates to the line 8s
  {
    const ProblemPtr p = make_hammerstein(32);
    const GridFunction x = make_function(p->domain().grid(), p->domain().space(), 2.0);
    const GridFunction y = p->apply(x);
    const GridFunction expected =
        sampled(p->range().grid(), p->range().space(), [](double s) { return 8.0 * s; });
    const double gap = max_abs_diff(y.values, expected.values);
    expect(o, gap <= kExact, "hammerstein line gap " + fmt(gap));
  }
  o.note = "orders " + fmt(order1) + ", " + fmt(order2);
}

/* ------------------------------------------------------------------ */
/* criterion 3: the O(1)-memory pairing equals a store-all run         */

void criterion_paired(Outcome& o) {
  constexpr double kRel = 1e-12;
  constexpr int kKmax = 50;
  struct Case {
    ProblemPtr p;
    double delta_rel;
  };
  const Case cases[] = {
      {make_hammerstein(64), 1e-3},
      {make_diffusion1d(25, 4), 1e-3},
      {make_autoconv(32), 1e-4},
  };
  double worst = 0.0;
  for (const Case& c : cases) {
    const Problem& p = *c.p;
    const NoisyData noisy = add_noise(p.synthesize_data(), c.delta_rel, 2);
    IterationConfig cfg;
    cfg.omega = auto_stepsize(p, p.benchmark().x_dagger);
    cfg.kmax = kKmax;
    const PairedTrace fast = run_paired(p, noisy.y_delta, p.benchmark().x0, cfg,
                                        &p.benchmark().x_dagger);
    const testref::StoredRun slow = testref::run_stored(p, noisy.y_delta, p.benchmark().x0, cfg,
                                                        &p.benchmark().x_dagger);
    expect(o, fast.termination == slow.termination, p.name() + ": terminations differ");
    const std::pair<const std::vector<double>*, const std::vector<double>*> series[] = {
        {&fast.residual_norm, &slow.residual_norm}, {&fast.error, &slow.error},
        {&fast.dist_to_x0, &slow.dist_to_x0},       {&fast.qo, &slow.qo},
        {&fast.ls, &slow.ls},                       {&fast.hr_pair, &slow.hr_pair},
    };
    for (const auto& [a, b] : series) {
      const double gap = rel_gap(*a, *b);
      expect(o, gap <= kRel, p.name() + ": series gap " + fmt(gap));
      worst = std::max(worst, gap);
    }
  }
  o.note = "worst relative gap " + fmt(worst);
}

/* ------------------------------------------------------------------ */
/* criterion 4: rule selection against exhaustive scans                */

void criterion_rules(Outcome& o, const std::vector<const ExperimentReport*>& reports) {
  // (a) window minimizer vs a brute-force scan on random series
  constexpr int kSeries = 1000;
  for (int s = 0; s < kSeries && o.failure.empty(); ++s) {
    const CounterRng rng(0x5ca1ab1e, static_cast<uint64_t>(s));
    const int len = 1 + static_cast<int>(rng.word(0) % 60);
    PsiSeries psi;
    psi.rule = Rule::qo;
    psi.first_k = 1;
    psi.values.resize(static_cast<size_t>(len));
    // two-decimal values force plenty of exact ties
    for (int i = 0; i < len; ++i)
      psi.values[static_cast<size_t>(i)] = std::floor(rng.uniform(10 + static_cast<uint64_t>(i)) * 100.0) / 100.0;
    const int k_min = 1 + static_cast<int>(rng.word(1) % static_cast<uint64_t>(len));
    const int k_max = k_min + static_cast<int>(rng.word(2) % static_cast<uint64_t>(len - k_min + 1));

    int best = k_min;
    for (int k = k_min + 1; k <= k_max; ++k)
      if (psi.at(k) < psi.at(best)) best = k;

    const RuleDecision d = select_kstar(psi, k_min, k_max);
    expect(o, d.attained, "series " + std::to_string(s) + ": not attained");
    expect(o, d.k_star == best,
           "series " + std::to_string(s) + ": k* " + std::to_string(d.k_star) + " vs scan " +
               std::to_string(best));
    expect(o, d.psi_at_kstar == psi.at(best), "series " + std::to_string(s) + ": psi mismatch");
    expect(o, d.boundary_hit == (best == k_min || best == k_max),
           "series " + std::to_string(s) + ": boundary flag");
  }

  // (b) discrepancy principle vs a linear scan
  constexpr int kResidualSeries = 300;
  for (int s = 0; s < kResidualSeries && o.failure.empty(); ++s) {
    const CounterRng rng(0xd15c, static_cast<uint64_t>(s));
    const int len = 1 + static_cast<int>(rng.word(0) % 80);
    PairedTrace t;
    t.residual_norm.resize(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i)
      t.residual_norm[static_cast<size_t>(i)] = rng.uniform(5 + static_cast<uint64_t>(i)) * 10.0;
    const double level = rng.uniform(2) * 10.0;

    int first = -1;
    for (int k = 0; k < len; ++k)
      if (t.residual_norm[static_cast<size_t>(k)] <= level) {
        first = k;
        break;
      }

    const RuleDecision d = discrepancy_stop(t, 1.0, level);
    expect(o, d.attained == (first >= 0), "dp series " + std::to_string(s) + ": attainment");
    if (first >= 0) {
      expect(o, d.k_star == first, "dp series " + std::to_string(s) + ": crossing index");
      expect(o, d.psi_at_kstar == t.residual_norm[static_cast<size_t>(first)],
             "dp series " + std::to_string(s) + ": residual value");
    }
  }

  // (c) on every benchmark cell the oracle error bounds every attained rule
  int cells = 0;
  for (const ExperimentReport* rep : reports) {
    for (const ReportRow& opt_row : rep->rows) {
      if (opt_row.rule != Rule::opt) continue;
      ++cells;
      expect(o, opt_row.attained, rep->config.problem + ": oracle row not attained");
      if (!opt_row.attained) continue;
      expect(o, opt_row.error_ratio == 1.0, rep->config.problem + ": oracle ratio not one");
      for (const ReportRow& r : rep->rows) {
        if (r.rule == Rule::opt || !r.attained) continue;
        if (r.delta_rel != opt_row.delta_rel || r.seed != opt_row.seed) continue;
        expect(o, r.abs_error >= opt_row.abs_error,
               rep->config.problem + " " + to_string(r.rule) + ": error below the oracle");
      }
    }
  }
  o.note = std::to_string(kSeries) + " windows, " + std::to_string(kResidualSeries) +
           " crossings, " + std::to_string(cells) + " cells dominated";
}

/* ------------------------------------------------------------------ */
/* criteria 5-7: behavior of the shipped benchmark sweeps              */

std::vector<double> distinct_deltas(const ExperimentReport& rep) {
  std::vector<double> out;  // report order, so descending
  for (const ReportRow& r : rep.rows)
    if (out.empty() || out.back() != r.delta_rel) out.push_back(r.delta_rel);
  return out;
}

std::vector<const ReportRow*> rows_of(const ExperimentReport& rep, Rule rule) {
  std::vector<const ReportRow*> out;
  for (const ReportRow& r : rep.rows)
    if (r.rule == rule) out.push_back(&r);
  return out;
}

/// Error ratios with not-attained rows counted as infinite, so silent
/// attainment regressions push the median instead of vanishing from it.
double ratio_median(const ExperimentReport& rep, Rule rule) {
  std::vector<double> v;
  for (const ReportRow* r : rows_of(rep, rule)) v.push_back(r->attained ? r->error_ratio : kInf);
  return median(v);
}

void criterion_hammerstein(Outcome& o, const ExperimentReport& rep) {
  constexpr double kMedianLimit = 3.0;
  constexpr double kSpuriousRatio = 5.0;

  for (Rule rule : {Rule::qo, Rule::ls})
    for (const ReportRow* r : rows_of(rep, rule)) {
      expect(o, r->attained, std::string(to_string(rule)) + " not attained at delta " +
                                 fmt(r->delta_rel) + " seed " + std::to_string(r->seed));
      expect(o, !r->boundary_hit, std::string(to_string(rule)) + " on the window edge at delta " +
                                      fmt(r->delta_rel) + " seed " + std::to_string(r->seed));
    }

  const std::vector<double> deltas = distinct_deltas(rep);
  expect(o, deltas.size() >= 3, "too few noise levels");
  if (!deltas.empty()) {
    const double largest = deltas.front();
    const double small_a = deltas[deltas.size() - 1];
    const double small_b = deltas[deltas.size() - 2];
    for (Rule rule : {Rule::hd, Rule::hr})
      for (const ReportRow* r : rows_of(rep, rule)) {
        if (r->delta_rel == small_a || r->delta_rel == small_b) {
          // at the two cleanest levels the residual heuristics work
          expect(o, r->attained && !r->boundary_hit,
                 std::string(to_string(rule)) + " not interior at delta " + fmt(r->delta_rel) +
                     " seed " + std::to_string(r->seed));
        } else if (r->delta_rel == largest) {
          // at the noisiest level they collapse to the window edge or to a
          // spurious early minimum; either way the flagging must show it
          const bool flagged =
              !r->attained || r->boundary_hit || r->error_ratio > kSpuriousRatio;
          expect(o, flagged, std::string(to_string(rule)) + " silently plausible at delta " +
                                 fmt(r->delta_rel) + " seed " + std::to_string(r->seed));
        }
      }
  }

  const double qo_med = ratio_median(rep, Rule::qo);
  const double ls_med = ratio_median(rep, Rule::ls);
  expect(o, qo_med <= kMedianLimit, "qo median error ratio " + fmt(qo_med));
  expect(o, ls_med <= kMedianLimit, "ls median error ratio " + fmt(ls_med));
  o.note = "qo med " + fmt(qo_med) + ", ls med " + fmt(ls_med);
}

void criterion_diffusion(Outcome& o, const ExperimentReport& rep) {
  constexpr double kMedianLimit = 2.0;
  constexpr int kAllowedInversions = 1;

  for (const ReportRow* r : rows_of(rep, Rule::dp))
    expect(o, r->attained, "dp not attained at delta " + fmt(r->delta_rel) + " seed " +
                               std::to_string(r->seed));

  // per-level medians of the dp error must track the noise downward
  const std::vector<double> deltas = distinct_deltas(rep);
  std::vector<double> dp_medians;
  for (double d : deltas) {
    std::vector<double> errs;
    for (const ReportRow* r : rows_of(rep, Rule::dp))
      if (r->delta_rel == d && r->attained) errs.push_back(r->abs_error);
    dp_medians.push_back(median(errs));
  }
  int inversions = 0;
  for (size_t i = 0; i + 1 < dp_medians.size(); ++i)
    if (dp_medians[i + 1] > dp_medians[i] * (1.0 + 1e-12)) ++inversions;
  expect(o, inversions <= kAllowedInversions,
         std::to_string(inversions) + " median inversions across noise levels");

  const double qo_med = ratio_median(rep, Rule::qo);
  const double ls_med = ratio_median(rep, Rule::ls);
  expect(o, qo_med <= kMedianLimit, "qo median error ratio " + fmt(qo_med));
  expect(o, ls_med <= kMedianLimit, "ls median error ratio " + fmt(ls_med));
  o.note = "dp attained everywhere, " + std::to_string(inversions) + " inversion(s), qo med " +
           fmt(qo_med) + ", ls med " + fmt(ls_med);
}

void criterion_autoconv(Outcome& o, const ExperimentReport& rep) {
  constexpr double kMedianLimit = 2.0;

  for (const ReportRow* r : rows_of(rep, Rule::hd)) {
    expect(o, r->attained, "hd not attained at delta " + fmt(r->delta_rel) + " seed " +
                               std::to_string(r->seed));
    expect(o, !r->boundary_hit, "hd on the window edge at delta " + fmt(r->delta_rel) + " seed " +
                                    std::to_string(r->seed));
  }
  const double hd_med = ratio_median(rep, Rule::hd);
  expect(o, hd_med <= kMedianLimit, "hd median error ratio " + fmt(hd_med));

  // the paired heuristics never recover on this problem; the boundary flag
  // is the advertised tell, so it must fire in every cell
  for (Rule rule : {Rule::qo, Rule::ls})
    for (const ReportRow* r : rows_of(rep, rule))
      expect(o, r->attained && r->boundary_hit,
             std::string(to_string(rule)) + " not flagged at delta " + fmt(r->delta_rel) +
                 " seed " + std::to_string(r->seed));

  o.note = "hd med " + fmt(hd_med) + ", qo/ls flagged everywhere";
}

/* ------------------------------------------------------------------ */
/* criterion 8: spectral diagnostics against brute force               */

double brute_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? kInf : 0.0;
}

ScanResult brute_muckenhoupt(const SingularSystem& ss, int p, const std::vector<double>& grid) {
  ScanResult out;
  double best = -kInf;
  for (double t : grid) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < ss.sigma.size(); ++i) {
      const double s2 = ss.sigma[i] * ss.sigma[i];
      const double e2 = ss.noise_coeffs[i] * ss.noise_coeffs[i];
      if (s2 >= t)
        num += e2 / s2;
      else
        den += std::pow(s2 / t, p - 1) * e2;
    }
    const double ratio = brute_ratio(t * num, den);
    if (ratio > best) {
      best = ratio;
      out.worst_t = t;
    }
  }
  out.constant = best;
  return out;
}

ScanResult brute_regularity(const SingularSystem& ss, int p, FilterKind filter,
                            const std::vector<double>& grid) {
  ScanResult out;
  double best = -kInf;
  for (double t : grid) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < ss.sigma.size(); ++i) {
      const double s2 = ss.sigma[i] * ss.sigma[i];
      const double x2 = ss.sol_coeffs[i] * ss.sol_coeffs[i];
      if (s2 <= t) {
        num += x2;
      } else {
        const double r = filter == FilterKind::tikhonov ? t / (t + s2)
                                                        : std::pow(std::max(0.0, 1.0 - s2), 1.0 / t);
        den += std::pow(s2 / t, p - 1) * r * r * x2;
      }
    }
    const double ratio = brute_ratio(num, den);
    if (ratio > best) {
      best = ratio;
      out.worst_t = t;
    }
  }
  out.constant = best;
  return out;
}

bool scan_close(const ScanResult& a, const ScanResult& b, double rel) {
  if (a.worst_t != b.worst_t) return false;
  if (std::isinf(a.constant) || std::isinf(b.constant))
    return std::isinf(a.constant) && std::isinf(b.constant);
  return std::abs(a.constant - b.constant) <= rel * std::max(std::abs(a.constant), std::abs(b.constant));
}

void criterion_diagnostics(Outcome& o) {
  constexpr double kRel = 1e-12;
  constexpr int kModes = 200;

  SingularSystem ss;
  const CounterRng rng(2024, 1);
  for (int i = 1; i <= kModes; ++i) {
    ss.sigma.push_back(1.0 / i);
    ss.noise_coeffs.push_back(0.1 + rng.uniform(static_cast<uint64_t>(2 * i)));
    ss.sol_coeffs.push_back(0.1 + rng.uniform(static_cast<uint64_t>(2 * i + 1)));
  }
  ss.t0 = 1.0;

  const std::vector<double> mc_grid = muckenhoupt_t_grid(ss);
  const std::vector<double> reg_grid = regularity_t_grid(ss);
  const SingularSystem ss1 = rescale_sigma(ss);
  const std::vector<double> reg_grid1 = regularity_t_grid(ss1);
  for (int p : {1, 2}) {
    expect(o, scan_close(muckenhoupt_constant(ss, p, mc_grid), brute_muckenhoupt(ss, p, mc_grid), kRel),
           "noise condition scan differs at p = " + std::to_string(p));
    expect(o,
           scan_close(regularity_constant(ss, p, FilterKind::tikhonov, reg_grid),
                      brute_regularity(ss, p, FilterKind::tikhonov, reg_grid), kRel),
           "tikhonov regularity scan differs at p = " + std::to_string(p));
    expect(o,
           scan_close(regularity_constant(ss1, p, FilterKind::landweber, reg_grid1),
                      brute_regularity(ss1, p, FilterKind::landweber, reg_grid1), kRel),
           "landweber regularity scan differs at p = " + std::to_string(p));
  }

  // noise living entirely on the strongest mode has no tail to pay for it
  SingularSystem smooth = ss;
  std::fill(smooth.noise_coeffs.begin(), smooth.noise_coeffs.end(), 0.0);
  smooth.noise_coeffs[0] = 1.0;
  const ScanResult unbounded = muckenhoupt_constant(smooth, 1, muckenhoupt_t_grid(smooth));
  expect(o, std::isinf(unbounded.constant), "top-mode noise produced a finite constant");

  // a linear map has zero linearization defect everywhere
  std::vector<double> d(16), c(16, 0.0);
  const CounterRng drng(77, 3);
  for (size_t i = 0; i < d.size(); ++i) d[i] = 1.0 + drng.uniform(i);
  const testref::StubProblem lin = testref::make_diagonal_stub(d, c);
  const GridFunction center = make_function(lin.domain().grid(), lin.domain().space(), 0.5);
  const TccReport flat = tcc_ratio(lin, center, 0.5, 40, 9);
  expect(o, flat.used == 40 && flat.skipped == 0, "linear tcc sampling skipped points");
  expect(o, flat.eta_max <= 1e-12, "linear tcc ratio " + fmt(flat.eta_max));

  // the benchmark integration operator is mildly nonlinear near its solution
  const ProblemPtr ham = make_hammerstein();
  const TccReport tcc = tcc_ratio(*ham, ham->benchmark().x_dagger, 0.1, 40, 3);
  expect(o, tcc.used > 0, "no usable tcc samples");
  expect(o, tcc.eta_max < 0.5, "hammerstein tcc ratio " + fmt(tcc.eta_max));
  o.note = "scans match to " + fmt(kRel) + ", hammerstein eta_max " + fmt(tcc.eta_max);
}

/* ------------------------------------------------------------------ */
/* criterion 9: byte-stable outputs across repeated runs               */

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return "";
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_stability(Outcome& o, const ExperimentConfig& cfg, const ExperimentReport& first) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path();
  const fs::path dir_a = base / "regstop_accept_a";
  const fs::path dir_b = base / "regstop_accept_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);

  write_report_csv(first, (dir_a / "report.csv").string());
  write_series_files(first, dir_a.string());

  const ExperimentReport second = run_experiment(cfg);
  write_report_csv(second, (dir_b / "report.csv").string());
  write_series_files(second, dir_b.string());

  expect(o, first.series.size() == second.series.size(), "series counts differ");

  std::vector<std::string> names = {"report.csv"};
  for (const SeriesBundle& b : first.series)
    names.push_back("series_" + first.config.problem + "_d" + std::to_string(b.delta_index) +
                    "_s" + std::to_string(b.seed) + ".csv");
  int compared = 0;
  for (const std::string& name : names) {
    bool ok_a = true, ok_b = true;
    const std::string a = read_file((dir_a / name).string(), ok_a);
    const std::string b = read_file((dir_b / name).string(), ok_b);
    expect(o, ok_a && ok_b, name + " missing from one run");
    expect(o, a == b, name + " differs between runs");
    ++compared;
  }
  // nothing beyond the expected files may appear
  for (const fs::path& dir : {dir_a, dir_b}) {
    int entries = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
      (void)e;
      ++entries;
    }
    expect(o, entries == static_cast<int>(names.size()),
           dir.filename().string() + " holds unexpected files");
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  o.note = std::to_string(compared) + " files byte-identical";
}

/* ------------------------------------------------------------------ */

void print_outcome(int index, const Outcome& o) {
  if (o.failure.empty())
    std::printf("[PASS] criterion %d: %s%s%s [%.1fs]\n", index, o.label.c_str(),
                o.note.empty() ? "" : ": ", o.note.c_str(), o.seconds);
  else
    std::printf("[FAIL] criterion %d: %s: %s [%.1fs]\n", index, o.label.c_str(),
                o.failure.c_str(), o.seconds);
}

}  // namespace

int main() {
  std::vector<Outcome> results(9);

  const auto run = [&](int index, const char* label, double budget,
                       const std::function<void(Outcome&)>& body) {
    Outcome& o = results[static_cast<size_t>(index - 1)];
    o.label = label;
    o.budget_s = budget;
    const auto start = Clock::now();
    try {
      body(o);
    } catch (const std::exception& e) {
      expect(o, false, std::string("unexpected exception: ") + e.what());
    }
    o.seconds = seconds_since(start);
    if (o.failure.empty() && o.seconds > o.budget_s)
      o.failure = "over the " + fmt(o.budget_s) + "s budget";
  };

  run(1, "derivative and adjoint gates", 10.0, criterion_gates);
  run(2, "closed-form solver oracles", 5.0, criterion_analytic);
  run(3, "paired run equals store-all run", 30.0, criterion_paired);

  // the three shipped sweeps; each is timed inside its own criterion
  ExperimentConfig ham_cfg;
  ham_cfg.problem = "hammerstein";
  ham_cfg.series = true;  // criterion 9 compares the series files
  ExperimentReport ham_report;
  run(5, "hammerstein benchmark sweep", 600.0, [&](Outcome& o) {
    ham_report = run_experiment(ham_cfg);
    criterion_hammerstein(o, ham_report);
  });

  ExperimentConfig dif_cfg;
  dif_cfg.problem = "diffusion1d";
  dif_cfg.series = false;
  ExperimentReport dif_report;
  run(6, "diffusion benchmark sweep", 900.0, [&](Outcome& o) {
    dif_report = run_experiment(dif_cfg);
    criterion_diffusion(o, dif_report);
  });

  ExperimentConfig auto_cfg;
  auto_cfg.problem = "autoconv";
  auto_cfg.series = false;
  ExperimentReport auto_report;
  run(7, "autoconvolution benchmark sweep", 600.0, [&](Outcome& o) {
    auto_report = run_experiment(auto_cfg);
    criterion_autoconv(o, auto_report);
  });

  run(4, "stopping rules versus exhaustive scans", 60.0, [&](Outcome& o) {
    criterion_rules(o, {&ham_report, &dif_report, &auto_report});
  });

  run(8, "spectral diagnostics versus brute force", 60.0, criterion_diagnostics);
  run(9, "byte-stable benchmark outputs", 900.0,
      [&](Outcome& o) { criterion_stability(o, ham_cfg, ham_report); });

  int failures = 0;
  for (int i = 0; i < 9; ++i) {
    print_outcome(i + 1, results[static_cast<size_t>(i)]);
    if (!results[static_cast<size_t>(i)].failure.empty()) ++failures;
  }
  return failures;
}
