#pragma once

#include <optional>
#include <string>
#include <utility>

#include "core/landweber.hpp"

namespace regstop {

/// The selection rules shipped with the benchmark: the discrepancy
/// principle (needs delta), four heuristics (delta-free), and the oracle
/// that reads the true error series.
enum class Rule { dp, hd, hr, qo, ls, opt };

const char* to_string(Rule r);
std::optional<Rule> rule_from_string(const std::string& s);

/// A stopping functional sampled at integer iteration numbers,
/// psi(first_k..defined_up_to). Heuristics that compare x_k with x_{2k}
/// are only defined as far as the paired range of the trace reaches.
struct PsiSeries {
  Rule rule = Rule::hd;
  int first_k = 1;
  std::vector<double> values;

  int defined_up_to() const { return first_k + static_cast<int>(values.size()) - 1; }
  bool empty() const { return values.empty(); }
  double at(int k) const;
};

PsiSeries psi_hd(const PairedTrace& t);                                // sqrt(k) * ||F(x_k) - y||
PsiSeries psi_hr(const PairedTrace& t);                                // k * <y - F(x_2k), y - F(x_k)>
PsiSeries psi_qo(const PairedTrace& t);                                // ||x_2k - x_k||
PsiSeries psi_ls(const PairedTrace& t);                                // <x_k, x_2k - x_k>
PsiSeries psi_dp(const PairedTrace& t, double tau, double delta_abs);  // |residual - tau*delta|

struct Window {
  int k_min = 1;
  int k_max = 0;
};

struct RuleDecision {
  Rule rule = Rule::hd;
  bool attained = false;
  long long k_star = -1;  // -1 when not attained
  double psi_at_kstar = 0.0;
  /// The winner sits on a window edge: either the functional was still
  /// descending at k_max_search or never recovered from the initial dip.
  /// Edge winners are recorded, not rejected; the flag marks them suspect.
  bool boundary_hit = false;
  Window window;
  /// Strict interior local minima inside the window, for inspection.
  std::vector<std::pair<int, double>> local_minima;
};

/// Global minimizer of psi over [k_min, k_max_search], ties to the smaller
/// k. Requires 1 <= k_min <= k_max_search <= psi.defined_up_to().
RuleDecision select_kstar(const PsiSeries& psi, int k_min, int k_max_search);

/// First k with ||F(x_k) - y_delta|| <= tau * delta_abs, searched from
/// k = 0; not attained when the residual never crosses.
RuleDecision discrepancy_stop(const PairedTrace& t, double tau, double delta_abs);

/// argmin of the true error series (benchmark traces only), ties to the
/// smaller k.
RuleDecision k_opt_oracle(const PairedTrace& t);

}  // namespace regstop
