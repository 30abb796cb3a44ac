#include "core/rules.hpp"

#include <cmath>
#include <functional>

namespace regstop {

const char* to_string(Rule r) {
  switch (r) {
    case Rule::dp: return "dp";
    case Rule::hd: return "hd";
    case Rule::hr: return "hr";
    case Rule::qo: return "qo";
    case Rule::ls: return "ls";
    case Rule::opt: return "opt";
  }
  return "unknown";
}

std::optional<Rule> rule_from_string(const std::string& s) {
  if (s == "dp") return Rule::dp;
  if (s == "hd") return Rule::hd;
  if (s == "hr") return Rule::hr;
  if (s == "qo") return Rule::qo;
  if (s == "ls") return Rule::ls;
  if (s == "opt") return Rule::opt;
  return std::nullopt;
}

double PsiSeries::at(int k) const {
  if (k < first_k || k > defined_up_to())
    throw std::out_of_range("psi series: k = " + std::to_string(k) + " outside " +
                            std::to_string(first_k) + ".." + std::to_string(defined_up_to()));
  return values[static_cast<size_t>(k - first_k)];
}

namespace {

PsiSeries from_tail(Rule rule, const std::vector<double>& source,
                    const std::function<double(int, double)>& map) {
  PsiSeries psi;
  psi.rule = rule;
  psi.first_k = 1;
  for (size_t k = 1; k < source.size(); ++k)
    psi.values.push_back(map(static_cast<int>(k), source[k]));
  return psi;
}

}  // namespace

PsiSeries psi_hd(const PairedTrace& t) {
  return from_tail(Rule::hd, t.residual_norm,
                   [](int k, double r) { return std::sqrt(static_cast<double>(k)) * r; });
}

PsiSeries psi_hr(const PairedTrace& t) {
  return from_tail(Rule::hr, t.hr_pair, [](int k, double v) { return k * v; });
}

PsiSeries psi_qo(const PairedTrace& t) {
  return from_tail(Rule::qo, t.qo, [](int, double v) { return v; });
}

PsiSeries psi_ls(const PairedTrace& t) {
  return from_tail(Rule::ls, t.ls, [](int, double v) { return v; });
}

PsiSeries psi_dp(const PairedTrace& t, double tau, double delta_abs) {
  if (!(tau > 0.0)) throw std::invalid_argument("psi_dp: tau must be positive");
  if (delta_abs < 0.0) throw std::invalid_argument("psi_dp: negative delta_abs");
  const double level = tau * delta_abs;
  return from_tail(Rule::dp, t.residual_norm,
                   [level](int, double r) { return std::abs(r - level); });
}

RuleDecision select_kstar(const PsiSeries& psi, int k_min, int k_max_search) {
  if (k_min > k_max_search)
    throw std::invalid_argument("select_kstar: empty window [" + std::to_string(k_min) + ", " +
                                std::to_string(k_max_search) + "]");
  if (k_min < psi.first_k || k_max_search > psi.defined_up_to())
    throw std::invalid_argument("select_kstar: window exceeds the defined range of the series");

  RuleDecision d;
  d.rule = psi.rule;
  d.window = {k_min, k_max_search};

  int best_k = k_min;
  double best_v = psi.at(k_min);
  for (int k = k_min; k <= k_max_search; ++k) {
    const double v = psi.at(k);
    if (!std::isfinite(v))
      throw std::invalid_argument("select_kstar: non-finite psi value at k = " + std::to_string(k));
    if (v < best_v) {  // strict: ties keep the earlier k
      best_v = v;
      best_k = k;
    }
    if (k > k_min && k < k_max_search) {
      if (v < psi.at(k - 1) && v < psi.at(k + 1)) d.local_minima.emplace_back(k, v);
    }
  }
  d.attained = true;
  d.k_star = best_k;
  d.psi_at_kstar = best_v;
  d.boundary_hit = (best_k == k_min || best_k == k_max_search);
  return d;
}

RuleDecision discrepancy_stop(const PairedTrace& t, double tau, double delta_abs) {
  if (!(tau > 0.0)) throw std::invalid_argument("discrepancy_stop: tau must be positive");
  if (delta_abs < 0.0) throw std::invalid_argument("discrepancy_stop: negative delta_abs");
  RuleDecision d;
  d.rule = Rule::dp;
  d.window = {0, t.residual_limit()};
  const double level = tau * delta_abs;
  for (int k = 0; k <= t.residual_limit(); ++k) {
    if (t.residual_norm[static_cast<size_t>(k)] <= level) {
      d.attained = true;
      d.k_star = k;
      d.psi_at_kstar = t.residual_norm[static_cast<size_t>(k)];
      return d;
    }
  }
  return d;  // never crossed: not attained
}

RuleDecision k_opt_oracle(const PairedTrace& t) {
  if (!t.has_error())
    throw std::invalid_argument("k_opt_oracle: trace has no error series (no reference solution)");
  RuleDecision d;
  d.rule = Rule::opt;
  const int last = static_cast<int>(t.error.size()) - 1;
  d.window = {0, last};
  int best_k = 0;
  double best_v = t.error[0];
  for (int k = 1; k <= last; ++k) {
    const double v = t.error[static_cast<size_t>(k)];
    if (v < best_v) {
      best_v = v;
      best_k = k;
    }
  }
  d.attained = true;
  d.k_star = best_k;
  d.psi_at_kstar = best_v;
  d.boundary_hit = (best_k == last);
  return d;
}

}  // namespace regstop
