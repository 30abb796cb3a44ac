#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/problems.hpp"
#include "core/rules.hpp"

namespace regstop {

/// One benchmark protocol: a problem, a noise-level grid, seeds, the rules
/// to score, and iteration controls. Zero-valued numeric fields mean "use
/// the problem's default".
struct ExperimentConfig {
  std::string problem;
  int n = 0;
  int fine_factor = 0;
  std::vector<double> delta_rel_list;
  std::vector<uint64_t> seeds = {1, 2, 3};
  std::vector<Rule> rules = {Rule::dp, Rule::hd, Rule::hr, Rule::qo, Rule::ls, Rule::opt};
  double tau = 0.0;
  int kmax = 0;
  int k_min_search = 0;

  enum class OmegaMode { auto_at_dagger, auto_at_x0, fixed };
  OmegaMode omega_mode = OmegaMode::auto_at_dagger;
  double omega = 0.0;  // only read in fixed mode
  double omega_safety = 1.0;

  std::string output_dir = "out";
  /// Measured wall times are inherently non-reproducible, so they are
  /// opt-in; with timing off the wall_time_ms column holds zeros and the
  /// whole CSV is byte-stable for a fixed config.
  bool timing = false;
  bool series = true;
  double divergence_radius = 0.0;  // 0: 10 * ||x_dagger - x0||_X
  double residual_blowup = 10.0;
};

struct ConfigIssue {
  std::string key;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses the flat key = value format ('#' starts a comment line). Unknown
/// keys, duplicate keys, type errors and cross-field violations are all
/// collected and thrown together as a ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct ReportRow {
  std::string problem;
  double delta_rel = 0.0;
  double delta_abs = 0.0;
  uint64_t seed = 0;
  Rule rule = Rule::dp;
  long long k_star = -1;
  bool attained = false;
  bool boundary_hit = false;
  double abs_error = 0.0;    // NaN when not attained
  double error_ratio = 0.0;  // NaN when not attained
  double k_ratio = 0.0;      // NaN when not attained
  double wall_time_ms = 0.0;
};

/// Per-run series kept for the series files: the raw trace columns plus
/// every stopping functional, aligned at iteration index k.
struct SeriesBundle {
  int delta_index = 0;  // position in the configured delta list
  double delta_rel = 0.0;
  uint64_t seed = 0;
  std::vector<double> residual;  // k = 0..limit
  std::vector<double> error;
  PsiSeries hd, hr, qo, ls, dp;
};

struct ExperimentReport {
  ExperimentConfig config;  // resolved: every default filled in
  double omega = 0.0;
  std::vector<ReportRow> rows;
  std::vector<SeriesBundle> series;
};

/// Runs the full protocol. Row order is deterministic: noise levels in
/// descending delta_rel, then seeds and rules in configured order. Noise
/// for level i uses the stream derived from (seed, i), so the realization
/// a rule sees depends only on the config, never on scheduling. A failed
/// cell (e.g. immediate divergence) yields not-attained rows, not an abort.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// The report CSV as one string, columns fixed:
/// problem,delta_rel,delta_abs,seed,rule,k_star,attained,boundary_hit,
/// abs_error,error_ratio,k_ratio,wall_time_ms.
std::string format_report_csv(const ExperimentReport& report);

void write_report_csv(const ExperimentReport& report, const std::string& path);

/// One file per run: series_<problem>_d<i>_s<seed>.csv with columns
/// k,residual,error,psi_hd,psi_hr,psi_qo,psi_ls,psi_dp; cells where a
/// functional is undefined stay empty.
void write_series_files(const ExperimentReport& report, const std::string& dir);

/// Fixed-width text table with per-rule medians and extremes.
std::string summarize(const ExperimentReport& report);

/// Exact decimal formatting used in every emitted file (%.17g): enough
/// digits to round-trip, stable for byte comparison.
std::string format_double(double v);

double median(std::vector<double> v);

}  // namespace regstop
