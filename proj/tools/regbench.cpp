// regbench: benchmark driver for the regstop library.
//
// Wraps the C interface only, so it doubles as a smoke test for the shared
// library boundary. Exit codes: 0 success, 1 invalid configuration or a
// failed check, 2 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "regstop.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int exit_code_for_last_error() {
  switch (regstop_last_status()) {
    case REGSTOP_CONFIG_ERROR:
    case REGSTOP_INVALID_ARGUMENT:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

int report_failure(const char* what) {
  std::fprintf(stderr, "regbench: %s: %s\n", what, regstop_last_message());
  return exit_code_for_last_error();
}

struct ConfigCloser {
  void operator()(regstop_config* c) const { regstop_config_close(c); }
};
struct ReportCloser {
  void operator()(regstop_report* r) const { regstop_report_close(r); }
};
struct ProblemCloser {
  void operator()(regstop_problem* p) const { regstop_problem_close(p); }
};
using ConfigHandle = std::unique_ptr<regstop_config, ConfigCloser>;
using ReportHandle = std::unique_ptr<regstop_report, ReportCloser>;
using ProblemHandle = std::unique_ptr<regstop_problem, ProblemCloser>;

/// Output directory precedence: --output flag, then REGBENCH_OUTPUT_DIR,
/// then whatever the config carries.
bool apply_output_dir(regstop_config* cfg, const std::string& flag_value) {
  std::string dir = flag_value;
  if (dir.empty()) {
    const char* env = std::getenv("REGBENCH_OUTPUT_DIR");
    if (env != nullptr && env[0] != '\0') dir = env;
  }
  if (dir.empty()) return true;
  return regstop_config_set(cfg, "output_dir", dir.c_str()) == 0;
}

int run_and_write(const ConfigHandle& cfg) {
  ReportHandle report(regstop_experiment_run(cfg.get()));
  if (!report) return report_failure("experiment failed");
  if (regstop_report_write(report.get(), nullptr) != 0)
    return report_failure("writing outputs failed");
  char* summary = regstop_report_summary(report.get());
  if (summary == nullptr) return report_failure("summary failed");
  std::fputs(summary, stdout);
  regstop_free(summary);
  return 0;
}

int cmd_list_problems() {
  const int count = regstop_problem_count();
  for (int i = 0; i < count; ++i) {
    const char* name = regstop_problem_name_at(i);
    ProblemHandle p(regstop_problem_open(name, 0, 0));
    if (!p) return report_failure(name);
    const int nd = regstop_problem_delta_count(p.get());
    std::printf("%-12s domain %4d  range %4d  kmax %6d  tau %.3g  deltas %d in [%.3g, %.3g]\n",
                name, regstop_problem_domain_size(p.get()), regstop_problem_range_size(p.get()),
                regstop_problem_kmax(p.get()), regstop_problem_tau(p.get()), nd,
                regstop_problem_delta_at(p.get(), 0), regstop_problem_delta_at(p.get(), nd - 1));
  }
  return 0;
}

int cmd_check(const std::string& problem, int n, uint64_t seed, int trials, double max_fd,
              double max_adjoint) {
  ProblemHandle p(regstop_problem_open(problem.c_str(), n, 0));
  if (!p) return report_failure(problem.c_str());
  double fd_err = 0.0, adj_err = 0.0;
  if (regstop_problem_check(p.get(), seed, trials, &fd_err, &adj_err) != 0)
    return report_failure("operator check failed");
  const bool fd_ok = fd_err <= max_fd;
  const bool adj_ok = adj_err <= max_adjoint;
  std::printf("%s  derivative vs central differences: %.3e (limit %.1e) %s\n", problem.c_str(),
              fd_err, max_fd, fd_ok ? "ok" : "FAIL");
  std::printf("%s  adjoint defect:                    %.3e (limit %.1e) %s\n", problem.c_str(),
              adj_err, max_adjoint, adj_ok ? "ok" : "FAIL");
  return fd_ok && adj_ok ? 0 : kExitConfig;
}

int cmd_diagnose(const std::string& problem, int n, const std::string& at, double delta,
                 uint64_t seed, double radius, int samples, const std::string& out_path) {
  ProblemHandle p(regstop_problem_open(problem.c_str(), n, 0));
  if (!p) return report_failure(problem.c_str());
  double delta_rel = delta;
  if (delta_rel <= 0.0) delta_rel = regstop_problem_delta_at(p.get(), 0);
  char* json = regstop_diagnose(p.get(), at.c_str(), delta_rel, seed, radius, samples);
  if (json == nullptr) return report_failure("diagnose failed");
  int rc = 0;
  if (out_path.empty()) {
    std::fputs(json, stdout);
  } else {
    std::FILE* f = std::fopen(out_path.c_str(), "wb");
    if (f == nullptr) {
      std::fprintf(stderr, "regbench: cannot write %s\n", out_path.c_str());
      rc = kExitRuntime;
    } else {
      std::fputs(json, f);
      std::fclose(f);
    }
  }
  regstop_free(json);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landweber iteration with heuristic stopping rules: benchmark driver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("regbench ") + regstop_version());

  // run
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string run_config;
  std::string run_output;
  std::vector<std::string> run_sets;
  bool run_timing = false;
  bool run_no_series = false;
  run->add_option("-c,--config", run_config, "key = value config file")->required();
  run->add_option("-o,--output", run_output, "output directory (overrides the config)");
  run->add_option("--set", run_sets, "override one key, as key=value")->take_all();
  run->add_flag("--timing", run_timing, "measure wall time per decision");
  run->add_flag("--no-series", run_no_series, "skip the per-run series files");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a benchmark sweep without a config file");
  std::string sweep_problem;
  int sweep_n = 0;
  std::string sweep_deltas, sweep_seeds, sweep_rules;
  int sweep_kmax = 0;
  int sweep_kmin = 0;
  double sweep_tau = 0.0;
  std::string sweep_output;
  bool sweep_timing = false;
  bool sweep_no_series = false;
  sweep->add_option("problem", sweep_problem, "problem name (see list-problems)")->required();
  sweep->add_option("--n", sweep_n, "grid resolution (0: problem default)");
  sweep->add_option("--deltas", sweep_deltas,
                    "noise levels: comma list or logspace:lo:hi:count (default: problem's)");
  sweep->add_option("--seeds", sweep_seeds, "comma list of noise seeds (default 1,2,3)");
  sweep->add_option("--rules", sweep_rules, "comma list from dp,hd,hr,qo,ls,opt");
  sweep->add_option("--kmax", sweep_kmax, "iteration budget (0: problem default)");
  sweep->add_option("--k-min", sweep_kmin, "lower end of the heuristic search window");
  sweep->add_option("--tau", sweep_tau, "discrepancy factor (0: problem default)");
  sweep->add_option("-o,--output", sweep_output, "output directory (default out)");
  sweep->add_flag("--timing", sweep_timing, "measure wall time per decision");
  sweep->add_flag("--no-series", sweep_no_series, "skip the per-run series files");

  // check
  auto* check = app.add_subcommand("check", "Derivative and adjoint gate for one problem");
  std::string check_problem;
  int check_n = 0;
  uint64_t check_seed = 7;
  int check_trials = 20;
  double check_max_fd = 1e-6;
  double check_max_adjoint = 1e-10;
  check->add_option("problem", check_problem, "problem name")->required();
  check->add_option("--n", check_n, "grid resolution (0: problem default)");
  check->add_option("--seed", check_seed, "probe point seed");
  check->add_option("--trials", check_trials, "random adjoint pairs");
  check->add_option("--max-fd", check_max_fd, "acceptance limit for the derivative error");
  check->add_option("--max-adjoint", check_max_adjoint, "acceptance limit for the adjoint defect");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "Spectral and nonlinearity diagnostics as JSON");
  std::string diag_problem;
  int diag_n = 0;
  std::string diag_at = "dagger";
  double diag_delta = 0.0;
  uint64_t diag_seed = 1;
  double diag_radius = 0.0;
  int diag_samples = 0;
  std::string diag_out;
  diag->add_option("problem", diag_problem, "problem name")->required();
  diag->add_option("--n", diag_n, "grid resolution (0: problem default)");
  diag->add_option("--at", diag_at, "linearization point: dagger or start")
      ->check(CLI::IsMember({"dagger", "start"}));
  diag->add_option("--delta", diag_delta, "noise level (0: smallest benchmark level)");
  diag->add_option("--seed", diag_seed, "noise and sampling seed");
  diag->add_option("--radius", diag_radius, "tangential-cone sphere radius (0: auto)");
  diag->add_option("--samples", diag_samples, "tangential-cone sample count (0: 64)");
  diag->add_option("-o,--output", diag_out, "write the JSON here instead of stdout");

  auto* list = app.add_subcommand("list-problems", "Show the registered problems");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) return cmd_list_problems();

  if (check->parsed())
    return cmd_check(check_problem, check_n, check_seed, check_trials, check_max_fd,
                     check_max_adjoint);

  if (diag->parsed())
    return cmd_diagnose(diag_problem, diag_n, diag_at, diag_delta, diag_seed, diag_radius,
                        diag_samples, diag_out);

  if (run->parsed()) {
    ConfigHandle cfg(regstop_config_load(run_config.c_str()));
    if (!cfg) return report_failure(run_config.c_str());
    for (const std::string& kv : run_sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::fprintf(stderr, "regbench: --set needs key=value, got '%s'\n", kv.c_str());
        return kExitConfig;
      }
      if (regstop_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) != 0)
        return report_failure("--set");
    }
    if (run_timing) regstop_config_set(cfg.get(), "timing", "on");
    if (run_no_series) regstop_config_set(cfg.get(), "series", "off");
    if (!apply_output_dir(cfg.get(), run_output)) return report_failure("--output");
    return run_and_write(cfg);
  }

  // sweep
  ConfigHandle cfg(regstop_config_new());
  if (!cfg) return report_failure("config");
  regstop_config_set(cfg.get(), "problem", sweep_problem.c_str());
  const auto set_if = [&](const char* key, const std::string& value) {
    if (!value.empty()) regstop_config_set(cfg.get(), key, value.c_str());
  };
  set_if("delta_rel_list", sweep_deltas);
  set_if("seeds", sweep_seeds);
  set_if("rules", sweep_rules);
  if (sweep_n > 0) regstop_config_set(cfg.get(), "n", std::to_string(sweep_n).c_str());
  if (sweep_kmax > 0) regstop_config_set(cfg.get(), "kmax", std::to_string(sweep_kmax).c_str());
  if (sweep_kmin > 0)
    regstop_config_set(cfg.get(), "k_min_search", std::to_string(sweep_kmin).c_str());
  if (sweep_tau > 0.0) regstop_config_set(cfg.get(), "tau", std::to_string(sweep_tau).c_str());
  if (sweep_timing) regstop_config_set(cfg.get(), "timing", "on");
  if (sweep_no_series) regstop_config_set(cfg.get(), "series", "off");
  if (!apply_output_dir(cfg.get(), sweep_output)) return report_failure("--output");
  return run_and_write(cfg);
}
