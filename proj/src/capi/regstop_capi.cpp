#include "regstop.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core/checks.hpp"
#include "core/diagnostics.hpp"
#include "core/experiment.hpp"
#include "core/landweber.hpp"
#include "core/problems.hpp"
#include "core/rng.hpp"
#include "core/rules.hpp"

#include "json.hpp"

struct regstop_problem {
  regstop::ProblemPtr impl;
};

struct regstop_trace {
  regstop::PairedTrace impl;
};

struct regstop_config {
  std::vector<std::pair<std::string, std::string>> entries;
};

struct regstop_report {
  regstop::ExperimentReport impl;
};

namespace {

using regstop::GridFunction;

thread_local int t_last_status = REGSTOP_OK;
thread_local std::string t_last_message = "ok";

void set_failure(int status, const char* message) {
  t_last_status = status;
  t_last_message = message;
}

/// Lookups that miss (unknown problem name) get their own status so a
/// caller can tell a typo from a malformed argument.
struct not_found_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs fn under the exception-to-status contract: any throw becomes a
/// status code plus message on this thread, and the caller gets `fail`.
template <class T, class F>
T guard(T fail, F&& fn) noexcept {
  try {
    T result = fn();
    t_last_status = REGSTOP_OK;
    return result;
  } catch (const regstop::ConfigError& e) {
    set_failure(REGSTOP_CONFIG_ERROR, e.what());
  } catch (const not_found_error& e) {
    set_failure(REGSTOP_NOT_FOUND, e.what());
  } catch (const std::domain_error& e) {
    set_failure(REGSTOP_DOMAIN_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    set_failure(REGSTOP_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    set_failure(REGSTOP_INVALID_ARGUMENT, e.what());
  } catch (const std::ios_base::failure& e) {
    set_failure(REGSTOP_IO_ERROR, e.what());
  } catch (const std::exception& e) {
    set_failure(REGSTOP_RUNTIME_ERROR, e.what());
  } catch (...) {
    set_failure(REGSTOP_RUNTIME_ERROR, "unrecognized exception");
  }
  return fail;
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

const regstop::Problem& deref(const regstop_problem* p) {
  require(p != nullptr && p->impl != nullptr, "problem handle is NULL");
  return *p->impl;
}

const regstop::PairedTrace& deref(const regstop_trace* t) {
  require(t != nullptr, "trace handle is NULL");
  return t->impl;
}

const regstop::ExperimentReport& deref(const regstop_report* r) {
  require(r != nullptr, "report handle is NULL");
  return r->impl;
}

GridFunction pack(const regstop::InnerProduct& space, const double* data, const char* what) {
  require(data != nullptr, what);
  GridFunction g = regstop::make_function(space.grid(), space.space());
  std::memcpy(g.values.data(), data, g.values.size() * sizeof(double));
  return g;
}

void unpack(const GridFunction& g, double* out, const char* what) {
  require(out != nullptr, what);
  std::memcpy(out, g.values.data(), g.values.size() * sizeof(double));
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::runtime_error("out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_label(char* dst, size_t cap, const char* src) {
  std::snprintf(dst, cap, "%s", src);
}

std::vector<std::pair<std::string, std::string>> entries_of(const std::string& text) {
  // parse_config has already accepted this text, so the split cannot fail
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

std::string serialize(const regstop_config& cfg) {
  std::string text;
  for (const auto& [key, value] : cfg.entries) text += key + " = " + value + "\n";
  return text;
}

}  // namespace

extern "C" {

const char* regstop_version(void) { return "1.0.0"; }

int regstop_last_status(void) { return t_last_status; }

const char* regstop_last_message(void) { return t_last_message.c_str(); }

void regstop_free(void* ptr) { std::free(ptr); }

/* ------------------------------------------------------------------ */

int regstop_problem_count(void) {
  return static_cast<int>(regstop::problem_names().size());
}

const char* regstop_problem_name_at(int index) {
  const auto& names = regstop::problem_names();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  return names[static_cast<size_t>(index)].c_str();
}

regstop_problem* regstop_problem_open(const char* name, int n, int fine_factor) {
  return guard<regstop_problem*>(nullptr, [&] {
    require(name != nullptr, "name is NULL");
    const auto& names = regstop::problem_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      std::string known;
      for (const auto& k : names) known += (known.empty() ? "" : ", ") + k;
      throw not_found_error("unknown problem \"" + std::string(name) + "\" (known: " + known + ")");
    }
    regstop::ProblemOptions opts;
    opts.n = n;
    opts.fine_factor = fine_factor;
    auto impl = regstop::make_problem(name, opts);
    return new regstop_problem{std::move(impl)};
  });
}

void regstop_problem_close(regstop_problem* p) { delete p; }

const char* regstop_problem_name(const regstop_problem* p) {
  return guard<const char*>(nullptr, [&] { return deref(p).name().c_str(); });
}

int regstop_problem_domain_size(const regstop_problem* p) {
  return guard(-1, [&] { return deref(p).domain().grid().sample_count(); });
}

int regstop_problem_range_size(const regstop_problem* p) {
  return guard(-1, [&] { return deref(p).range().grid().sample_count(); });
}

int regstop_problem_apply(const regstop_problem* p, const double* x, double* y) {
  return guard(-1, [&] {
    const auto& prob = deref(p);
    unpack(prob.apply(pack(prob.domain(), x, "x is NULL")), y, "y is NULL");
    return 0;
  });
}

int regstop_problem_deriv(const regstop_problem* p, const double* x, const double* h,
                          double* out) {
  return guard(-1, [&] {
    const auto& prob = deref(p);
    unpack(prob.deriv(pack(prob.domain(), x, "x is NULL"), pack(prob.domain(), h, "h is NULL")),
           out, "out is NULL");
    return 0;
  });
}

int regstop_problem_adjoint(const regstop_problem* p, const double* x, const double* r,
                            double* out) {
  return guard(-1, [&] {
    const auto& prob = deref(p);
    unpack(prob.adjoint(pack(prob.domain(), x, "x is NULL"), pack(prob.range(), r, "r is NULL")),
           out, "out is NULL");
    return 0;
  });
}

int regstop_problem_domain_check(const regstop_problem* p, const double* x, char* reason,
                                 int reason_cap) {
  return guard(-1, [&] {
    const auto& prob = deref(p);
    const regstop::DomainCheck check = prob.domain_check(pack(prob.domain(), x, "x is NULL"));
    if (reason != nullptr && reason_cap > 0)
      copy_label(reason, static_cast<size_t>(reason_cap), check.reason.c_str());
    return check.inside ? 1 : 0;
  });
}

/* ------------------------------------------------------------------ */

int regstop_problem_exact(const regstop_problem* p, double* x_out) {
  return guard(-1, [&] {
    unpack(deref(p).benchmark().x_dagger, x_out, "x_out is NULL");
    return 0;
  });
}

int regstop_problem_start(const regstop_problem* p, double* x_out) {
  return guard(-1, [&] {
    unpack(deref(p).benchmark().x0, x_out, "x_out is NULL");
    return 0;
  });
}

double regstop_problem_tau(const regstop_problem* p) {
  return guard(-1.0, [&] { return deref(p).benchmark().tau; });
}

int regstop_problem_kmax(const regstop_problem* p) {
  return guard(-1, [&] { return deref(p).benchmark().kmax; });
}

int regstop_problem_delta_count(const regstop_problem* p) {
  return guard(-1, [&] {
    return static_cast<int>(deref(p).benchmark().delta_rel_list.size());
  });
}

double regstop_problem_delta_at(const regstop_problem* p, int index) {
  return guard(-1.0, [&] {
    const auto& list = deref(p).benchmark().delta_rel_list;
    require(index >= 0 && index < static_cast<int>(list.size()), "delta index out of range");
    return list[static_cast<size_t>(index)];
  });
}

int regstop_problem_synthesize(const regstop_problem* p, double* y) {
  return guard(-1, [&] {
    unpack(deref(p).synthesize_data(), y, "y is NULL");
    return 0;
  });
}

int regstop_problem_add_noise(const regstop_problem* p, const double* y, double delta_rel,
                              uint64_t seed, double* y_out, double* delta_abs_out) {
  return guard(-1, [&] {
    const auto& prob = deref(p);
    const regstop::NoisyData noisy =
        regstop::add_noise(pack(prob.range(), y, "y is NULL"), delta_rel, seed);
    unpack(noisy.y_delta, y_out, "y_out is NULL");
    if (delta_abs_out != nullptr) *delta_abs_out = noisy.delta_abs;
    return 0;
  });
}

int regstop_problem_check(const regstop_problem* p, uint64_t seed, int trials,
                          double* fd_err_out, double* adjoint_err_out) {
  return guard(-1, [&] {
    const auto& prob = deref(p);
    require(trials >= 1, "trials must be at least 1");
    const GridFunction x = prob.sample_domain_point(seed);
    GridFunction h = regstop::make_function(prob.domain().grid(), prob.domain().space());
    h.values = regstop::gaussian_vector(regstop::derive_seed(seed, 0x636865636bull), 1, h.size());
    const regstop::FdReport fd =
        regstop::fd_derivative_check(prob, x, h, regstop::default_fd_steps());
    const double adj = regstop::adjoint_check(prob, x, trials, seed);
    if (fd_err_out != nullptr) *fd_err_out = fd.best_rel_err;
    if (adjoint_err_out != nullptr) *adjoint_err_out = adj;
    return 0;
  });
}

double regstop_problem_auto_stepsize(const regstop_problem* p, int at_start, double safety) {
  return guard(-1.0, [&] {
    const auto& prob = deref(p);
    const GridFunction& ref = at_start ? prob.benchmark().x0 : prob.benchmark().x_dagger;
    return regstop::auto_stepsize(prob, ref, safety);
  });
}

/* ------------------------------------------------------------------ */

regstop_trace* regstop_run_paired(const regstop_problem* p, const double* y_delta,
                                  const double* x0, double omega, int kmax,
                                  double divergence_radius, double residual_blowup,
                                  int with_error) {
  return guard<regstop_trace*>(nullptr, [&] {
    const auto& prob = deref(p);
    const GridFunction y = pack(prob.range(), y_delta, "y_delta is NULL");
    const GridFunction start =
        x0 != nullptr ? pack(prob.domain(), x0, "x0 is NULL") : prob.benchmark().x0;
    regstop::IterationConfig cfg;
    cfg.omega = omega;
    cfg.kmax = kmax;
    cfg.divergence_radius = divergence_radius;
    cfg.residual_blowup = residual_blowup;
    const GridFunction* x_dagger = with_error ? &prob.benchmark().x_dagger : nullptr;
    return new regstop_trace{regstop::run_paired(prob, y, start, cfg, x_dagger)};
  });
}

void regstop_trace_close(regstop_trace* t) { delete t; }

int regstop_trace_residual_limit(const regstop_trace* t) {
  return guard(-1, [&] { return deref(t).residual_limit(); });
}

int regstop_trace_paired_limit(const regstop_trace* t) {
  return guard(-1, [&] { return deref(t).paired_limit(); });
}

const char* regstop_trace_termination(const regstop_trace* t) {
  return guard<const char*>(nullptr, [&] { return regstop::to_string(deref(t).termination); });
}

long long regstop_trace_termination_index(const regstop_trace* t) {
  return guard(-2LL, [&] { return deref(t).termination_index; });
}

long long regstop_trace_forward_evals(const regstop_trace* t) {
  return guard(-1LL, [&] { return deref(t).forward_evals; });
}

long long regstop_trace_adjoint_evals(const regstop_trace* t) {
  return guard(-1LL, [&] { return deref(t).adjoint_evals; });
}

int regstop_trace_series(const regstop_trace* t, const char* name, double* out, int capacity) {
  return guard(-1, [&] {
    const auto& trace = deref(t);
    require(name != nullptr, "series name is NULL");
    const std::vector<double>* series = nullptr;
    const std::string which = name;
    if (which == "residual")
      series = &trace.residual_norm;
    else if (which == "error")
      series = &trace.error;
    else if (which == "dist_to_x0")
      series = &trace.dist_to_x0;
    else if (which == "qo")
      series = &trace.qo;
    else if (which == "ls")
      series = &trace.ls;
    else if (which == "hr_pair")
      series = &trace.hr_pair;
    else
      throw std::out_of_range("no series named '" + which + "'");
    const int len = static_cast<int>(series->size());
    if (out == nullptr) return len;
    require(capacity >= len, "capacity too small for series");
    std::memcpy(out, series->data(), series->size() * sizeof(double));
    return len;
  });
}

/* ------------------------------------------------------------------ */

int regstop_decide(const regstop_trace* t, const char* rule, int k_min, int k_max_search,
                   double tau, double delta_abs, regstop_decision* out) {
  return guard(-1, [&] {
    const auto& trace = deref(t);
    require(rule != nullptr, "rule is NULL");
    require(out != nullptr, "out is NULL");
    const auto parsed = regstop::rule_from_string(rule);
    require(parsed.has_value(), "unknown rule name");

    regstop::RuleDecision d;
    switch (*parsed) {
      case regstop::Rule::dp:
        d = regstop::discrepancy_stop(trace, tau, delta_abs);
        break;
      case regstop::Rule::opt:
        d = regstop::k_opt_oracle(trace);
        break;
      default: {
        regstop::PsiSeries psi;
        switch (*parsed) {
          case regstop::Rule::hd: psi = regstop::psi_hd(trace); break;
          case regstop::Rule::hr: psi = regstop::psi_hr(trace); break;
          case regstop::Rule::qo: psi = regstop::psi_qo(trace); break;
          default: psi = regstop::psi_ls(trace); break;
        }
        const int k_hi = k_max_search > 0 ? k_max_search : psi.defined_up_to();
        if (psi.empty() || k_hi < k_min) {
          d.rule = *parsed;
          d.window = {k_min, k_hi};
        } else {
          d = regstop::select_kstar(psi, k_min, k_hi);
        }
        break;
      }
    }

    std::memset(out, 0, sizeof(*out));
    copy_label(out->rule, sizeof(out->rule), regstop::to_string(d.rule));
    out->attained = d.attained ? 1 : 0;
    out->k_star = d.k_star;
    out->psi_at_kstar = d.psi_at_kstar;
    out->boundary_hit = d.boundary_hit ? 1 : 0;
    out->window_min = d.window.k_min;
    out->window_max = d.window.k_max;
    return 0;
  });
}

/* ------------------------------------------------------------------ */

regstop_config* regstop_config_new(void) {
  return guard<regstop_config*>(nullptr, [&] { return new regstop_config; });
}

regstop_config* regstop_config_load(const char* path) {
  return guard<regstop_config*>(nullptr, [&] {
    require(path != nullptr, "path is NULL");
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure(std::string("cannot open ") + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    regstop::parse_config(text);  // full validation up front
    return new regstop_config{entries_of(text)};
  });
}

int regstop_config_set(regstop_config* c, const char* key, const char* value) {
  return guard(-1, [&] {
    require(c != nullptr, "config handle is NULL");
    require(key != nullptr && key[0] != '\0', "key is empty");
    require(value != nullptr, "value is NULL");
    const std::string k = key, v = value;
    require(k.find_first_of("=\n#") == std::string::npos, "key contains reserved characters");
    require(v.find('\n') == std::string::npos, "value contains a newline");
    for (auto& entry : c->entries) {
      if (entry.first == k) {
        entry.second = v;
        return 0;
      }
    }
    c->entries.emplace_back(k, v);
    return 0;
  });
}

void regstop_config_close(regstop_config* c) { delete c; }

regstop_report* regstop_experiment_run(const regstop_config* c) {
  return guard<regstop_report*>(nullptr, [&] {
    require(c != nullptr, "config handle is NULL");
    const regstop::ExperimentConfig cfg = regstop::parse_config(serialize(*c));
    return new regstop_report{regstop::run_experiment(cfg)};
  });
}

void regstop_report_close(regstop_report* r) { delete r; }

long long regstop_report_row_count(const regstop_report* r) {
  return guard(-1LL, [&] { return static_cast<long long>(deref(r).rows.size()); });
}

int regstop_report_row(const regstop_report* r, long long index, regstop_row* out) {
  return guard(-1, [&] {
    const auto& rows = deref(r).rows;
    require(out != nullptr, "out is NULL");
    require(index >= 0 && index < static_cast<long long>(rows.size()), "row index out of range");
    const regstop::ReportRow& row = rows[static_cast<size_t>(index)];
    std::memset(out, 0, sizeof(*out));
    copy_label(out->problem, sizeof(out->problem), row.problem.c_str());
    out->delta_rel = row.delta_rel;
    out->delta_abs = row.delta_abs;
    out->seed = row.seed;
    copy_label(out->rule, sizeof(out->rule), regstop::to_string(row.rule));
    out->k_star = row.k_star;
    out->attained = row.attained ? 1 : 0;
    out->boundary_hit = row.boundary_hit ? 1 : 0;
    out->abs_error = row.abs_error;
    out->error_ratio = row.error_ratio;
    out->k_ratio = row.k_ratio;
    out->wall_time_ms = row.wall_time_ms;
    return 0;
  });
}

double regstop_report_omega(const regstop_report* r) {
  return guard(-1.0, [&] { return deref(r).omega; });
}

char* regstop_report_csv(const regstop_report* r) {
  return guard<char*>(nullptr, [&] { return dup_string(regstop::format_report_csv(deref(r))); });
}

char* regstop_report_summary(const regstop_report* r) {
  return guard<char*>(nullptr, [&] { return dup_string(regstop::summarize(deref(r))); });
}

int regstop_report_write_csv(const regstop_report* r, const char* path) {
  return guard(-1, [&] {
    require(path != nullptr, "path is NULL");
    try {
      regstop::write_report_csv(deref(r), path);
    } catch (const std::runtime_error& e) {
      throw std::ios_base::failure(e.what());
    }
    return 0;
  });
}

int regstop_report_write_series(const regstop_report* r, const char* dir) {
  return guard(-1, [&] {
    require(dir != nullptr, "dir is NULL");
    try {
      regstop::write_series_files(deref(r), dir);
    } catch (const std::runtime_error& e) {
      throw std::ios_base::failure(e.what());
    }
    return 0;
  });
}

int regstop_report_write(const regstop_report* r, const char* dir) {
  return guard(-1, [&] {
    const auto& report = deref(r);
    const std::string out = dir != nullptr ? dir : report.config.output_dir;
    try {
      std::filesystem::create_directories(out);
      regstop::write_report_csv(report, out + "/report.csv");
      if (!report.series.empty()) regstop::write_series_files(report, out);
    } catch (const std::runtime_error& e) {
      throw std::ios_base::failure(e.what());
    }
    return 0;
  });
}

/* ------------------------------------------------------------------ */

char* regstop_diagnose(const regstop_problem* p, const char* at, double delta_rel,
                       uint64_t seed, double tcc_radius, int tcc_samples) {
  return guard<char*>(nullptr, [&] {
    const auto& prob = deref(p);
    require(at != nullptr, "at is NULL");
    const std::string where = at;
    require(where == "dagger" || where == "start", "at must be \"dagger\" or \"start\"");
    require(delta_rel > 0.0 && delta_rel < 1.0, "delta_rel must lie in (0, 1)");

    const auto& bench = prob.benchmark();
    const GridFunction& center = where == "dagger" ? bench.x_dagger : bench.x0;
    const GridFunction diff = regstop::subtract(bench.x_dagger, bench.x0);
    const double gap = prob.domain().norm(diff);
    const double radius = tcc_radius > 0.0 ? tcc_radius : 0.1 * gap;
    const int samples = tcc_samples > 0 ? tcc_samples : 64;

    const regstop::JacobianSvd svd = regstop::jacobian_svd(prob, center);
    const GridFunction y = prob.synthesize_data();
    const regstop::NoisyData noisy = regstop::add_noise(y, delta_rel, seed);
    const GridFunction noise = regstop::subtract(noisy.y_delta, y);
    const regstop::SingularSystem ss =
        regstop::make_singular_system(svd, prob, bench.x_dagger, noise);
    const regstop::SingularSystem ss1 = regstop::rescale_sigma(ss);

    nlohmann::json j;
    j["problem"] = prob.name();
    j["at"] = where;
    j["n"] = prob.domain().grid().n;
    j["delta_rel"] = delta_rel;
    j["delta_abs"] = noisy.delta_abs;
    j["seed"] = seed;
    j["rank"] = svd.sigma.size();
    j["sigma_max"] = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    j["sigma_min"] = svd.sigma.empty() ? 0.0 : svd.sigma.back();
    j["condition"] = svd.condition_number();
    j["sigma"] = svd.sigma;

    const auto scan_json = [](const regstop::ScanResult& s) {
      nlohmann::json out;
      // JSON has no infinity literal, so unbounded scans are spelled out
      if (std::isfinite(s.constant))
        out["constant"] = s.constant;
      else
        out["constant"] = "inf";
      out["worst_t"] = s.worst_t;
      return out;
    };
    const auto mc_grid = regstop::muckenhoupt_t_grid(ss);
    const auto reg_grid = regstop::regularity_t_grid(ss);
    const auto reg_grid1 = regstop::regularity_t_grid(ss1);
    j["muckenhoupt"]["p1"] = scan_json(regstop::muckenhoupt_constant(ss, 1, mc_grid));
    j["muckenhoupt"]["p2"] = scan_json(regstop::muckenhoupt_constant(ss, 2, mc_grid));
    j["regularity"]["tikhonov_p1"] =
        scan_json(regstop::regularity_constant(ss, 1, regstop::FilterKind::tikhonov, reg_grid));
    j["regularity"]["tikhonov_p2"] =
        scan_json(regstop::regularity_constant(ss, 2, regstop::FilterKind::tikhonov, reg_grid));
    j["regularity"]["landweber_p1"] =
        scan_json(regstop::regularity_constant(ss1, 1, regstop::FilterKind::landweber, reg_grid1));
    j["regularity"]["landweber_p2"] =
        scan_json(regstop::regularity_constant(ss1, 2, regstop::FilterKind::landweber, reg_grid1));

    const regstop::TccReport tcc = regstop::tcc_ratio(prob, center, radius, samples, seed);
    j["tcc"]["radius"] = radius;
    j["tcc"]["samples"] = samples;
    j["tcc"]["used"] = tcc.used;
    j["tcc"]["skipped"] = tcc.skipped;
    j["tcc"]["eta_max"] = tcc.eta_max;
    j["tcc"]["eta_median"] = tcc.eta_median;
    j["tcc"]["eta_p90"] = tcc.eta_p90;

    return dup_string(j.dump(2) + "\n");
  });
}

} /* extern "C" */
