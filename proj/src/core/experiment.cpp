#include "core/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "core/rng.hpp"

namespace regstop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class ConfigReader {
 public:
  void add(const std::string& key, const std::string& value) {
    if (entries_.count(key)) {
      issue(key, "duplicate key");
      return;
    }
    entries_[key] = value;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  void issue(const std::string& key, const std::string& message) {
    issues_.push_back({key, message});
  }

  template <class F>
  void take(const std::string& key, F&& parse) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    seen_.insert(it->first);
    try {
      parse(it->second);
    } catch (const std::exception& e) {
      issue(key, e.what());
    }
  }

  void finish() {
    for (const auto& [key, value] : entries_) {
      (void)value;
      if (!seen_.count(key)) issue(key, "unknown key");
    }
    if (!issues_.empty()) throw ConfigError(std::move(issues_));
  }

 private:
  std::map<std::string, std::string> entries_;
  std::set<std::string> seen_;
  std::vector<ConfigIssue> issues_;
};

double parse_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

uint64_t parse_uint(const std::string& s) {
  size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size() || s.find('-') != std::string::npos)
    throw std::invalid_argument("not a non-negative integer: '" + s + "'");
  return v;
}

bool parse_switch(const std::string& s) {
  if (s == "on" || s == "true") return true;
  if (s == "off" || s == "false") return false;
  throw std::invalid_argument("expected on/off, got '" + s + "'");
}

/// delta lists accept either explicit values "1e-3,2e-3" or the shorthand
/// "logspace:lo:hi:count".
std::vector<double> parse_delta_list(const std::string& s) {
  if (s.rfind("logspace:", 0) == 0) {
    const auto parts = split_list([&] {
      std::string t = s.substr(9);
      std::replace(t.begin(), t.end(), ':', ',');
      return t;
    }());
    if (parts.size() != 3) throw std::invalid_argument("logspace needs lo:hi:count");
    return log_spaced(parse_double(parts[0]), parse_double(parts[1]),
                      static_cast<int>(parse_int(parts[2])));
  }
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid config";
        for (const auto& i : issues) msg += "\n  " + i.key + ": " + i.message;
        return msg;
      }()),
      issues_(std::move(issues)) {}

ExperimentConfig parse_config(const std::string& text) {
  ConfigReader reader;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      reader.issue("line " + std::to_string(lineno), "expected key = value");
      continue;
    }
    reader.add(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }

  ExperimentConfig cfg;
  reader.take("problem", [&](const std::string& v) {
    const auto& names = problem_names();
    if (std::find(names.begin(), names.end(), v) == names.end())
      throw std::invalid_argument("unknown problem '" + v + "'");
    cfg.problem = v;
  });
  reader.take("n", [&](const std::string& v) {
    cfg.n = static_cast<int>(parse_int(v));
    if (cfg.n < 8) throw std::invalid_argument("n must be at least 8");
  });
  reader.take("fine_factor", [&](const std::string& v) {
    cfg.fine_factor = static_cast<int>(parse_int(v));
    if (cfg.fine_factor < 1) throw std::invalid_argument("fine_factor must be at least 1");
  });
  reader.take("delta_rel_list", [&](const std::string& v) {
    cfg.delta_rel_list = parse_delta_list(v);
    for (double d : cfg.delta_rel_list)
      if (!(d > 0.0) || !(d < 1.0)) throw std::invalid_argument("levels must lie in (0, 1)");
  });
  reader.take("seeds", [&](const std::string& v) {
    cfg.seeds.clear();
    for (const auto& item : split_list(v)) cfg.seeds.push_back(parse_uint(item));
    if (cfg.seeds.empty()) throw std::invalid_argument("empty list");
  });
  reader.take("rules", [&](const std::string& v) {
    cfg.rules.clear();
    for (const auto& item : split_list(v)) {
      const auto r = rule_from_string(item);
      if (!r) throw std::invalid_argument("unknown rule '" + item + "'");
      if (std::find(cfg.rules.begin(), cfg.rules.end(), *r) != cfg.rules.end())
        throw std::invalid_argument("rule '" + item + "' listed twice");
      cfg.rules.push_back(*r);
    }
    if (cfg.rules.empty()) throw std::invalid_argument("empty list");
  });
  reader.take("tau", [&](const std::string& v) {
    cfg.tau = parse_double(v);
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  });
  reader.take("kmax", [&](const std::string& v) {
    cfg.kmax = static_cast<int>(parse_int(v));
    if (cfg.kmax < 1) throw std::invalid_argument("kmax must be at least 1");
  });
  reader.take("k_min_search", [&](const std::string& v) {
    cfg.k_min_search = static_cast<int>(parse_int(v));
    if (cfg.k_min_search < 1) throw std::invalid_argument("k_min_search must be at least 1");
  });
  reader.take("omega_mode", [&](const std::string& v) {
    if (v == "auto_at_dagger")
      cfg.omega_mode = ExperimentConfig::OmegaMode::auto_at_dagger;
    else if (v == "auto_at_x0")
      cfg.omega_mode = ExperimentConfig::OmegaMode::auto_at_x0;
    else if (v == "fixed")
      cfg.omega_mode = ExperimentConfig::OmegaMode::fixed;
    else
      throw std::invalid_argument("expected auto_at_dagger, auto_at_x0 or fixed");
  });
  reader.take("omega", [&](const std::string& v) {
    cfg.omega = parse_double(v);
    if (!(cfg.omega > 0.0)) throw std::invalid_argument("omega must be positive");
  });
  reader.take("omega_safety", [&](const std::string& v) {
    cfg.omega_safety = parse_double(v);
    if (!(cfg.omega_safety > 0.0)) throw std::invalid_argument("omega_safety must be positive");
  });
  reader.take("output_dir", [&](const std::string& v) {
    if (v.empty()) throw std::invalid_argument("must not be empty");
    cfg.output_dir = v;
  });
  reader.take("timing", [&](const std::string& v) { cfg.timing = parse_switch(v); });
  reader.take("series", [&](const std::string& v) { cfg.series = parse_switch(v); });
  reader.take("divergence_radius", [&](const std::string& v) {
    cfg.divergence_radius = parse_double(v);
    if (!(cfg.divergence_radius > 0.0)) throw std::invalid_argument("radius must be positive");
  });
  reader.take("residual_blowup", [&](const std::string& v) {
    cfg.residual_blowup = parse_double(v);
    if (cfg.residual_blowup < 0.0) throw std::invalid_argument("must be >= 0 (0 disables)");
  });

  if (!reader.has("problem")) reader.issue("problem", "required key missing");
  if (cfg.omega_mode == ExperimentConfig::OmegaMode::fixed && !reader.has("omega"))
    reader.issue("omega", "required when omega_mode = fixed");
  if (reader.has("omega") && cfg.omega_mode != ExperimentConfig::OmegaMode::fixed)
    reader.issue("omega", "only meaningful with omega_mode = fixed");
  if (reader.has("fine_factor") && reader.has("problem") && cfg.problem != "diffusion1d")
    reader.issue("fine_factor", "only diffusion1d synthesizes data on a finer grid");
  reader.finish();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{path, "cannot open config file"}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

struct CellDecisions {
  std::vector<ReportRow> rows;
  SeriesBundle bundle;
};

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

ReportRow base_row(const ExperimentConfig& cfg, double delta_rel, double delta_abs, uint64_t seed,
                   Rule rule) {
  ReportRow row;
  row.problem = cfg.problem;
  row.delta_rel = delta_rel;
  row.delta_abs = delta_abs;
  row.seed = seed;
  row.rule = rule;
  row.abs_error = kNaN;
  row.error_ratio = kNaN;
  row.k_ratio = kNaN;
  return row;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg_in) {
  ProblemPtr p = make_problem(cfg_in.problem, {cfg_in.n, cfg_in.fine_factor});
  const BenchmarkSetup& bench = p->benchmark();

  ExperimentConfig cfg = cfg_in;
  if (cfg.n == 0) cfg.n = p->domain().grid().n;
  if (cfg.tau == 0.0) cfg.tau = bench.tau;
  if (cfg.kmax == 0) cfg.kmax = bench.kmax;
  if (cfg.k_min_search == 0) cfg.k_min_search = bench.k_min_search;
  if (cfg.delta_rel_list.empty()) cfg.delta_rel_list = bench.delta_rel_list;
  if (cfg.divergence_radius == 0.0)
    cfg.divergence_radius = 10.0 * p->domain().norm(subtract(bench.x_dagger, bench.x0));

  ExperimentReport report;
  report.config = cfg;

  switch (cfg.omega_mode) {
    case ExperimentConfig::OmegaMode::auto_at_dagger:
      report.omega = auto_stepsize(*p, bench.x_dagger, cfg.omega_safety);
      break;
    case ExperimentConfig::OmegaMode::auto_at_x0:
      report.omega = auto_stepsize(*p, bench.x0, cfg.omega_safety);
      break;
    case ExperimentConfig::OmegaMode::fixed:
      report.omega = cfg.omega;
      break;
  }
  report.config.omega = report.omega;

  const GridFunction y = p->synthesize_data();

  // descending noise levels, keeping each level's position in the
  // configured list so its noise stream stays put under reordering
  std::vector<std::pair<double, int>> levels;
  for (size_t i = 0; i < cfg.delta_rel_list.size(); ++i)
    levels.emplace_back(cfg.delta_rel_list[i], static_cast<int>(i));
  std::stable_sort(levels.begin(), levels.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  IterationConfig iter;
  iter.omega = report.omega;
  iter.kmax = cfg.kmax;
  iter.divergence_radius = cfg.divergence_radius;
  iter.residual_blowup = cfg.residual_blowup;

  for (const auto& [delta_rel, delta_index] : levels) {
    for (uint64_t seed : cfg.seeds) {
      double delta_abs = 0.0;
      try {
        const NoisyData noisy = add_noise(y, delta_rel, derive_seed(seed, static_cast<uint64_t>(delta_index)));
        delta_abs = noisy.delta_abs;
        const PairedTrace trace = run_paired(*p, noisy.y_delta, bench.x0, iter, &bench.x_dagger);

        const RuleDecision opt = k_opt_oracle(trace);
        const double opt_error = trace.error[static_cast<size_t>(opt.k_star)];

        for (Rule rule : cfg.rules) {
          const auto t_start = std::chrono::steady_clock::now();
          RuleDecision d;
          d.rule = rule;
          switch (rule) {
            case Rule::dp:
              d = discrepancy_stop(trace, cfg.tau, delta_abs);
              break;
            case Rule::opt:
              d = opt;
              break;
            default: {
              PsiSeries psi;
              switch (rule) {
                case Rule::hd: psi = psi_hd(trace); break;
                case Rule::hr: psi = psi_hr(trace); break;
                case Rule::qo: psi = psi_qo(trace); break;
                default: psi = psi_ls(trace); break;
              }
              const int k_max_search = std::min(cfg.kmax, psi.defined_up_to());
              if (k_max_search >= cfg.k_min_search)
                d = select_kstar(psi, cfg.k_min_search, k_max_search);
              else
                d.rule = rule;  // series too short: not attained
              break;
            }
          }
          ReportRow row = base_row(cfg, delta_rel, delta_abs, seed, rule);
          if (d.attained) {
            row.attained = true;
            row.k_star = d.k_star;
            row.boundary_hit = d.boundary_hit;
            row.abs_error = trace.error[static_cast<size_t>(d.k_star)];
            row.error_ratio = safe_ratio(row.abs_error, opt_error);
            row.k_ratio = safe_ratio(static_cast<double>(d.k_star), static_cast<double>(opt.k_star));
          }
          if (cfg.timing) {
            const auto t_end = std::chrono::steady_clock::now();
            row.wall_time_ms = std::chrono::duration<double, std::milli>(t_end - t_start).count();
          }
          report.rows.push_back(std::move(row));
        }

        if (cfg.series) {
          SeriesBundle b;
          b.delta_index = delta_index;
          b.delta_rel = delta_rel;
          b.seed = seed;
          b.residual = trace.residual_norm;
          b.error = trace.error;
          b.hd = psi_hd(trace);
          b.hr = psi_hr(trace);
          b.qo = psi_qo(trace);
          b.ls = psi_ls(trace);
          b.dp = psi_dp(trace, cfg.tau, delta_abs);
          report.series.push_back(std::move(b));
        }
      } catch (const std::exception&) {
        // a failed cell still reports: every rule row marked not attained
        for (Rule rule : cfg.rules)
          report.rows.push_back(base_row(cfg, delta_rel, delta_abs, seed, rule));
      }
    }
  }
  return report;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string csv_cell(double v) {
  if (std::isnan(v)) return "";
  return format_double(v);
}

}  // namespace

std::string format_report_csv(const ExperimentReport& report) {
  std::string out =
      "problem,delta_rel,delta_abs,seed,rule,k_star,attained,boundary_hit,"
      "abs_error,error_ratio,k_ratio,wall_time_ms\n";
  for (const ReportRow& r : report.rows) {
    out += r.problem;
    out += ',';
    out += format_double(r.delta_rel);
    out += ',';
    out += format_double(r.delta_abs);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += to_string(r.rule);
    out += ',';
    out += std::to_string(r.k_star);
    out += ',';
    out += r.attained ? "true" : "false";
    out += ',';
    out += r.boundary_hit ? "true" : "false";
    out += ',';
    out += csv_cell(r.abs_error);
    out += ',';
    out += csv_cell(r.error_ratio);
    out += ',';
    out += csv_cell(r.k_ratio);
    out += ',';
    out += format_double(r.wall_time_ms);
    out += '\n';
  }
  return out;
}

void write_report_csv(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_report_csv(report);
}

namespace {

std::string psi_cell(const PsiSeries& psi, int k) {
  if (k < psi.first_k || k > psi.defined_up_to()) return "";
  return format_double(psi.at(k));
}

}  // namespace

void write_series_files(const ExperimentReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const SeriesBundle& b : report.series) {
    const std::string path = dir + "/series_" + report.config.problem + "_d" +
                             std::to_string(b.delta_index) + "_s" + std::to_string(b.seed) + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "k,residual,error,psi_hd,psi_hr,psi_qo,psi_ls,psi_dp\n";
    for (size_t k = 0; k < b.residual.size(); ++k) {
      const int ki = static_cast<int>(k);
      out << ki << ',' << format_double(b.residual[k]) << ','
          << (k < b.error.size() ? format_double(b.error[k]) : std::string()) << ','
          << psi_cell(b.hd, ki) << ',' << psi_cell(b.hr, ki) << ',' << psi_cell(b.qo, ki) << ','
          << psi_cell(b.ls, ki) << ',' << psi_cell(b.dp, ki) << '\n';
    }
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string summarize(const ExperimentReport& report) {
  std::ostringstream out;
  out << "problem " << report.config.problem << "  n " << report.config.n << "  kmax "
      << report.config.kmax << "  tau " << format_double(report.config.tau) << "  omega "
      << format_double(report.omega) << "\n";
  out << "rule    runs  attained  boundary  err_ratio med/max      k_ratio med/max\n";
  for (Rule rule : report.config.rules) {
    int runs = 0, attained = 0, boundary = 0;
    std::vector<double> err_ratios, k_ratios;
    for (const ReportRow& r : report.rows) {
      if (r.rule != rule) continue;
      ++runs;
      if (!r.attained) continue;
      ++attained;
      if (r.boundary_hit) ++boundary;
      if (std::isfinite(r.error_ratio)) err_ratios.push_back(r.error_ratio);
      if (std::isfinite(r.k_ratio)) k_ratios.push_back(r.k_ratio);
    }
    char line[160];
    std::string em = err_ratios.empty() ? "-" : format_double(median(err_ratios));
    std::string ex = err_ratios.empty()
                         ? "-"
                         : format_double(*std::max_element(err_ratios.begin(), err_ratios.end()));
    std::string km = k_ratios.empty() ? "-" : format_double(median(k_ratios));
    std::string kx = k_ratios.empty()
                         ? "-"
                         : format_double(*std::max_element(k_ratios.begin(), k_ratios.end()));
    std::snprintf(line, sizeof(line), "%-6s %5d %9d %9d  %11s/%-11s %9s/%-9s\n", to_string(rule),
                  runs, attained, boundary, em.c_str(), ex.c_str(), km.c_str(), kx.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace regstop
