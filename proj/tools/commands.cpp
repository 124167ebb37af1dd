#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "chsbs/chsbs.h"

namespace chsbs_cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TaskOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;
  bool failed = false;    // numerical error
  bool rejected = false;  // fit rejected
};

// Runs tasks on a small pool; outputs land in task order, so results do not depend on scheduling.
std::vector<TaskOutput> run_tasks(std::size_t n, int jobs, const std::function<void(std::size_t, TaskOutput&)>& fn) {
  std::vector<TaskOutput> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i, out[i]);
  };
  const std::size_t threads = std::min<std::size_t>(std::max(jobs, 1), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

ResultRow error_row(const std::string& state, const std::string& quantity, const std::string& provenance) {
  ResultRow r;
  r.state = state;
  r.quantity = quantity;
  r.parameter = r.value = r.uncertainty = r.window_lo = r.window_hi = kNaN;
  r.provenance = provenance;
  r.note = std::string("error: ") + chsbs_last_error();
  return r;
}

ResultRow row(const std::string& state, const std::string& quantity, double value, const std::string& provenance) {
  ResultRow r;
  r.state = state;
  r.quantity = quantity;
  r.parameter = r.uncertainty = r.window_lo = r.window_hi = kNaN;
  r.value = value;
  r.provenance = provenance;
  return r;
}

bool is_fock_diagonal(const std::string& state) { return state.rfind("thermal", 0) != 0; }

int fock_number(const std::string& state) {
  if (state == "vacuum") return 0;
  if (state.rfind("fock:", 0) == 0) return std::stoi(state.substr(5));
  return -1;
}

// standard error of a log-log slope from r^2 and the sample count
double slope_error(const chsbs_fit_result& f) {
  if (!f.accepted || f.points <= 2) return kNaN;
  return std::abs(f.exponent) * std::sqrt(std::max(0.0, 1.0 / f.r_squared - 1.0) / (f.points - 2));
}

ResultRow fit_row(const std::string& state, const std::string& quantity, const chsbs_fit_result& f,
                  const std::string& provenance) {
  ResultRow r = row(state, quantity, f.exponent, provenance);
  r.uncertainty = slope_error(f);
  r.window_lo = f.t_min;
  r.window_hi = f.t_max;
  r.points = f.points;
  char buf[64];
  std::snprintf(buf, sizeof buf, "r^2=%.12g", f.r_squared);
  r.note = f.accepted ? buf : std::string("rejected: ") + f.diagnostic;
  return r;
}

struct Env {
  const RunConfig& cfg;
  const CommandOptions& opts;
  const Context& ctx;
  double energy_scale;  // multiply energies by this for output
};

std::vector<TaskOutput> cmd_tc(const Env& e) {
  const auto& states = e.cfg.states;
  return run_tasks(states.size(), e.opts.jobs, [&](std::size_t i, TaskOutput& out) {
    const std::string& s = states[i];
    chsbs_tc_result tc{};
    if (chsbs_find_tc(e.ctx.get(), s.c_str(), &tc) != CHSBS_OK) {
      out.rows.push_back(error_row(s, "T_c", "find_tc"));
      out.failed = true;
      return;
    }
    ResultRow r = row(s, "T_c", tc.t_c * e.energy_scale, "find_tc");
    r.uncertainty = (tc.bracket_hi - tc.bracket_lo) * e.energy_scale;
    r.window_lo = tc.bracket_lo * e.energy_scale;
    r.window_hi = tc.bracket_hi * e.energy_scale;
    r.points = e.cfg.scan_points;
    r.note = tc.thermal_mode ? "thermal kernel" : "vacuum kernel; equal to the vacuum T_c by construction";
    if (tc.multiple_roots) {
      r.note += "; " + std::to_string(tc.sign_changes) + " sign changes, largest downward crossing kept";
      out.warnings.push_back(s + ": M(T)-1 changes sign " + std::to_string(tc.sign_changes) + " times");
    }
    out.rows.push_back(r);
    double m = 0.0;
    if (chsbs_mass_slope(e.ctx.get(), s.c_str(), &m) != CHSBS_OK) {
      out.rows.push_back(error_row(s, "mass_slope", "mass_slope"));
      out.failed = true;
      return;
    }
    out.rows.push_back(row(s, "mass_slope", m / e.energy_scale, "mass_slope"));
  });
}

std::vector<TaskOutput> cmd_exponents(const Env& e) {
  const auto& states = e.cfg.states;
  // two tasks per state: gamma and nu
  return run_tasks(2 * states.size(), e.opts.jobs, [&](std::size_t i, TaskOutput& out) {
    const std::string& s = states[i / 2];
    const bool gamma = i % 2 == 0;
    chsbs_fit_result f{};
    const auto st = gamma ? chsbs_fit_gamma(e.ctx.get(), s.c_str(), &f) : chsbs_fit_nu(e.ctx.get(), s.c_str(), &f);
    const char* q = gamma ? "gamma" : "nu";
    const char* prov = gamma ? "fit_gamma" : "fit_nu";
    if (st != CHSBS_OK) {
      out.rows.push_back(error_row(s, q, prov));
      out.failed = true;
      return;
    }
    out.rows.push_back(fit_row(s, q, f, prov));
    if (!f.accepted) {
      out.rejected = true;
      out.warnings.push_back(s + ": " + q + " fit rejected (" + f.diagnostic + ")");
    }
  });
}

std::vector<TaskOutput> cmd_xi(const Env& e) {
  const auto& states = e.cfg.states;
  const double t = e.cfg.xi_reduced_t;
  // task 0 is the Fock(0) reference
  auto outs = run_tasks(states.size() + 1, e.opts.jobs, [&](std::size_t i, TaskOutput& out) {
    const std::string s = i == 0 ? "fock:0" : states[i - 1];
    double xi = 0.0, xi2 = 0.0;
    if (chsbs_correlation_length(e.ctx.get(), s.c_str(), t, &xi, &xi2) != CHSBS_OK) {
      out.rows.push_back(error_row(s, "xi", "correlation_length"));
      out.failed = true;
      return;
    }
    ResultRow r = row(s, "xi", xi, "correlation_length");
    r.parameter = t;
    r.points = 12;
    r.note = "tail fit on [3, 10] xi";
    out.rows.push_back(r);
    ResultRow m = row(s, "xi_second_moment", xi2, "second_moment_length");
    m.parameter = t;
    out.rows.push_back(m);
  });
  const TaskOutput ref = outs.front();
  outs.erase(outs.begin());
  for (std::size_t i = 0; i < outs.size(); ++i) {
    auto& out = outs[i];
    if (out.failed || ref.failed) {
      if (!out.failed) out.failed = true;
      ResultRow r = row(states[i], "xi_ratio", kNaN, "correlation_length");
      r.note = "error: no reference or no xi for this state";
      out.rows.push_back(r);
      continue;
    }
    ResultRow r = row(states[i], "xi_ratio", out.rows[0].value / ref.rows[0].value, "correlation_length");
    r.parameter = t;
    const int n = fock_number(states[i]);
    char buf[64];
    if (n >= 0) std::snprintf(buf, sizeof buf, "xi(n)/xi(0), expected sqrt(n+1)=%.12g", std::sqrt(n + 1.0));
    else std::snprintf(buf, sizeof buf, "xi/xi(fock:0)");
    r.note = buf;
    out.rows.push_back(r);
  }
  return outs;
}

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo * std::pow(hi / lo, i / (n - 1.0));
  return g;
}

std::vector<TaskOutput> cmd_vertex(const Env& e) {
  const auto& states = e.cfg.states;
  const auto ts = geometric(e.cfg.vertex_t_min, e.cfg.vertex_t_max, e.cfg.vertex_points);
  return run_tasks(states.size(), e.opts.jobs, [&](std::size_t i, TaskOutput& out) {
    const std::string& s = states[i];
    chsbs_tc_result tc{};
    if (chsbs_find_tc(e.ctx.get(), s.c_str(), &tc) != CHSBS_OK) {
      out.rows.push_back(error_row(s, "vertex", "find_tc"));
      out.failed = true;
      return;
    }
    for (double t : ts) {
      double v = 0.0;
      if (chsbs_onshell_vertex(e.ctx.get(), s.c_str(), tc.t_c * (1.0 + t), &v) != CHSBS_OK) {
        ResultRow r = error_row(s, "vertex", "onshell_vertex");
        r.parameter = t;
        out.rows.push_back(r);
        out.failed = true;
        continue;
      }
      ResultRow r = row(s, "vertex", v * e.energy_scale, "onshell_vertex");
      r.parameter = t;
      out.rows.push_back(r);
    }
  });
}

std::vector<TaskOutput> cmd_scan(const Env& e) {
  const auto& states = e.cfg.states;
  const auto Ts = geometric(e.cfg.scan_min * e.cfg.fermi_energy, e.cfg.scan_max * e.cfg.fermi_energy,
                            e.cfg.scan_table_points);
  return run_tasks(states.size(), e.opts.jobs, [&](std::size_t i, TaskOutput& out) {
    const std::string& s = states[i];
    for (double T : Ts) {
      double m = 0.0;
      ResultRow r;
      if (chsbs_critical_function(e.ctx.get(), s.c_str(), T, &m) == CHSBS_OK) {
        r = row(s, "M", m, "critical_function");
      } else {
        // outside the lifetime model's range: recorded, not fatal
        r = error_row(s, "M", "critical_function");
      }
      r.parameter = T * e.energy_scale;
      r.note = r.note.empty() ? (is_fock_diagonal(s) ? "M_vac" : "M_th") : r.note;
      out.rows.push_back(r);
    }
  });
}

std::vector<TaskOutput> cmd_verify(const Env& e, int& exit_code) {
  TaskOutput out;
  chsbs_verify_report* rep = nullptr;
  if (chsbs_verify(e.ctx.get(), &rep) != CHSBS_OK) {
    out.rows.push_back(error_row("-", "verify", "run_verification"));
    out.failed = true;
    return {out};
  }
  const std::size_t n = chsbs_verify_count(rep);
  for (std::size_t i = 0; i < n; ++i) {
    ResultRow r = row("-", chsbs_verify_name(rep, i), chsbs_verify_value(rep, i), "run_verification");
    r.uncertainty = chsbs_verify_tolerance(rep, i);
    const bool pass = chsbs_verify_passed(rep, i) == 1;
    r.note = std::string(pass ? "pass" : "FAIL") + ": " + chsbs_verify_detail(rep, i);
    if (!pass) out.warnings.push_back(r.quantity + " failed: " + chsbs_verify_detail(rep, i));
    out.rows.push_back(r);
  }
  if (!chsbs_verify_all_passed(rep)) exit_code = kExitVerifyFailed;
  chsbs_verify_report_destroy(rep);
  return {out};
}

}  // namespace

Context::Context(const RunConfig& cfg, const CommandOptions& opts) {
  if (chsbs_context_create(&ctx_) != CHSBS_OK) throw std::runtime_error(chsbs_last_error());
  set("model", chsbs_set_model(ctx_, cfg.gtilde, cfg.delta_c, cfg.fermi_energy, cfg.fermi_momentum, cfg.q0));
  if (cfg.lifetime == "constant") set("model.inverse_tau", chsbs_set_lifetime_constant(ctx_, cfg.inverse_tau));
  else set("model.lifetime", chsbs_set_lifetime_fermi_liquid(ctx_));
  set("kernel.convention", chsbs_set_convention(ctx_, cfg.convention.c_str()));
  set("kernel.weight", chsbs_set_weight(ctx_, cfg.weight.c_str()));
  set("kernel.fock_form", chsbs_set_fock_form(ctx_, cfg.fock_form.c_str()));
  set("scan", chsbs_set_scan(ctx_, cfg.scan_min, cfg.scan_max, cfg.scan_points));
  set("fit.gamma", chsbs_set_gamma_window(ctx_, cfg.gamma_t_min, cfg.gamma_t_max, cfg.gamma_points));
  set("fit.nu", chsbs_set_nu_window(ctx_, cfg.nu_t_min, cfg.nu_t_max, cfg.nu_points));
  set("fit.xi_reduced_t", chsbs_set_xi_reduced_t(ctx_, cfg.xi_reduced_t));
  set("quad", chsbs_set_correlation_tolerance(ctx_, cfg.corr_rel_tol, cfg.corr_max_rel_error));
  set("fault", chsbs_set_fault_injection(ctx_, opts.inject_fault ? 1 : 0));
}

Context::~Context() { chsbs_context_destroy(ctx_); }

void Context::set(const char* key, chsbs_status s) {
  if (s != CHSBS_OK) throw ConfigError(key, chsbs_last_error());
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> n{"tc", "exponents", "xi", "vertex", "verify", "scan"};
  return n;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opts) {
  const Context ctx(cfg, opts);
  const Env env{cfg, opts, ctx, cfg.energy_unit == "delta_c" ? 1.0 / cfg.delta_c : 1.0};
  CommandResult res;
  res.table.command = name;
  res.table.unit = cfg.energy_unit == "delta_c" ? "delta_c" : "input";
  std::vector<TaskOutput> outs;
  int verify_code = kExitOk;
  if (name == "tc") outs = cmd_tc(env);
  else if (name == "exponents") outs = cmd_exponents(env);
  else if (name == "xi") outs = cmd_xi(env);
  else if (name == "vertex") outs = cmd_vertex(env);
  else if (name == "scan") outs = cmd_scan(env);
  else if (name == "verify") outs = cmd_verify(env, verify_code);
  else throw ConfigError("", "unknown command '" + name + "'");

  bool failed = false, rejected = false;
  for (auto& o : outs) {
    for (auto& r : o.rows) res.table.rows.push_back(std::move(r));
    for (auto& w : o.warnings) res.warnings.push_back(std::move(w));
    failed = failed || o.failed;
    rejected = rejected || o.rejected;
  }
  if (name == "tc") {
    // Fock-diagonal rows share the vacuum kernel; say so if they ever disagree
    const ResultRow* first = nullptr;
    for (const auto& r : res.table.rows) {
      if (r.quantity != "T_c" || !is_fock_diagonal(r.state) || std::isnan(r.value)) continue;
      if (!first) first = &r;
      else if (r.value != first->value) res.warnings.push_back("Fock-diagonal T_c values differ: " + r.state);
    }
  }
  if (failed) res.exit_code = kExitNumerical;
  else if (rejected && opts.strict) res.exit_code = kExitNumerical;
  else res.exit_code = verify_code;
  return res;
}

}  // namespace chsbs_cli
