#include "chsbs/chsbs.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "chsbs/critical.hpp"
#include "chsbs/sectors.hpp"
#include "chsbs/verify.hpp"

struct chsbs_context {
  chsbs::VerifyConfig config;  // parameters and every option the queries need
};

struct chsbs_verify_report {
  chsbs::VerifyReport report;
};

namespace {

thread_local std::string g_last_error;

chsbs_status to_status(chsbs::ErrorCode code) {
  using chsbs::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return CHSBS_INVALID_ARGUMENT;
    case ErrorCode::Domain: return CHSBS_DOMAIN;
    case ErrorCode::Criticality: return CHSBS_CRITICALITY;
    case ErrorCode::NoSignChange: return CHSBS_NO_SIGN_CHANGE;
    case ErrorCode::FitRejected: return CHSBS_FIT_REJECTED;
    case ErrorCode::Quadrature: return CHSBS_QUADRATURE;
    case ErrorCode::Singular: return CHSBS_SINGULAR;
  }
  return CHSBS_INTERNAL;
}

chsbs_status set_error(chsbs_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs fn, mapping exceptions onto status codes.
template <class F>
chsbs_status guard(F&& fn) {
  try {
    g_last_error.clear();
    fn();
    return CHSBS_OK;
  } catch (const chsbs::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CHSBS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CHSBS_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (!p) chsbs::fail(chsbs::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

chsbs::InitialPhotonState state_arg(const char* s) {
  need(s, "state");
  return chsbs::parse_state(s);
}

chsbs::FitWindow window(double t_min, double t_max, int points) {
  if (!(t_min > 0.0 && t_max > t_min) || points < 3)
    chsbs::fail(chsbs::ErrorCode::InvalidArgument, "fit window must satisfy 0 < t_min < t_max with at least 3 points");
  return {t_min, t_max, points};
}

void copy_fit(const chsbs::ExponentFit& f, chsbs_fit_result* out) {
  out->exponent = f.exponent;
  out->t_min = f.t_min;
  out->t_max = f.t_max;
  out->points = f.points;
  out->r_squared = f.r_squared;
  out->residual_max = f.residual_max;
  out->accepted = f.accepted ? 1 : 0;
  std::memset(out->diagnostic, 0, sizeof out->diagnostic);
  std::strncpy(out->diagnostic, f.diagnostic.c_str(), sizeof out->diagnostic - 1);
}

chsbs::CorrelationSetup setup(const chsbs_context* ctx, const chsbs::InitialPhotonState& s) {
  const auto& c = ctx->config;
  return chsbs::correlation_setup(s, c.params, c.lifetime, c.critical, 1.0, chsbs::AnisotropyModel::Angular,
                                  c.fock_form);
}

chsbs::BigRational rational_arg(const char* text) {
  need(text, "rational");
  const std::string s(text);
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return chsbs::BigRational(chsbs::BigInteger(s));
    const chsbs::BigInteger den(s.substr(slash + 1));
    if (den == 0) chsbs::fail(chsbs::ErrorCode::InvalidArgument, "zero denominator in '" + s + "'");
    return chsbs::BigRational(chsbs::BigInteger(s.substr(0, slash))) / chsbs::BigRational(den);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const chsbs::Error*>(&e)) throw;
    chsbs::fail(chsbs::ErrorCode::InvalidArgument, "'" + s + "' is not a rational p/q");
  }
}

const chsbs::CheckResult* check_at(const chsbs_verify_report* r, size_t i) {
  if (!r || i >= r->report.checks.size()) return nullptr;
  return &r->report.checks[i];
}

}  // namespace

extern "C" {

const char* chsbs_version(void) { return "1.0.0"; }

const char* chsbs_status_string(chsbs_status status) {
  switch (status) {
    case CHSBS_OK: return "ok";
    case CHSBS_INVALID_ARGUMENT: return "invalid argument";
    case CHSBS_DOMAIN: return "domain error";
    case CHSBS_CRITICALITY: return "at criticality";
    case CHSBS_NO_SIGN_CHANGE: return "no sign change";
    case CHSBS_FIT_REJECTED: return "fit rejected";
    case CHSBS_QUADRATURE: return "quadrature failure";
    case CHSBS_SINGULAR: return "singular system";
    case CHSBS_BUFFER_TOO_SMALL: return "buffer too small";
    case CHSBS_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* chsbs_last_error(void) { return g_last_error.c_str(); }

chsbs_status chsbs_context_create(chsbs_context** out) {
  return guard([&] {
    need(out, "output pointer");
    *out = new chsbs_context{};
  });
}

void chsbs_context_destroy(chsbs_context* ctx) { delete ctx; }

chsbs_status chsbs_set_model(chsbs_context* ctx, double gtilde, double delta_c, double fermi_energy,
                             double fermi_momentum, double q0) {
  return guard([&] {
    need(ctx, "context");
    if (!(gtilde > 0.0)) chsbs::fail(chsbs::ErrorCode::InvalidArgument, "gtilde must be positive");
    const auto p = chsbs::ModelParams::from_gtilde(gtilde, delta_c, fermi_energy, fermi_momentum, q0);
    p.validate();
    ctx->config.params = p;
  });
}

chsbs_status chsbs_set_lifetime_constant(chsbs_context* ctx, double inverse_tau) {
  return guard([&] {
    need(ctx, "context");
    const chsbs::LifetimeModel lt = chsbs::ConstantLifetime{inverse_tau};
    chsbs::validate(lt);
    ctx->config.lifetime = lt;
  });
}

chsbs_status chsbs_set_lifetime_fermi_liquid(chsbs_context* ctx) {
  return guard([&] {
    need(ctx, "context");
    ctx->config.lifetime = chsbs::FermiLiquidLifetime{};
  });
}

chsbs_status chsbs_set_convention(chsbs_context* ctx, const char* name) {
  return guard([&] {
    need(ctx, "context");
    need(name, "convention");
    ctx->config.critical.kernel.convention = chsbs::parse_convention(name);
  });
}

chsbs_status chsbs_set_weight(chsbs_context* ctx, const char* name) {
  return guard([&] {
    need(ctx, "context");
    need(name, "weight");
    ctx->config.critical.kernel.weight = chsbs::parse_weight(name);
  });
}

chsbs_status chsbs_set_fock_form(chsbs_context* ctx, const char* name) {
  return guard([&] {
    need(ctx, "context");
    need(name, "Fock form");
    ctx->config.fock_form = chsbs::parse_fock_form(name);
  });
}

chsbs_status chsbs_set_scan(chsbs_context* ctx, double scan_min, double scan_max, int points) {
  return guard([&] {
    need(ctx, "context");
    if (!(scan_min > 0.0 && scan_max > scan_min && scan_max <= 1.0) || points < 3)
      chsbs::fail(chsbs::ErrorCode::InvalidArgument, "scan needs 0 < min < max <= 1 and at least 3 points");
    ctx->config.critical.scan_min = scan_min;
    ctx->config.critical.scan_max = scan_max;
    ctx->config.critical.scan_points = points;
  });
}

chsbs_status chsbs_set_gamma_window(chsbs_context* ctx, double t_min, double t_max, int points) {
  return guard([&] {
    need(ctx, "context");
    ctx->config.gamma_window = window(t_min, t_max, points);
  });
}

chsbs_status chsbs_set_nu_window(chsbs_context* ctx, double t_min, double t_max, int points) {
  return guard([&] {
    need(ctx, "context");
    ctx->config.nu_window = window(t_min, t_max, points);
  });
}

chsbs_status chsbs_set_xi_reduced_t(chsbs_context* ctx, double reduced_t) {
  return guard([&] {
    need(ctx, "context");
    if (!(reduced_t > 0.0)) chsbs::fail(chsbs::ErrorCode::InvalidArgument, "reduced temperature must be positive");
    ctx->config.xi_reduced_t = reduced_t;
  });
}

chsbs_status chsbs_set_correlation_tolerance(chsbs_context* ctx, double rel_tol, double max_rel_error) {
  return guard([&] {
    need(ctx, "context");
    if (!(rel_tol > 0.0 && max_rel_error > 0.0))
      chsbs::fail(chsbs::ErrorCode::InvalidArgument, "tolerances must be positive");
    ctx->config.correlation.rel_tol = rel_tol;
    ctx->config.correlation.max_rel_error = max_rel_error;
  });
}

chsbs_status chsbs_set_fault_injection(chsbs_context* ctx, int enabled) {
  return guard([&] {
    need(ctx, "context");
    ctx->config.inject_f_fault = enabled != 0;
  });
}

chsbs_status chsbs_canonical_state(const char* state, char* buffer, size_t size) {
  return guard([&] {
    need(buffer, "buffer");
    const std::string s = chsbs::to_string(state_arg(state));
    if (s.size() + 1 > size) chsbs::fail(chsbs::ErrorCode::InvalidArgument, "buffer too small");
    std::memcpy(buffer, s.c_str(), s.size() + 1);
  });
}

chsbs_status chsbs_kernel_scalars(const chsbs_context* ctx, double T, chsbs_kernel* out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "output");
    const auto& c = ctx->config;
    const auto k = chsbs::kernel_scalars(c.params, c.lifetime, T, c.critical.kernel);
    *out = {k.temperature, k.gamma0, k.a_bcs, k.c2, k.w, k.m_vac, k.m_th};
  });
}

chsbs_status chsbs_critical_function(const chsbs_context* ctx, const char* state, double T, double* out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "output");
    const auto& c = ctx->config;
    *out = chsbs::critical_function(state_arg(state), c.params, c.lifetime, T, c.critical.kernel);
  });
}

chsbs_status chsbs_find_tc(const chsbs_context* ctx, const char* state, chsbs_tc_result* out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "output");
    const auto& c = ctx->config;
    const auto cp = chsbs::find_tc(c.params, c.lifetime, state_arg(state), c.critical);
    *out = {cp.t_c,         cp.bracket_lo, cp.bracket_hi, cp.residual, cp.dm_dt, cp.sign_changes,
            cp.multiple_roots ? 1 : 0, cp.mode == chsbs::CriticalMode::ThermalKernel ? 1 : 0};
  });
}

chsbs_status chsbs_onshell_vertex(const chsbs_context* ctx, const char* state, double T, double* out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "output");
    const auto& c = ctx->config;
    *out = chsbs::onshell_vertex(state_arg(state), c.params, c.lifetime, T, c.critical.kernel);
  });
}

chsbs_status chsbs_vertex_poles(const chsbs_context* ctx, const char* state, double* poles, size_t capacity,
                                size_t* count) {
  chsbs_status st = CHSBS_OK;
  const auto s = guard([&] {
    need(ctx, "context");
    need(count, "count");
    if (capacity > 0) need(poles, "pole buffer");
    const auto& c = ctx->config;
    const auto found = chsbs::locate_vertex_poles(state_arg(state), c.params, c.lifetime, c.critical);
    *count = found.size();
    for (size_t i = 0; i < found.size() && i < capacity; ++i) poles[i] = found[i];
    if (found.size() > capacity) st = set_error(CHSBS_BUFFER_TOO_SMALL, "more poles than buffer capacity");
  });
  return s != CHSBS_OK ? s : st;
}

chsbs_status chsbs_fock_hierarchy(const chsbs_context* ctx, double T, int n, double* values) {
  return guard([&] {
    need(ctx, "context");
    need(values, "output");
    if (n < 0) chsbs::fail(chsbs::ErrorCode::InvalidArgument, "photon number must be non-negative");
    const auto& c = ctx->config;
    const auto k = chsbs::kernel_scalars(c.params, c.lifetime, T, c.critical.kernel);
    chsbs::HierarchyOptions h;
    h.inject_f_fault = c.inject_f_fault;
    const auto v = chsbs::solve_fock_hierarchy(n, k, h).values;
    for (int i = 0; i <= n; ++i) values[i] = v[i];
  });
}

chsbs_status chsbs_mass_slope(const chsbs_context* ctx, const char* state, double* out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "output");
    const auto& c = ctx->config;
    const auto s = state_arg(state);
    const auto tc = chsbs::find_tc(c.params, c.lifetime, s, c.critical);
    *out = chsbs::mass_slope(s, c.params, c.lifetime, tc, c.critical.kernel);
  });
}

chsbs_status chsbs_fit_gamma(const chsbs_context* ctx, const char* state, chsbs_fit_result* out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "output");
    const auto& c = ctx->config;
    copy_fit(chsbs::fit_gamma(state_arg(state), c.params, c.lifetime, c.critical, c.gamma_window), out);
  });
}

chsbs_status chsbs_fit_nu(const chsbs_context* ctx, const char* state, chsbs_fit_result* out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "output");
    const auto s = state_arg(state);
    copy_fit(chsbs::fit_nu(s, setup(ctx, s), ctx->config.nu_window, ctx->config.correlation), out);
  });
}

chsbs_status chsbs_correlation_length(const chsbs_context* ctx, const char* state, double reduced_t, double* xi,
                                      double* second_moment) {
  return guard([&] {
    need(ctx, "context");
    need(xi, "output");
    const auto s = state_arg(state);
    const auto cs = setup(ctx, s);
    *xi = chsbs::correlation_length(s, reduced_t, cs, ctx->config.correlation);
    if (second_moment) *second_moment = chsbs::second_moment_length(s, cs.t_c * (1.0 + reduced_t), cs);
  });
}

chsbs_status chsbs_bcs_quadrature(const chsbs_context* ctx, double T, double* ratio, double* delta_c_tau,
                                  double* error_estimate) {
  return guard([&] {
    need(ctx, "context");
    need(ratio, "output");
    const auto q = chsbs::bcs_kernel_quadrature(ctx->config.params, ctx->config.lifetime, T);
    *ratio = q.ratio;
    if (delta_c_tau) *delta_c_tau = q.delta_c_tau;
    if (error_estimate) *error_estimate = q.integral.error_estimate;
  });
}

chsbs_status chsbs_offshell_cancellation(const chsbs_context* ctx, double T, double* depth,
                                         double* relative_to_onshell) {
  return guard([&] {
    need(ctx, "context");
    need(depth, "output");
    const auto o = chsbs::offshell_bcs_cancellation(ctx->config.params, ctx->config.lifetime, T);
    *depth = o.depth;
    if (relative_to_onshell) *relative_to_onshell = o.relative_to_onshell;
  });
}

chsbs_status chsbs_oracle_check(const char* gamma0, const char* a_bcs, const char* c2, int order, int* equal) {
  return guard([&] {
    need(equal, "output");
    if (order < 0) chsbs::fail(chsbs::ErrorCode::InvalidArgument, "order must be non-negative");
    const auto k = chsbs::exact_kernel(rational_arg(gamma0), rational_arg(a_bcs), rational_arg(c2));
    *equal = chsbs::oracle_check(order, k).equal ? 1 : 0;
  });
}

chsbs_status chsbs_verify(const chsbs_context* ctx, chsbs_verify_report** out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "output pointer");
    *out = new chsbs_verify_report{chsbs::run_verification(ctx->config)};
  });
}

void chsbs_verify_report_destroy(chsbs_verify_report* report) { delete report; }

size_t chsbs_verify_count(const chsbs_verify_report* report) { return report ? report->report.checks.size() : 0; }

int chsbs_verify_all_passed(const chsbs_verify_report* report) {
  return report && report->report.all_passed() ? 1 : 0;
}

const char* chsbs_verify_name(const chsbs_verify_report* report, size_t i) {
  const auto* c = check_at(report, i);
  return c ? c->name.c_str() : nullptr;
}

int chsbs_verify_passed(const chsbs_verify_report* report, size_t i) {
  const auto* c = check_at(report, i);
  return c && c->passed ? 1 : 0;
}

double chsbs_verify_value(const chsbs_verify_report* report, size_t i) {
  const auto* c = check_at(report, i);
  return c ? c->value : std::numeric_limits<double>::quiet_NaN();
}

double chsbs_verify_tolerance(const chsbs_verify_report* report, size_t i) {
  const auto* c = check_at(report, i);
  return c ? c->tolerance : std::numeric_limits<double>::quiet_NaN();
}

double chsbs_verify_seconds(const chsbs_verify_report* report, size_t i) {
  const auto* c = check_at(report, i);
  return c ? c->seconds : std::numeric_limits<double>::quiet_NaN();
}

const char* chsbs_verify_detail(const chsbs_verify_report* report, size_t i) {
  const auto* c = check_at(report, i);
  return c ? c->detail.c_str() : nullptr;
}

}  // extern "C"
