#include "chsbs/critical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace chsbs {

std::string to_string(CriticalMode mode) {
  return mode == CriticalMode::VacuumKernel ? "vacuum-kernel" : "thermal-kernel";
}

CriticalMode critical_mode(const InitialPhotonState& state) {
  return std::holds_alternative<Thermal>(state) ? CriticalMode::ThermalKernel : CriticalMode::VacuumKernel;
}

double scan_upper_limit(const ModelParams& p, const LifetimeModel& lt, const CriticalOptions& opts) {
  double hi = opts.scan_max * p.fermi_energy;
  if (std::holds_alternative<FermiLiquidLifetime>(lt)) hi = std::min(hi, p.fermi_energy / std::numbers::e);
  return std::min(hi, p.fermi_energy * (1.0 - 1e-9));
}

double critical_function(CriticalMode mode, const ModelParams& p, const LifetimeModel& lt, double T,
                         const KernelOptions& kopts) {
  const auto k = kernel_scalars(p, lt, T, kopts);
  return mode == CriticalMode::ThermalKernel ? k.m_th : k.m_vac;
}

namespace {

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(ratio * i / (n - 1));
  g.back() = hi;
  return g;
}

template <class F>
double safe_eval(F&& f, double T) {
  try {
    return f(T);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::string scan_table(const std::vector<double>& T, const std::vector<double>& f) {
  std::ostringstream os;
  os.precision(6);
  os << "scan table (T, M-1):";
  const std::size_t step = std::max<std::size_t>(1, T.size() / 12);
  for (std::size_t i = 0; i < T.size(); i += step) os << " (" << T[i] << ", " << f[i] << ")";
  os << " (" << T.back() << ", " << f.back() << ")";
  return os.str();
}

// Shrinks [a, b] with f(a) > 0 >= f(b) down to adjacent doubles.
template <class F>
std::pair<double, double> bisect_down(F&& f, double a, double b) {
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    if (fm > 0.0) a = mid;
    else b = mid;
  }
  return {a, b};
}

CriticalPoint find_root(const std::function<double(double)>& M, const std::function<double(double)>& dM,
                        CriticalMode mode, const ModelParams& p, const LifetimeModel& lt,
                        const CriticalOptions& opts) {
  if (opts.scan_points < 3) fail(ErrorCode::InvalidArgument, "scan needs at least 3 points");
  const double lo = opts.scan_min * p.fermi_energy;
  const double hi = scan_upper_limit(p, lt, opts);
  if (!(lo > 0.0 && hi > lo)) fail(ErrorCode::InvalidArgument, "empty temperature scan range");

  const auto T = geometric_grid(lo, hi, opts.scan_points);
  std::vector<double> f(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) f[i] = safe_eval([&](double t) { return M(t) - 1.0; }, T[i]);

  CriticalPoint cp;
  cp.mode = mode;
  int last_down = -1;
  for (std::size_t i = 0; i + 1 < T.size(); ++i) {
    if (!std::isfinite(f[i]) || !std::isfinite(f[i + 1])) continue;
    const bool down = f[i] > 0.0 && f[i + 1] <= 0.0;
    const bool up = f[i] <= 0.0 && f[i + 1] > 0.0;
    if (down || up) ++cp.sign_changes;
    if (down) last_down = static_cast<int>(i);
  }
  if (last_down < 0)
    fail(ErrorCode::NoSignChange, "no temperature with M(T) = 1 crossed from above; " + scan_table(T, f));

  cp.bracket_lo = T[last_down];
  cp.bracket_hi = T[last_down + 1];
  auto [a, b] = bisect_down([&](double t) { return M(t) - 1.0; }, cp.bracket_lo, cp.bracket_hi);
  const double ra = std::abs(M(a) - 1.0), rb = std::abs(M(b) - 1.0);
  cp.t_c = ra < rb ? a : b;
  cp.residual = std::min(ra, rb);
  if (b - a > opts.rel_tol * cp.t_c)
    fail(ErrorCode::NoSignChange, "bisection stalled before reaching the requested tolerance");
  cp.dm_dt = dM(cp.t_c);
  if (cp.sign_changes > 1) {
    cp.multiple_roots = true;
    cp.warning = std::to_string(cp.sign_changes) + " sign changes of M(T)-1 in the scan; returned the largest "
                 "downward crossing";
  }
  return cp;
}

}  // namespace

CriticalPoint find_tc(const ModelParams& p, const LifetimeModel& lt, const InitialPhotonState& state,
                      const CriticalOptions& opts) {
  validate(state);
  return find_root([&](double T) { return critical_function(state, p, lt, T, opts.kernel); },
                   [&](double T) { return critical_function(state, p, lt, Dual::variable(T), opts.kernel).d; },
                   critical_mode(state), p, lt, opts);
}

CriticalPoint find_tc(const ModelParams& p, const LifetimeModel& lt, CriticalMode mode,
                      const CriticalOptions& opts) {
  const InitialPhotonState state = mode == CriticalMode::ThermalKernel ? InitialPhotonState{Thermal{}}
                                                                       : InitialPhotonState{Vacuum{}};
  return find_tc(p, lt, state, opts);
}

std::vector<double> locate_vertex_poles(const InitialPhotonState& state, const ModelParams& p,
                                        const LifetimeModel& lt, const CriticalOptions& opts) {
  validate(state);
  // phi = Gamma / Gamma'; phi = 0 flags an evaluation exactly at the pole
  auto phi = [&](double T) {
    try {
      const Dual g = onshell_vertex(state, p, lt, Dual::variable(T), opts.kernel);
      return g.v / g.d;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Criticality) return 0.0;
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const auto T = geometric_grid(opts.scan_min * p.fermi_energy, scan_upper_limit(p, lt, opts), opts.scan_points);
  std::vector<double> f(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) f[i] = phi(T[i]);

  std::vector<double> poles;
  for (std::size_t i = 0; i + 1 < T.size(); ++i) {
    if (f[i] == 0.0) {
      poles.push_back(T[i]);
      continue;
    }
    const double dT = T[i + 1] - T[i];
    if (!(f[i] > 0.0 && f[i + 1] < 0.0)) continue;
    if (std::abs(f[i]) > dT || std::abs(f[i + 1]) > dT) continue;  // a jump through infinity, not a pole
    auto [a, b] = bisect_down(phi, T[i], T[i + 1]);
    poles.push_back(std::abs(phi(a)) < std::abs(phi(b)) ? a : b);
  }
  return poles;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorCode::InvalidArgument, "linear fit needs matching samples (n >= 2)");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) fail(ErrorCode::InvalidArgument, "linear fit with degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
    fit.residual_max = std::max(fit.residual_max, std::abs(r));
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

namespace {

void check_window(const FitWindow& w) {
  if (!(w.t_min > 0.0 && w.t_max > w.t_min) || w.points < 3)
    fail(ErrorCode::InvalidArgument, "fit window must satisfy 0 < t_min < t_max with at least 3 points");
}

ExponentFit finish_fit(const FitWindow& w, const std::vector<double>& x, const std::vector<double>& y,
                       const char* what) {
  ExponentFit out;
  out.t_min = w.t_min;
  out.t_max = w.t_max;
  out.points = static_cast<int>(x.size());
  const auto fit = linear_fit(x, y);
  out.r_squared = fit.r_squared;
  out.residual_max = fit.residual_max;
  if (fit.r_squared > kMinRSquared) {
    out.exponent = -fit.slope;
    out.accepted = true;
  } else {
    std::ostringstream os;
    os << what << " fit rejected: r^2 = " << fit.r_squared << " (slope " << fit.slope << ")";
    out.diagnostic = os.str();
  }
  return out;
}

}  // namespace

ExponentFit fit_gamma(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt,
                      const CriticalPoint& tc, const KernelOptions& kopts, const FitWindow& window) {
  check_window(window);
  const auto t = geometric_grid(window.t_min, window.t_max, window.points);
  std::vector<double> x, y;
  for (double ti : t) {
    const double g = onshell_vertex(state, p, lt, tc.t_c * (1.0 + ti), kopts);
    if (!std::isfinite(g) || g == 0.0) {
      ExponentFit out;
      out.t_min = window.t_min;
      out.t_max = window.t_max;
      out.diagnostic = "vertex is zero or non-finite at t=" + std::to_string(ti);
      return out;
    }
    x.push_back(std::log(ti));
    y.push_back(std::log(std::abs(g)));
  }
  return finish_fit(window, x, y, "gamma");
}

ExponentFit fit_gamma(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt,
                      const CriticalOptions& opts, const FitWindow& window) {
  return fit_gamma(state, p, lt, find_tc(p, lt, state, opts), opts.kernel, window);
}

double mass_slope(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt,
                  const CriticalPoint& tc, const KernelOptions& kopts, double step_fraction) {
  auto M = [&](double T) { return critical_function(state, p, lt, T, kopts); };
  auto central = [&](double h) { return (M(tc.t_c + h) - M(tc.t_c - h)) / (2.0 * h); };
  const double h = step_fraction * tc.t_c;
  const double m = -(4.0 * central(0.5 * h) - central(h)) / 3.0;
  if (!(m > 0.0) || !std::isfinite(m))
    fail(ErrorCode::Domain, "non-positive mass slope -dM/dT = " + std::to_string(m) + " at T_c");
  return m;
}

ExponentFit fit_nu(const InitialPhotonState& state, const CorrelationSetup& s, const FitWindow& window,
                   const CorrelationOptions& opts) {
  check_window(window);
  const auto t = geometric_grid(window.t_min, window.t_max, window.points);
  std::vector<double> x, y;
  for (double ti : t) {
    x.push_back(std::log(ti));
    y.push_back(std::log(correlation_length(state, ti, s, opts)));
  }
  return finish_fit(window, x, y, "nu");
}

}  // namespace chsbs
