#include <cmath>
#include <numbers>
#include <sstream>

#include "chsbs/critical.hpp"

namespace chsbs {

std::string to_string(FockVertexForm f) { return f == FockVertexForm::Binomial ? "binomial" : "leading-pole"; }

FockVertexForm parse_fock_form(const std::string& name) {
  if (name == "binomial") return FockVertexForm::Binomial;
  if (name == "leading-pole") return FockVertexForm::LeadingPole;
  fail(ErrorCode::InvalidArgument, "unknown Fock vertex form '" + name + "'");
}

CorrelationSetup correlation_setup(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt,
                                   const CriticalOptions& opts, double anisotropy, AnisotropyModel model,
                                   FockVertexForm form) {
  if (!(anisotropy > 0.0)) fail(ErrorCode::InvalidArgument, "anisotropy constant must be positive");
  const auto tc = find_tc(p, lt, state, opts);
  CorrelationSetup s;
  s.t_c = tc.t_c;
  s.mass_slope = mass_slope(state, p, lt, tc, opts.kernel);
  s.gamma0 = bare_vertex(p);
  s.anisotropy = anisotropy;
  s.anisotropy_model = model;
  s.fock_form = form;
  return s;
}

int pole_order(const InitialPhotonState& state) {
  if (const auto* f = std::get_if<Fock>(&state)) return f->n + 1;
  if (const auto* mix = std::get_if<DiagonalMixture>(&state)) return mix->weights.rbegin()->first + 1;
  return 1;
}

namespace {

double reduced_mass(double T, const CorrelationSetup& s) {
  const double mu = s.mass_slope * (T - s.t_c);
  if (!(mu > 0.0)) fail(ErrorCode::Domain, "momentum-space vertex needs T > T_c");
  return mu;
}

// Stiffness along the k_F direction and across it.
double stiffness_x(const CorrelationSetup& s) {
  return s.anisotropy_model == AnisotropyModel::Angular ? 1.0 + s.anisotropy : s.anisotropy;
}
double stiffness_y(const CorrelationSetup& s) { return s.anisotropy; }

// The vertex is a sum of simple shapes coef / (Q + shift)^power.
struct PoleTerm {
  double coef, shift;
  int power;
};

void fock_terms(int n, double weight, double mu, const CorrelationSetup& s, std::vector<PoleTerm>& out) {
  const int order = n + 1;
  if (s.fock_form == FockVertexForm::LeadingPole) {
    out.push_back({weight * s.gamma0, mu, order});
    return;
  }
  // (Q + mu)^(n+1) ~ mu^(n+1) + (n+1) mu^n Q
  out.push_back({weight * s.gamma0 / (order * std::pow(mu, n)), mu / order, 1});
}

std::vector<PoleTerm> pole_terms(const InitialPhotonState& state, double mu, const CorrelationSetup& s) {
  std::vector<PoleTerm> terms;
  if (std::holds_alternative<Vacuum>(state) || std::holds_alternative<Thermal>(state))
    terms.push_back({s.gamma0, mu, 1});
  else if (const auto* f = std::get_if<Fock>(&state))
    fock_terms(f->n, 1.0, mu, s, terms);
  else
    for (const auto& [n, w] : std::get<DiagonalMixture>(state).weights) fock_terms(n, w, mu, s, terms);
  return terms;
}

// Q is the gradient term P^2 (cos^2 theta + a) or its isotropic replacement.
double vertex_from_gradient(const InitialPhotonState& state, double Q, double mu, const CorrelationSetup& s) {
  double acc = 0.0;
  for (const auto& t : pole_terms(state, mu, s)) acc += t.coef / std::pow(Q + t.shift, t.power);
  return acc;
}

// int_0^inf dy / (A + k y^2)^p = sqrt(pi) Gamma(p - 1/2) / (2 Gamma(p) sqrt(k)) A^(1/2 - p)
double transverse_integral(const PoleTerm& t, double A, double k) {
  const double p = t.power;
  return t.coef * std::sqrt(std::numbers::pi) * std::tgamma(p - 0.5) / (2.0 * std::tgamma(p) * std::sqrt(k)) *
         std::pow(A, 0.5 - p);
}

}  // namespace

double vertex_P_cartesian(const InitialPhotonState& state, double px, double py, double T, const CorrelationSetup& s) {
  const double Q = stiffness_x(s) * px * px + stiffness_y(s) * py * py;
  return vertex_from_gradient(state, Q, reduced_mass(T, s), s);
}

double vertex_P(const InitialPhotonState& state, double P, double theta, double T, const CorrelationSetup& s) {
  const double c = std::cos(theta);
  const double angular = s.anisotropy_model == AnisotropyModel::Angular ? c * c + s.anisotropy : s.anisotropy;
  return vertex_from_gradient(state, P * P * angular, reduced_mass(T, s), s);
}

double second_moment_length(const InitialPhotonState& state, double T, const CorrelationSetup& s) {
  const double mu = reduced_mass(T, s);
  const double kx = stiffness_x(s);
  // d ln Gamma / d(px^2), continued to negative px^2 for a central difference
  auto g = [&](double q) { return std::log(std::abs(vertex_from_gradient(state, kx * q, mu, s))); };
  auto central = [&](double h) { return (g(h) - g(-h)) / (2.0 * h); };
  const double h = 1e-3 * mu / kx;
  const double d = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  if (!(d < 0.0)) fail(ErrorCode::Domain, "vertex does not decrease with momentum");
  return std::sqrt(-d);
}

QuadratureResult correlation_value(const InitialPhotonState& state, double T, double r, const CorrelationSetup& s,
                                   const CorrelationOptions& opts) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "correlation distance must be positive");
  const auto terms = pole_terms(state, reduced_mass(T, s), s);
  const double kx = stiffness_x(s), ky = stiffness_y(s);
  // G(px) = int_0^inf dpy Gamma~(px, py), done in closed form per pole term
  auto G = [&](double px) {
    double acc = 0.0;
    for (const auto& t : terms) acc += transverse_integral(t, kx * px * px + t.shift, ky);
    return acc;
  };
  QuadratureOptions outer;
  outer.rel_tol = opts.rel_tol;
  auto res = integrate_cosine_transform(G, r, outer);
  // quadrant symmetry: int d^2P/(2pi)^2 -> (1/pi^2) int_0^inf int_0^inf
  res.value *= -1.0 / (std::numbers::pi * std::numbers::pi);
  res.error_estimate /= std::numbers::pi * std::numbers::pi;
  const double rel = res.error_estimate / std::abs(res.value.real());
  if (!(rel <= opts.max_rel_error)) {
    std::ostringstream os;
    os << "correlation quadrature at r=" << r << " has relative error estimate " << rel;
    fail(ErrorCode::Quadrature, os.str());
  }
  return res;
}

std::vector<double> default_r_grid(double xi_expected, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = xi_expected * 0.1 * std::pow(200.0, i / (points - 1.0));
  return g;
}

namespace {

struct TailFit {
  double xi = 0.0;
  double lo = 0.0, hi = 0.0;
  double r_squared = 0.0;
  bool log_convex = false;
};

// ln(C sqrt(r)) is linear in r for the K0 tail; the slope gives -1/xi.
TailFit fit_tail(const InitialPhotonState& state, double T, const CorrelationSetup& s, double xi_est,
                 const CorrelationOptions& opts) {
  TailFit out;
  out.lo = 3.0 * xi_est;
  out.hi = 10.0 * xi_est;
  const int n = std::max(opts.window_points, 4);
  std::vector<double> r(n), lc(n), y(n);
  for (int i = 0; i < n; ++i) {
    r[i] = out.lo + (out.hi - out.lo) * i / (n - 1.0);
    const double c = correlation_value(state, T, r[i], s, opts).value.real();
    if (!(c > 0.0)) fail(ErrorCode::Quadrature, "pair correlation is not positive in the tail window");
    lc[i] = std::log(c);
    y[i] = lc[i] + 0.5 * std::log(r[i]);
  }
  const auto fit = linear_fit(r, y);
  if (!(fit.slope < 0.0)) fail(ErrorCode::FitRejected, "pair correlation does not decay in the tail window");
  out.xi = -1.0 / fit.slope;
  out.r_squared = fit.r_squared;
  out.log_convex = true;
  for (int i = 1; i + 1 < n; ++i)
    if (lc[i + 1] - 2.0 * lc[i] + lc[i - 1] < -1e-9 * std::abs(lc[i])) out.log_convex = false;
  return out;
}

}  // namespace

CorrelationProfile correlation_function(const InitialPhotonState& state, double T, const CorrelationSetup& s,
                                        const std::vector<double>& r_grid, const CorrelationOptions& opts) {
  validate(state);
  CorrelationProfile prof;
  prof.mass_slope = s.mass_slope;
  prof.anisotropy = s.anisotropy;
  prof.xi_initial = second_moment_length(state, T, s);
  for (double r : r_grid)
    if (r < 0.0999 * prof.xi_initial || r > 20.01 * prof.xi_initial)
      fail(ErrorCode::InvalidArgument, "r grid must lie within [0.1, 20] xi_expected");
  prof.r_grid = r_grid;
  for (double r : r_grid) prof.values.push_back(correlation_value(state, T, r, s, opts).value.real());

  const auto first = fit_tail(state, T, s, prof.xi_initial, opts);
  const auto second = fit_tail(state, T, s, first.xi, opts);
  prof.xi = second.xi;
  prof.window_lo = second.lo;
  prof.window_hi = second.hi;
  prof.r_squared = second.r_squared;
  prof.tail_log_convex = second.log_convex;
  return prof;
}

double correlation_length(const InitialPhotonState& state, double reduced_t, const CorrelationSetup& s,
                          const CorrelationOptions& opts) {
  if (!(reduced_t > 0.0)) fail(ErrorCode::Domain, "correlation length needs T > T_c");
  return correlation_function(state, s.t_c * (1.0 + reduced_t), s, {}, opts).xi;
}

}  // namespace chsbs
