#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "chsbs/hierarchy.hpp"
#include "chsbs/model.hpp"
#include "chsbs/quadrature.hpp"

namespace chsbs {

enum class CriticalMode { VacuumKernel, ThermalKernel };

std::string to_string(CriticalMode mode);
// Thermal photons use M_th; every Fock-diagonal state shares the vacuum kernel.
CriticalMode critical_mode(const InitialPhotonState& state);

struct CriticalOptions {
  KernelOptions kernel;
  double scan_min = 1e-8;  // scan range as fractions of E_F
  double scan_max = 1.0;
  int scan_points = 4000;
  double rel_tol = 1e-12;
};

struct CriticalPoint {
  double t_c = 0.0;
  CriticalMode mode = CriticalMode::VacuumKernel;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;  // |M(T_c) - 1|
  double dm_dt = 0.0;     // M'(T_c)
  int sign_changes = 0;
  bool multiple_roots = false;
  std::string warning;
};

// Upper end of the temperature scan. The Fermi-liquid rate is only monotone below E_F/e,
// and near E_F it vanishes again, so the scan stops there.
double scan_upper_limit(const ModelParams& p, const LifetimeModel& lt, const CriticalOptions& opts);

// The pole-governing function of a state: m_vac for Fock-diagonal states, the thermal
// mass for thermal photons (at the electron temperature unless beta is pinned).
template <class S>
S critical_function(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt, const S& T,
                    const KernelOptions& kopts) {
  const auto k = kernel_scalars(p, lt, T, kopts);
  if (const auto* th = std::get_if<Thermal>(&state)) {
    if (!th->beta) return k.m_th;
    return thermal_mass(k, S(std::exp(-*th->beta * p.delta_c)));
  }
  return k.m_vac;
}

double critical_function(CriticalMode mode, const ModelParams& p, const LifetimeModel& lt, double T,
                         const KernelOptions& kopts);

// Largest downward crossing of M(T) = 1 on a geometric scan, refined by bisection.
CriticalPoint find_tc(const ModelParams& p, const LifetimeModel& lt, const InitialPhotonState& state,
                      const CriticalOptions& opts = {});
CriticalPoint find_tc(const ModelParams& p, const LifetimeModel& lt, CriticalMode mode,
                      const CriticalOptions& opts = {});

// On-shell physical vertex of a state at temperature T.
template <class S>
S onshell_vertex(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt, const S& T,
                 const KernelOptions& kopts) {
  const auto k = kernel_scalars(p, lt, T, kopts);
  if (std::holds_alternative<Vacuum>(state)) return solve_fock_hierarchy(0, k).values[0];
  if (const auto* f = std::get_if<Fock>(&state)) return solve_fock_hierarchy(f->n, k).values[f->n];
  if (const auto* th = std::get_if<Thermal>(&state)) {
    if (!th->beta) return solve_thermal(k);
    return thermal_vertex(k, S(std::exp(-*th->beta * p.delta_c)));
  }
  const auto& mix = std::get<DiagonalMixture>(state);
  const auto h = solve_fock_hierarchy(mix.weights.rbegin()->first, k);
  S acc = S(0);
  for (const auto& [n, w] : mix.weights) acc += S(w) * h.values[n];
  return acc;
}

// Temperatures where the state's on-shell vertex diverges, located from sign changes of
// Gamma / (dGamma/dT) (a simple zero with slope -1/order at each pole). Independent of M.
std::vector<double> locate_vertex_poles(const InitialPhotonState& state, const ModelParams& p,
                                        const LifetimeModel& lt, const CriticalOptions& opts = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_max = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct FitWindow {
  double t_min = 1e-6;
  double t_max = 1e-3;
  int points = 24;
};

struct ExponentFit {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 0;
  double r_squared = 0.0;
  double residual_max = 0.0;
  bool accepted = false;
  std::string diagnostic;
};

inline constexpr double kMinRSquared = 0.999;

// Slope of log|Gamma| against log t on t = (T - T_c)/T_c; gamma = -slope.
ExponentFit fit_gamma(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt,
                      const CriticalPoint& tc, const KernelOptions& kopts, const FitWindow& window = {});
ExponentFit fit_gamma(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt,
                      const CriticalOptions& opts = {}, const FitWindow& window = {});

// m = -dM/dT at T_c: central differences with step h = step_fraction * T_c, one Richardson level.
double mass_slope(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt,
                  const CriticalPoint& tc, const KernelOptions& kopts, double step_fraction = 1e-6);

// ---------------------------------------------------------------- momentum space

enum class AnisotropyModel { Angular, Isotropic };  // P^2 (cos^2 theta + a)  vs  P^2 a
enum class FockVertexForm { LeadingPole, Binomial };

std::string to_string(FockVertexForm f);
FockVertexForm parse_fock_form(const std::string& name);

struct CorrelationSetup {
  double t_c = 0.0;
  double mass_slope = 0.0;
  double gamma0 = 0.0;
  double anisotropy = 1.0;
  AnisotropyModel anisotropy_model = AnisotropyModel::Angular;
  FockVertexForm fock_form = FockVertexForm::Binomial;
};

CorrelationSetup correlation_setup(const InitialPhotonState& state, const ModelParams& p, const LifetimeModel& lt,
                                   const CriticalOptions& opts = {}, double anisotropy = 1.0,
                                   AnisotropyModel model = AnisotropyModel::Angular,
                                   FockVertexForm form = FockVertexForm::Binomial);

// Pole order of the state's momentum-space vertex (mixtures: the largest component).
int pole_order(const InitialPhotonState& state);

// Gamma~(P, theta) near T_c; theta is measured from the k_F direction.
double vertex_P(const InitialPhotonState& state, double P, double theta, double T, const CorrelationSetup& s);
double vertex_P_cartesian(const InitialPhotonState& state, double px, double py, double T,
                          const CorrelationSetup& s);

// sqrt(-d ln Gamma~ / d P^2) at P = 0 along the k_F direction.
double second_moment_length(const InitialPhotonState& state, double T, const CorrelationSetup& s);

struct CorrelationOptions {
  double rel_tol = 1e-9;
  double max_rel_error = 1e-5;  // refuse results with a larger error estimate
  int window_points = 12;
};

struct CorrelationProfile {
  std::vector<double> r_grid;
  std::vector<double> values;
  double xi = 0.0;
  double xi_initial = 0.0;  // second-moment estimate the window was built from
  double window_lo = 0.0;
  double window_hi = 0.0;
  double r_squared = 0.0;
  bool tail_log_convex = false;
  double mass_slope = 0.0;
  double anisotropy = 0.0;
};

// Pair correlation C(r) = -int d^2P/(2pi)^2 Gamma~(P) exp(i P.r) for r along k_F
// (positive for an attractive vertex).
QuadratureResult correlation_value(const InitialPhotonState& state, double T, double r, const CorrelationSetup& s,
                                   const CorrelationOptions& opts = {});

std::vector<double> default_r_grid(double xi_expected, int points = 24);

CorrelationProfile correlation_function(const InitialPhotonState& state, double T, const CorrelationSetup& s,
                                        const std::vector<double>& r_grid, const CorrelationOptions& opts = {});

// Correlation length at reduced temperature t.
double correlation_length(const InitialPhotonState& state, double reduced_t, const CorrelationSetup& s,
                          const CorrelationOptions& opts = {});

// Slope of log xi against log t; nu = -slope.
ExponentFit fit_nu(const InitialPhotonState& state, const CorrelationSetup& s,
                   const FitWindow& window = {1e-4, 1e-2, 9}, const CorrelationOptions& opts = {});

}  // namespace chsbs
