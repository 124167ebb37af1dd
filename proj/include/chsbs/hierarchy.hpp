#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include "chsbs/dual.hpp"
#include "chsbs/error.hpp"
#include "chsbs/model.hpp"
#include "chsbs/useries.hpp"

namespace chsbs {

// Scale factors on (a_bcs, c2) relative to the canonical kernel.
enum class KernelConvention { Canonical, EqBsUFreq, SubsecTc };
// Physical: w = 8 c2. Simplified: w = 1, giving integer coefficients 1; 1,1; 1,3,1.
enum class HierarchyWeight { Physical, Simplified };

struct KernelOptions {
  KernelConvention convention = KernelConvention::Canonical;
  HierarchyWeight weight = HierarchyWeight::Physical;
};

std::string to_string(KernelConvention c);
KernelConvention parse_convention(const std::string& name);
std::string to_string(HierarchyWeight w);
HierarchyWeight parse_weight(const std::string& name);

inline double convention_a_scale(KernelConvention c) { return c == KernelConvention::Canonical ? 1.0 : 2.0; }
inline double convention_c2_scale(KernelConvention c) { return c == KernelConvention::SubsecTc ? 16.0 : 1.0; }

inline double value_of(const BigRational& x) { return to_double(x); }

template <class S>
struct KernelScalars {
  S temperature{};
  S gamma0{};
  S a_bcs{};
  S c2{};
  S w{};
  S m_vac{};
  S m_th{};  // photons at the kernel temperature
};

// m_vac + w x/(1-x)^2; for w = 8 c2 this is a_bcs + 2 c2 ((1+x)/(1-x))^2.
template <class S>
S thermal_mass(const KernelScalars<S>& k, const S& x) {
  const S one_minus = S(1) - x;
  return k.m_vac + k.w * x / (one_minus * one_minus);
}

double bare_vertex(const ModelParams& p);

template <class S>
KernelScalars<S> kernel_scalars(const ModelParams& p, const LifetimeModel& lt, const S& T,
                                const KernelOptions& opts = {}) {
  if (!(value_of(T) > 0.0)) fail(ErrorCode::Domain, "kernel needs T > 0");
  using std::exp;
  const double gd = p.gtilde() * p.delta_c;
  const S inv_tau = inverse_lifetime(lt, p, T);
  KernelScalars<S> k;
  k.temperature = T;
  k.gamma0 = S(bare_vertex(p));
  k.a_bcs = convention_a_scale(opts.convention) * gd / T;
  const S ratio = gd / inv_tau;
  k.c2 = convention_c2_scale(opts.convention) * ratio * ratio;
  k.w = opts.weight == HierarchyWeight::Physical ? S(8.0) * k.c2 : S(1.0);
  k.m_vac = k.a_bcs + S(2.0) * k.c2;
  k.m_th = thermal_mass(k, exp(-p.delta_c / T));
  return k;
}

// Exact kernel from rational inputs. Photons are at zero temperature: m_th = m_vac.
KernelScalars<BigRational> exact_kernel(const BigRational& gamma0, const BigRational& a_bcs,
                                        const BigRational& c2,
                                        HierarchyWeight weight = HierarchyWeight::Physical);
KernelScalars<double> to_double(const KernelScalars<BigRational>& k);

template <class S>
struct VertexHierarchy {
  S temperature{};
  std::vector<S> values;
  KernelScalars<S> kernel;
};

struct HierarchyOptions {
  bool inject_f_fault = false;  // negative control: perturbs the (m-j) weight at m-j = 1
};

inline constexpr double kCriticalityGap = 1e-14;

template <class S>
void require_off_critical(const S& one_minus_m, const char* what) {
  if constexpr (std::is_same_v<S, BigRational>) {
    if (one_minus_m == 0) fail(ErrorCode::Criticality, std::string(what) + ": kernel is exactly critical");
  } else {
    if (std::abs(value_of(one_minus_m)) < kCriticalityGap)
      fail(ErrorCode::Criticality, std::string(what) + ": |1 - M| below 1e-14");
  }
}

// Gamma^m = [Gamma0 + w sum_{j<m} (m-j) Gamma^j] / (1 - m_vac), bottom-up from the vacuum sector.
template <class S>
VertexHierarchy<S> solve_fock_hierarchy(int n, const KernelScalars<S>& k, HierarchyOptions opts = {}) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "hierarchy order must be non-negative");
  const S gap = S(1) - k.m_vac;
  require_off_critical(gap, "solve_fock_hierarchy");
  VertexHierarchy<S> h;
  h.temperature = k.temperature;
  h.kernel = k;
  h.values.reserve(n + 1);
  for (int m = 0; m <= n; ++m) {
    S acc = S(0);
    for (int j = 0; j < m; ++j) {
      int weight = m - j;
      if (opts.inject_f_fault && weight == 1) weight = 2;
      acc += S(weight) * h.values[j];
    }
    h.values.push_back((k.gamma0 + k.w * acc) / gap);
  }
  return h;
}

// Gamma(u) = Gamma0 (1-u)^2 / [(1-m_vac)(1-u)^2 - w u]; for w = 8 c2 this is
// Gamma0 / (1 - a_bcs - 2 c2 f(u)^2).
RationalFunction intermediate_vertex_closed_form(const KernelScalars<BigRational>& k);

struct OracleReport {
  bool equal = false;
  int first_mismatch = -1;
  double max_discrepancy = 0.0;  // |recursion - series| in double, 0 when exact
  std::vector<BigRational> recursion;
  std::vector<BigRational> series;
};

OracleReport oracle_check(int n, const KernelScalars<BigRational>& k, HierarchyOptions opts = {});

template <class S>
S solve_thermal(const KernelScalars<S>& k) {
  const S gap = S(1) - k.m_th;
  require_off_critical(gap, "solve_thermal");
  return k.gamma0 / gap;
}

template <class S>
S thermal_vertex(const KernelScalars<S>& k, const S& x) {
  const S gap = S(1) - thermal_mass(k, x);
  require_off_critical(gap, "thermal_vertex");
  return k.gamma0 / gap;
}

struct ThermalResummationReport {
  double residual = 0.0;        // |sum_n (1-x) x^n Gamma^n - Gamma0/(1 - m(x))|
  double closed_form = 0.0;
  double truncated_sum = 0.0;
  double tail_estimate = 0.0;   // bound on the omitted part of the sum
  double weight_tail = 0.0;     // x^N
  int terms = 0;
  bool converged = false;
  std::string warning;
};

// Boltzmann-weighted Fock hierarchy against the closed thermal vertex at x = exp(-beta delta_c).
ThermalResummationReport thermal_resummation_check(const KernelScalars<double>& k, double x,
                                                   int n_max = 20000, double tail_tolerance = 1e-12);

// Smallest u in (0,1) where the closed form has a pole; the thermal sum converges for x below it.
double thermal_convergence_radius(const KernelScalars<double>& k);

}  // namespace chsbs
