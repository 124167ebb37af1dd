#include "chsbs/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chsbs {

std::string to_string(KernelConvention c) {
  switch (c) {
    case KernelConvention::Canonical: return "canonical";
    case KernelConvention::EqBsUFreq: return "eq-bs-u-freq";
    case KernelConvention::SubsecTc: return "subsec-tc";
  }
  return "canonical";
}

KernelConvention parse_convention(const std::string& name) {
  if (name == "canonical") return KernelConvention::Canonical;
  if (name == "eq-bs-u-freq") return KernelConvention::EqBsUFreq;
  if (name == "subsec-tc") return KernelConvention::SubsecTc;
  fail(ErrorCode::InvalidArgument, "unknown kernel convention '" + name + "'");
}

std::string to_string(HierarchyWeight w) {
  return w == HierarchyWeight::Physical ? "physical" : "simplified";
}

HierarchyWeight parse_weight(const std::string& name) {
  if (name == "physical") return HierarchyWeight::Physical;
  if (name == "simplified") return HierarchyWeight::Simplified;
  fail(ErrorCode::InvalidArgument, "unknown hierarchy weight '" + name + "'");
}

double bare_vertex(const ModelParams& p) {
  if (!(p.delta_c > 0.0)) fail(ErrorCode::InvalidArgument, "bare vertex needs delta_c > 0");
  return -p.g0 * p.g0 / (2.0 * p.delta_c);
}

KernelScalars<BigRational> exact_kernel(const BigRational& gamma0, const BigRational& a_bcs,
                                        const BigRational& c2, HierarchyWeight weight) {
  if (c2 < 0) fail(ErrorCode::InvalidArgument, "c2 must be non-negative");
  KernelScalars<BigRational> k;
  k.temperature = 0;
  k.gamma0 = gamma0;
  k.a_bcs = a_bcs;
  k.c2 = c2;
  k.w = weight == HierarchyWeight::Physical ? BigRational(8) * c2 : BigRational(1);
  k.m_vac = a_bcs + 2 * c2;
  k.m_th = k.m_vac;
  return k;
}

KernelScalars<double> to_double(const KernelScalars<BigRational>& k) {
  return {to_double(k.temperature), to_double(k.gamma0), to_double(k.a_bcs), to_double(k.c2),
          to_double(k.w),           to_double(k.m_vac),  to_double(k.m_th)};
}

RationalFunction intermediate_vertex_closed_form(const KernelScalars<BigRational>& k) {
  // D(u) = 1 - a - 2 c2 f^2 - (w - 8 c2) u/(1-u)^2; the last term vanishes for the physical weight.
  const RationalFunction u = RationalFunction::variable();
  const RationalFunction one_minus_u = RationalFunction(1) - u;
  RationalFunction den = RationalFunction(1 - k.a_bcs) - RationalFunction(2 * k.c2) * f_factor(2);
  const BigRational excess = k.w - 8 * k.c2;
  if (excess != 0) den = den - RationalFunction(excess) * u / (one_minus_u * one_minus_u);
  if (den(BigRational(0)) == 0) fail(ErrorCode::Singular, "closed-form vertex has a pole at u = 0");
  return RationalFunction(k.gamma0) / den;
}

OracleReport oracle_check(int n, const KernelScalars<BigRational>& k, HierarchyOptions opts) {
  OracleReport rep;
  rep.recursion = solve_fock_hierarchy(n, k, opts).values;
  const RationalFunction physical = intermediate_vertex_closed_form(k) / (RationalFunction(1) - RationalFunction::variable());
  rep.series = taylor(physical, static_cast<std::size_t>(n), std::max<std::size_t>(n, kDefaultSeriesOrderCap));
  rep.equal = true;
  for (int m = 0; m <= n; ++m) {
    if (rep.recursion[m] != rep.series[m]) {
      if (rep.equal) rep.first_mismatch = m;
      rep.equal = false;
      rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(to_double(rep.recursion[m] - rep.series[m])));
    }
  }
  return rep;
}

ThermalResummationReport thermal_resummation_check(const KernelScalars<double>& k, double x, int n_max,
                                                   double tail_tolerance) {
  if (!(x >= 0.0 && x < 1.0)) fail(ErrorCode::InvalidArgument, "Boltzmann factor must lie in [0,1)");
  const double gap = 1.0 - k.m_vac;
  require_off_critical(gap, "thermal_resummation_check");

  ThermalResummationReport rep;
  rep.closed_form = thermal_vertex(k, x);

  // running sums: s1 = sum_{j<m} Gamma^j, s2 = sum_{j<m} (m-j) Gamma^j
  double s1 = 0.0, s2 = 0.0, xn = 1.0, sum = 0.0, prev_term = 0.0;
  for (int m = 0; m <= n_max; ++m) {
    const double gm = (k.gamma0 + k.w * s2) / gap;
    const double term = (1.0 - x) * xn * gm;
    sum += term;
    rep.terms = m + 1;
    s1 += gm;
    s2 += s1;
    xn *= x;
    if (term == 0.0 && x == 0.0) {
      rep.tail_estimate = 0.0;
      rep.weight_tail = 0.0;
      rep.converged = true;
      break;
    }
    if (m > 0) {
      const double rho = std::abs(term / prev_term);
      rep.tail_estimate = rho < 1.0 ? std::abs(term) * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
      rep.weight_tail = xn;
      if (xn < tail_tolerance && rep.tail_estimate < tail_tolerance * std::max(1.0, std::abs(sum))) {
        rep.converged = true;
        break;
      }
    }
    prev_term = term;
  }
  rep.truncated_sum = sum;
  rep.residual = std::abs(sum - rep.closed_form);
  if (!rep.converged)
    rep.warning = "Boltzmann sum not converged after " + std::to_string(rep.terms) +
                  " terms (x=" + std::to_string(x) + ", radius " + std::to_string(thermal_convergence_radius(k)) + ")";
  return rep;
}

double thermal_convergence_radius(const KernelScalars<double>& k) {
  const double eps = 1.0 - k.m_vac;
  if (!(eps > 0.0)) return 0.0;
  if (k.w <= 0.0) return 1.0;
  const double b = 2.0 * eps + k.w;
  // smaller root of eps u^2 - b u + eps, written to avoid cancellation
  return 2.0 * eps / (b + std::sqrt(k.w * k.w + 4.0 * eps * k.w));
}

}  // namespace chsbs
