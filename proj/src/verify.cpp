#include "chsbs/verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <functional>
#include <random>
#include <sstream>

#include "chsbs/hierarchy.hpp"
#include "chsbs/sectors.hpp"

namespace chsbs {

bool VerifyReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

namespace {

constexpr int kOracleOrder = 12;

class Runner {
 public:
  explicit Runner(VerifyReport& r) : report_(r) {}

  // fn fills value/passed/detail; exceptions become failures
  void run(const std::string& name, double tolerance, const std::function<void(CheckResult&)>& fn) {
    CheckResult c;
    c.name = name;
    c.tolerance = tolerance;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.passed = false;
      c.value = std::numeric_limits<double>::quiet_NaN();
      c.detail = std::string("error: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_.checks.push_back(std::move(c));
  }

 private:
  VerifyReport& report_;
};

std::vector<KernelScalars<BigRational>> random_kernels(unsigned seed, int count) {
  std::mt19937 gen(seed);
  auto frac = [&](int num_lo, int num_hi, int den_hi) {
    return BigRational(std::uniform_int_distribution<int>(num_lo, num_hi)(gen)) /
           BigRational(std::uniform_int_distribution<int>(1, den_hi)(gen));
  };
  std::vector<KernelScalars<BigRational>> out;
  while (static_cast<int>(out.size()) < count) {
    const BigRational a = frac(-20, 8, 20), c2 = frac(0, 5, 40), g0 = frac(-9, -1, 7);
    if (a + 2 * c2 == 1) continue;
    out.push_back(exact_kernel(g0, a, c2));
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

VerifyReport run_verification(const VerifyConfig& cfg) {
  VerifyReport report;
  Runner r(report);
  const auto& p = cfg.params;
  const auto& lt = cfg.lifetime;
  const auto& kopts = cfg.critical.kernel;
  HierarchyOptions hopts;
  hopts.inject_f_fault = cfg.inject_f_fault;

  // Exact checks need rational kernels. The configured kernel is floating point, so it
  // enters through its dyadic image when it is usable; seeded rational kernels always run.
  std::vector<KernelScalars<BigRational>> exact = random_kernels(cfg.seed, cfg.random_kernels);
  std::string kernel_source = std::to_string(exact.size()) + " rational test kernels";
  double t_probe = 0.0;
  KernelScalars<double> probe{};
  try {
    t_probe = 1.5 * find_tc(p, lt, Vacuum{}, cfg.critical).t_c;
    probe = kernel_scalars(p, lt, t_probe, kopts);
    if (kopts.weight == HierarchyWeight::Physical) {
      exact.push_back(
          exact_kernel(exact_rational(probe.gamma0), exact_rational(probe.a_bcs), exact_rational(probe.c2)));
      kernel_source += " + dyadic image of the configured kernel at 1.5 T_c";
    } else {
      kernel_source += " (configured kernel skipped: simplified weight)";
    }
  } catch (const Error& e) {
    kernel_source += " (configured kernel unavailable: " + std::string(e.what()) + ")";
  }

  r.run("series-oracle", 0.0, [&](CheckResult& c) {
    int mismatches = 0;
    std::string first;
    for (const auto& k : exact) {
      const auto rep = oracle_check(kOracleOrder, k, hopts);
      if (!rep.equal) {
        ++mismatches;
        if (first.empty())
          first = "first mismatch at n=" + std::to_string(rep.first_mismatch) +
                  ", |recursion - series| = " + fmt(rep.max_discrepancy);
      }
    }
    c.value = mismatches;
    c.passed = mismatches == 0;
    c.detail = kernel_source + ", n = 0.." + std::to_string(kOracleOrder) + (first.empty() ? "" : "; " + first);
  });

  r.run("thermal-identity", 0.0, [&](CheckResult& c) {
    std::mt19937 gen(cfg.seed + 1);
    int bad = 0;
    for (int i = 0; i < 20; ++i) {
      const int d = std::uniform_int_distribution<int>(2, 997)(gen);
      const BigRational x = BigRational(std::uniform_int_distribution<int>(1, d - 1)(gen)) / BigRational(d);
      const BigRational lhs = 1 + 4 * x / ((1 - x) * (1 - x));
      const BigRational f = (1 + x) / (1 - x);
      if (lhs != f * f) ++bad;
    }
    c.value = bad;
    c.passed = bad == 0;
    c.detail = "20 rational x in (0,1)";
  });

  r.run("thermal-resummation", 1e-8, [&](CheckResult& c) {
    if (t_probe <= 0.0) fail(ErrorCode::NoSignChange, "no vacuum T_c for the configured parameters");
    double x = std::exp(-p.delta_c / t_probe);
    const double radius = thermal_convergence_radius(probe);
    std::string note = "x = exp(-delta_c/T) at 1.5 T_c";
    if (!(x < 0.5 * radius)) {
      x = 0.5 * radius;
      note = "x moved to half the convergence radius";
    }
    const auto rep = thermal_resummation_check(probe, x);
    c.value = rep.residual;
    c.passed = rep.converged && rep.residual < c.tolerance && rep.tail_estimate < 1e-12;
    c.detail = note + ", terms " + std::to_string(rep.terms) + ", tail " + fmt(rep.tail_estimate);
  });

  double tc_vac = 0.0;
  r.run("tc-pole-invariance", 1e-10, [&](CheckResult& c) {
    tc_vac = find_tc(p, lt, Vacuum{}, cfg.critical).t_c;
    double worst = 0.0;
    std::string detail = "T_c = " + fmt(tc_vac);
    for (int n : {0, 1, 3, 5}) {
      const auto poles = locate_vertex_poles(Fock{n}, p, lt, cfg.critical);
      if (poles.size() != 1) fail(ErrorCode::NoSignChange, "Fock(" + std::to_string(n) + ") has " +
                                                                std::to_string(poles.size()) + " poles");
      worst = std::max(worst, std::abs(poles[0] / tc_vac - 1.0));
    }
    c.value = worst;
    c.passed = worst <= c.tolerance;
    c.detail = detail + ", Fock n in {0,1,3,5}";
  });

  r.run("thermal-tc-above-vacuum", 0.0, [&](CheckResult& c) {
    const auto th = find_tc(p, lt, Thermal{}, cfg.critical);
    const auto vac = find_tc(p, lt, Vacuum{}, cfg.critical);
    // first-order shift dm / |M'|: no cancellation, so it stays resolvable when
    // exp(-delta_c/T_c) puts the shift below one ulp of T_c
    const auto k = kernel_scalars(p, lt, vac.t_c, cfg.critical.kernel);
    const double x = std::exp(-p.delta_c / vac.t_c);
    const double dm = k.w * x / ((1.0 - x) * (1.0 - x));  // m_th - m_vac
    const double first_order = dm / std::abs(vac.dm_dt) / vac.t_c;
    const double ulp = std::nextafter(vac.t_c, INFINITY) / vac.t_c - 1.0;
    if (th.t_c != vac.t_c) {
      c.value = th.t_c / vac.t_c - 1.0;
      c.passed = th.t_c > vac.t_c;
    } else {
      c.value = first_order;
      c.passed = first_order > 0.0 && first_order < ulp;
    }
    c.detail = "thermal " + fmt(th.t_c) + " vs vacuum " + fmt(vac.t_c) + ", first-order relative shift " +
               fmt(first_order) + (th.t_c == vac.t_c ? " (below one ulp)" : "") +
               (th.multiple_roots ? "; " + th.warning : "");
  });

  for (int n = 0; n <= 5; ++n) {
    r.run("gamma-fock-" + std::to_string(n), 0.05, [&, n](CheckResult& c) {
      const auto f = fit_gamma(Fock{n}, p, lt, cfg.critical, cfg.gamma_window);
      c.value = f.exponent;
      c.passed = f.accepted && std::abs(f.exponent - (n + 1)) <= c.tolerance;
      c.detail = f.accepted ? "r^2 = " + fmt(f.r_squared) : f.diagnostic;
    });
  }
  r.run("gamma-thermal", 0.02, [&](CheckResult& c) {
    const auto f = fit_gamma(Thermal{}, p, lt, cfg.critical, cfg.gamma_window);
    c.value = f.exponent;
    c.passed = f.accepted && std::abs(f.exponent - 1.0) <= c.tolerance;
    c.detail = f.accepted ? "r^2 = " + fmt(f.r_squared) : f.diagnostic;
  });

  auto setup = [&](const InitialPhotonState& s) {
    return correlation_setup(s, p, lt, cfg.critical, 1.0, AnisotropyModel::Angular, cfg.fock_form);
  };
  double xi0 = 0.0;
  r.run("xi-fock-0", 0.0, [&](CheckResult& c) {
    xi0 = correlation_length(Fock{0}, cfg.xi_reduced_t, setup(Fock{0}), cfg.correlation);
    c.value = xi0;
    c.passed = xi0 > 0.0;
    c.detail = "reduced t = " + fmt(cfg.xi_reduced_t) + ", " + to_string(cfg.fock_form) + " vertex";
  });
  for (int n : {1, 3, 8}) {
    r.run("xi-ratio-fock-" + std::to_string(n), 0.02, [&, n](CheckResult& c) {
      if (!(xi0 > 0.0)) fail(ErrorCode::Domain, "no reference xi(0)");
      const double ratio = correlation_length(Fock{n}, cfg.xi_reduced_t, setup(Fock{n}), cfg.correlation) / xi0;
      c.value = ratio;
      c.passed = std::abs(ratio / std::sqrt(n + 1.0) - 1.0) <= c.tolerance;
      c.detail = "expected " + fmt(std::sqrt(n + 1.0));
    });
  }
  r.run("xi-ratio-thermal", 0.02, [&](CheckResult& c) {
    if (!(xi0 > 0.0)) fail(ErrorCode::Domain, "no reference xi(0)");
    const double ratio = correlation_length(Thermal{}, cfg.xi_reduced_t, setup(Thermal{}), cfg.correlation) / xi0;
    c.value = ratio;
    c.passed = std::abs(ratio - 1.0) <= c.tolerance;
  });
  for (const InitialPhotonState& s : {InitialPhotonState{Thermal{}}, InitialPhotonState{Fock{4}}}) {
    r.run("nu-" + to_string(s), 0.02, [&](CheckResult& c) {
      const auto f = fit_nu(s, setup(s), cfg.nu_window, cfg.correlation);
      c.value = f.exponent;
      c.passed = f.accepted && std::abs(f.exponent - 0.5) <= c.tolerance;
      c.detail = f.accepted ? "r^2 = " + fmt(f.r_squared) : f.diagnostic;
    });
  }

  r.run("bcs-quadrature-ratio", 1e-3, [&](CheckResult& c) {
    const auto q = bcs_kernel_quadrature(p, ConstantLifetime{p.delta_c / 1e3}, p.delta_c);
    c.value = std::abs(q.ratio - 1.0);
    c.passed = c.value < c.tolerance;
    c.detail = "delta_c tau = 1e3, T = delta_c, " + std::to_string(q.integral.evaluations) + " evaluations";
  });
  r.run("bcs-convergence-slope", 0.2, [&](CheckResult& c) {
    const auto s = bcs_convergence_study(p, p.delta_c, {10.0, 1e2, 1e3, 1e4});
    c.value = s.slope;
    c.passed = std::abs(s.slope + 1.0) <= c.tolerance;
    c.detail = "|ratio - 1| at delta_c tau = 10: " + fmt(s.deviation.front());
  });
  r.run("offshell-cancellation", 1e-2, [&](CheckResult& c) {
    const auto o = offshell_bcs_cancellation(p, ConstantLifetime{p.delta_c / 1e3}, p.delta_c);
    c.value = o.depth;
    c.passed = o.depth < c.tolerance;
    c.detail = "|sum| / a_bcs = " + fmt(o.relative_to_onshell) + "; +-2 delta_c sectors ~ " +
               fmt(two_delta_c_sector_estimate(p, ConstantLifetime{p.delta_c / 1e3}, p.delta_c));
  });

  r.run("sector-chain", 0.0, [&](CheckResult& c) {
    const BigRational gt = exact_rational(p.gtilde());
    int bad = 0;
    for (const auto& k : exact) {
      const auto sol = solve_sector_system(build_sector_system(k, gt));
      bool ok = sol == intermediate_vertex_closed_form(k);
      const auto series = taylor(sol / (RationalFunction(1) - RationalFunction::variable()), kOracleOrder);
      const auto h = solve_fock_hierarchy(kOracleOrder, k, hopts).values;
      for (int n = 0; n <= kOracleOrder; ++n) ok = ok && series[n] == h[n];
      if (!ok) ++bad;
    }
    c.value = bad;
    c.passed = bad == 0;
    c.detail = kernel_source;
  });
  r.run("sector-double-solve", 1e-12, [&](CheckResult& c) {
    if (t_probe <= 0.0) fail(ErrorCode::NoSignChange, "no vacuum T_c for the configured parameters");
    const auto sys = build_sector_system(p, lt, t_probe, {}, kopts);
    c.value = std::abs(solve_sector_system_at(sys, 0.0) * (1.0 - probe.m_vac) / probe.gamma0 - 1.0);
    c.passed = c.value < c.tolerance;
    c.detail = sys.q0_negligible ? "at 1.5 T_c, u = 0" : "at 1.5 T_c, u = 0; q0 shift is not small";
  });

  r.run("gaussian-collapse", 0.0, [&](CheckResult& c) {
    int bad = 0;
    for (const auto& k : exact) {
      const auto flat = exact_kernel(k.gamma0, k.a_bcs, BigRational(0));
      const auto h = solve_fock_hierarchy(kOracleOrder, flat, hopts).values;
      for (const auto& v : h) bad += v != h[0];
      SectorOptions no_source;
      no_source.zero_keldysh = true;
      const auto sol = solve_sector_system(build_sector_system(k, BigRational(1, 10), no_source));
      const auto s = taylor(sol / (RationalFunction(1) - RationalFunction::variable()), kOracleOrder);
      for (const auto& v : s) bad += v != s[0];
    }
    c.value = bad;
    c.passed = bad == 0;
    c.detail = "c2 = 0 hierarchy and source-free sector solve";
  });
  return report;
}

}  // namespace chsbs
