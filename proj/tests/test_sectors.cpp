#include <cmath>

#include "chsbs/sectors.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace chsbs;

namespace {

const ModelParams kUnit = ModelParams::from_gtilde(0.02, 1.0, 100.0);

LifetimeModel lifetime(double delta_c_tau, double delta_c = 1.0) { return ConstantLifetime{delta_c / delta_c_tau}; }

KernelScalars<BigRational> random_kernel() {
  const BigRational a = testgen::rational_in(BigRational(-1), BigRational(2, 5));
  const BigRational c2 = testgen::rational_in(BigRational(0), BigRational(1, 5));
  return exact_kernel(testgen::rational(-9, -1), a, c2);
}

}  // namespace

TEST_CASE("BCS loop quadrature reproduces the contour result") {
  const auto q = bcs_kernel_quadrature(kUnit, lifetime(1e3), 1.0);
  CHECK(std::abs(q.ratio - 1.0) < 1e-3);
  CHECK(q.delta_c_tau == doctest::Approx(1e3));
  CHECK(q.integral.evaluations > 0);
  CHECK(q.integral.error_estimate < 1e-8 * std::abs(q.integral.value));
  // physical units give the same ratio
  const auto scaled = ModelParams::from_gtilde(0.02, 50.0, 5000.0);
  CHECK(bcs_kernel_quadrature(scaled, lifetime(1e3, 50.0), 50.0).ratio == doctest::Approx(q.ratio).epsilon(1e-9));
}

TEST_CASE("BCS quadrature converges like 1/(delta_c tau)") {
  const auto s = bcs_convergence_study(kUnit, 1.0, {10.0, 1e2, 1e3, 1e4});
  CHECK(std::abs(s.slope + 1.0) <= 0.2);
  REQUIRE(s.deviation.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(s.deviation[i] < s.deviation[i - 1]);
  MESSAGE("deviation at delta_c tau = 10: " << s.deviation[0]);
  CHECK_THROWS_AS(bcs_convergence_study(kUnit, 1.0, {10.0}), Error);
}

TEST_CASE("BCS loop vanishes when tanh(omega/2T) does") {
  const double cold = std::abs(bcs_kernel_quadrature(kUnit, lifetime(1e3), 1.0).integral.value);
  const double hot = std::abs(bcs_kernel_quadrature(kUnit, lifetime(1e3), 1e6).integral.value);
  CHECK(hot < 1e-5 * cold);
}

TEST_CASE("off-shell BCS kernels cancel pairwise") {
  const auto c = offshell_bcs_cancellation(kUnit, lifetime(1e3), 1.0);
  CHECK(c.depth < 1e-2);
  for (const auto& t : c.terms) CHECK(std::abs(t) > 0.0);
  CHECK(std::abs(c.terms[0]) > 10.0 * std::abs(c.sum));
  double prev = 1.0;
  for (double dt : {10.0, 20.0, 50.0, 100.0}) {
    const double d = offshell_bcs_cancellation(kUnit, lifetime(dt), 1.0).depth;
    CHECK(d < prev);
    prev = d;
  }
  CHECK(c.depth == doctest::Approx(0.5e-3).epsilon(1e-2));
}

TEST_CASE("two-delta_c sector estimate") {
  for (double dt : {10.0, 1e3}) {
    CHECK(two_delta_c_sector_estimate(kUnit, lifetime(dt), 1.0) ==
          doctest::Approx(1.0 / (4.0 * dt * dt)).epsilon(1.0 / (dt * dt)));
  }
}

TEST_CASE("sector system structure") {
  const auto sys = build_sector_system(random_kernel(), BigRational(1, 40));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto& e = sys.kernel[i][j];
      const bool u_dependent = e.value.numerator().degree() > 0 || e.value.denominator().degree() > 0;
      CHECK(u_dependent == e.resonant);
    }
  }
  CHECK(sys.kernel[OnShell][OnShell].value.numerator().degree() <= 0);
  CHECK_FALSE(sys.kernel[PlusDeltaC][PlusDeltaC].resonant);
  CHECK(sys.bare[PlusDeltaC] == 0);
  CHECK(to_string(MinusDeltaC) == "-delta_c");
}

TEST_CASE("sector solve equals the closed-form vertex exactly") {
  for (int trial = 0; trial < 12; ++trial) {
    const auto k = random_kernel();
    const BigRational gt = testgen::rational_in(BigRational(1, 100), BigRational(1, 2));
    const RationalFunction sol = solve_sector_system(build_sector_system(k, gt));
    CHECK(sol == intermediate_vertex_closed_form(k));
    CHECK(sol.denominator().degree() <= 2);
    const auto series = taylor(sol / (RationalFunction(1) - RationalFunction::variable()), 10);
    const auto h = solve_fock_hierarchy(10, k).values;
    for (int n = 0; n <= 10; ++n) CHECK(series[n] == h[n]);
  }
}

TEST_CASE("double-precision sector solve at fixed u") {
  const auto p = ModelParams::from_gtilde(0.025, 1.0, 100.0);
  const LifetimeModel lt = ConstantLifetime{0.05};
  for (double T : {0.06, 0.1, 0.3}) {
    const auto sys = build_sector_system(p, lt, T);
    const auto kd = kernel_scalars(p, lt, T);
    const double closed = kd.gamma0 / (1.0 - kd.m_vac);
    CHECK(std::abs(solve_sector_system_at(sys, 0.0) / closed - 1.0) < 1e-12);
    const auto exact = intermediate_vertex_closed_form(
        exact_kernel(exact_rational(kd.gamma0), exact_rational(kd.a_bcs), exact_rational(kd.c2)));
    for (double u : {0.01, 0.05}) CHECK(solve_sector_system_at(sys, u) == doctest::Approx(exact.evaluate(u)).epsilon(1e-12));
    CHECK(sys.q0_negligible);
  }
  auto far = p;
  far.q0 = 0.09 * far.fermi_momentum;  // valid, but the shift is ~ 19 delta_c
  CHECK_FALSE(build_sector_system(far, lt, 0.1).q0_negligible);
}

TEST_CASE("BCS-only and source-free limits") {
  for (int trial = 0; trial < 6; ++trial) {
    const auto k = random_kernel();
    SectorOptions bcs;
    bcs.zero_resonant = true;
    CHECK(solve_sector_system(build_sector_system(k, BigRational(1, 10), bcs)) ==
          RationalFunction(k.gamma0 / (1 - k.a_bcs)));
    SectorOptions flat;
    flat.zero_keldysh = true;
    const auto sol = solve_sector_system(build_sector_system(k, BigRational(1, 10), flat));
    CHECK(sol == RationalFunction(k.gamma0 / (1 - k.m_vac)));
    // u-independent vertex: every Fock level is the same number
    const auto series = taylor(sol / (RationalFunction(1) - RationalFunction::variable()), 8);
    for (const auto& c : series) CHECK(c == series[0]);
  }
}

TEST_CASE("singular and unsupported systems") {
  const auto critical = exact_kernel(BigRational(-1), BigRational(1, 2), BigRational(1, 4));  // m_vac = 1
  CHECK_THROWS_AS(solve_sector_system(build_sector_system(critical, BigRational(1, 10))), Error);
  CHECK_THROWS_AS(build_sector_system(exact_kernel(BigRational(-1), BigRational(0), BigRational(1, 10),
                                                   HierarchyWeight::Simplified),
                                      BigRational(1, 10)),
                  Error);
  KernelOptions simplified;
  simplified.weight = HierarchyWeight::Simplified;
  CHECK_THROWS_AS(build_sector_system(kUnit, lifetime(10.0), 0.5, {}, simplified), Error);
}
