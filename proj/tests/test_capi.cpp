#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "chsbs/chsbs.h"
#include "doctest.h"

extern "C" int capi_c_smoke(void);

namespace {

struct Context {
  chsbs_context* ctx = nullptr;
  Context() { REQUIRE(chsbs_context_create(&ctx) == CHSBS_OK); }
  ~Context() { chsbs_context_destroy(ctx); }
};

}  // namespace

TEST_CASE("header compiles and links from C") { CHECK(capi_c_smoke() == 1); }

TEST_CASE("default context: T_c and exponents") {
  Context c;
  chsbs_tc_result tc{};
  REQUIRE(chsbs_find_tc(c.ctx, "fock:3", &tc) == CHSBS_OK);
  CHECK(tc.t_c == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(tc.thermal_mode == 0);
  chsbs_tc_result th{};
  REQUIRE(chsbs_find_tc(c.ctx, "thermal", &th) == CHSBS_OK);
  CHECK(th.thermal_mode == 1);
  CHECK(th.t_c > tc.t_c);

  chsbs_fit_result f{};
  REQUIRE(chsbs_fit_gamma(c.ctx, "fock:2", &f) == CHSBS_OK);
  CHECK(f.accepted == 1);
  CHECK(std::abs(f.exponent - 3.0) < 0.05);
  REQUIRE(chsbs_fit_nu(c.ctx, "thermal", &f) == CHSBS_OK);
  CHECK(std::abs(f.exponent - 0.5) < 0.02);

  double poles[4];
  size_t count = 0;
  REQUIRE(chsbs_vertex_poles(c.ctx, "fock:1", poles, 4, &count) == CHSBS_OK);
  REQUIRE(count == 1);
  CHECK(poles[0] == doctest::Approx(tc.t_c).epsilon(1e-10));
  CHECK(chsbs_vertex_poles(c.ctx, "fock:1", poles, 0, &count) == CHSBS_BUFFER_TOO_SMALL);
  CHECK(count == 1);

  double xi = 0.0, xi2 = 0.0, xi_n = 0.0;
  REQUIRE(chsbs_correlation_length(c.ctx, "fock:0", 1e-3, &xi, &xi2) == CHSBS_OK);
  REQUIRE(chsbs_correlation_length(c.ctx, "fock:3", 1e-3, &xi_n, nullptr) == CHSBS_OK);
  CHECK(xi_n / xi == doctest::Approx(2.0).epsilon(0.02));
  CHECK(xi2 == doctest::Approx(xi).epsilon(0.05));
}

TEST_CASE("kernel, hierarchy and sector queries") {
  Context c;
  chsbs_kernel k{};
  REQUIRE(chsbs_kernel_scalars(c.ctx, 0.1, &k) == CHSBS_OK);
  CHECK(k.a_bcs == doctest::Approx(0.25));
  CHECK(k.c2 == doctest::Approx(0.25));
  CHECK(k.w == doctest::Approx(2.0));
  double m = 0.0;
  REQUIRE(chsbs_critical_function(c.ctx, "vacuum", 0.1, &m) == CHSBS_OK);
  CHECK(m == doctest::Approx(0.75));
  std::vector<double> h(4);
  REQUIRE(chsbs_fock_hierarchy(c.ctx, 0.1, 3, h.data()) == CHSBS_OK);
  double v = 0.0;
  REQUIRE(chsbs_onshell_vertex(c.ctx, "fock:3", 0.1, &v) == CHSBS_OK);
  CHECK(v == h[3]);
  double slope = 0.0;
  REQUIRE(chsbs_mass_slope(c.ctx, "vacuum", &slope) == CHSBS_OK);
  CHECK(slope == doctest::Approx(0.025 / (0.05 * 0.05)).epsilon(1e-8));

  REQUIRE(chsbs_set_lifetime_constant(c.ctx, 1e-3) == CHSBS_OK);
  double ratio = 0.0, dct = 0.0, depth = 0.0;
  REQUIRE(chsbs_bcs_quadrature(c.ctx, 1.0, &ratio, &dct, nullptr) == CHSBS_OK);
  CHECK(std::abs(ratio - 1.0) < 1e-3);
  CHECK(dct == doctest::Approx(1e3));
  REQUIRE(chsbs_offshell_cancellation(c.ctx, 1.0, &depth, nullptr) == CHSBS_OK);
  CHECK(depth < 1e-2);

  int equal = 0;
  REQUIRE(chsbs_oracle_check("-3/2", "1/7", "1/20", 12, &equal) == CHSBS_OK);
  CHECK(equal == 1);
  CHECK(chsbs_oracle_check("-3/2", "1/x", "1/20", 12, &equal) == CHSBS_INVALID_ARGUMENT);
  CHECK(chsbs_oracle_check("-3/2", "1/0", "1/20", 12, &equal) == CHSBS_INVALID_ARGUMENT);
}

TEST_CASE("errors map to status codes with a message") {
  Context c;
  double v = 0.0;
  CHECK(chsbs_onshell_vertex(c.ctx, "fock:-2", 0.1, &v) == CHSBS_INVALID_ARGUMENT);
  CHECK(std::string(chsbs_last_error()).find("non-negative") != std::string::npos);
  CHECK(chsbs_set_convention(c.ctx, "bogus") == CHSBS_INVALID_ARGUMENT);
  CHECK(chsbs_set_lifetime_constant(c.ctx, -1.0) == CHSBS_INVALID_ARGUMENT);
  CHECK(chsbs_set_gamma_window(c.ctx, 1e-3, 1e-6, 10) == CHSBS_INVALID_ARGUMENT);
  CHECK(chsbs_find_tc(nullptr, "vacuum", nullptr) == CHSBS_INVALID_ARGUMENT);
  CHECK(chsbs_onshell_vertex(c.ctx, "vacuum", 0.05, &v) == CHSBS_CRITICALITY);
  REQUIRE(chsbs_set_lifetime_constant(c.ctx, 0.025 / std::sqrt(0.6)) == CHSBS_OK);
  chsbs_tc_result tc{};
  CHECK(chsbs_find_tc(c.ctx, "vacuum", &tc) == CHSBS_NO_SIGN_CHANGE);
  CHECK(std::string(chsbs_status_string(CHSBS_QUADRATURE)) == "quadrature failure");
  CHECK(chsbs_onshell_vertex(c.ctx, "vacuum", 0.2, &v) == CHSBS_OK);
  CHECK(std::string(chsbs_last_error()).empty());
}

TEST_CASE("canonical state spelling") {
  char buf[64];
  REQUIRE(chsbs_canonical_state(" mix:{2:0.5, 0:0.5} ", buf, sizeof buf) == CHSBS_OK);
  CHECK(std::string(buf) == "mix:{0:0.5,2:0.5}");
  CHECK(chsbs_canonical_state("thermal:beta=2.0", buf, 4) == CHSBS_INVALID_ARGUMENT);
}

TEST_CASE("verification report") {
  Context c;
  chsbs_verify_report* r = nullptr;
  REQUIRE(chsbs_verify(c.ctx, &r) == CHSBS_OK);
  CHECK(chsbs_verify_all_passed(r) == 1);
  const size_t n = chsbs_verify_count(r);
  CHECK(n >= 20);
  for (size_t i = 0; i < n; ++i) {
    INFO(chsbs_verify_name(r, i) << ": " << chsbs_verify_detail(r, i));
    CHECK(chsbs_verify_passed(r, i) == 1);
  }
  CHECK(chsbs_verify_name(r, n) == nullptr);
  CHECK(std::isnan(chsbs_verify_value(r, n)));
  chsbs_verify_report_destroy(r);

  REQUIRE(chsbs_set_fault_injection(c.ctx, 1) == CHSBS_OK);
  REQUIRE(chsbs_verify(c.ctx, &r) == CHSBS_OK);
  CHECK(chsbs_verify_all_passed(r) == 0);
  CHECK(std::string(chsbs_verify_name(r, 0)) == "series-oracle");
  CHECK(chsbs_verify_passed(r, 0) == 0);
  chsbs_verify_report_destroy(r);
}

TEST_CASE("concurrent queries on one context") {
  Context c;
  std::vector<double> out(8);
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i) {
    pool.emplace_back([&, i] {
      const std::string s = "fock:" + std::to_string(i % 4);
      chsbs_fit_result f{};
      if (chsbs_fit_gamma(c.ctx, s.c_str(), &f) == CHSBS_OK) out[i] = f.exponent;
    });
  }
  for (auto& t : pool) t.join();
  for (int i = 0; i < 8; ++i) CHECK(out[i] == doctest::Approx(i % 4 + 1).epsilon(0.05));
  CHECK(out[0] == out[4]);
}
