#include "chsbs/verify.hpp"
#include "doctest.h"

using namespace chsbs;

namespace {

const CheckResult& find(const VerifyReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  throw 0;
}

void require_all(const VerifyReport& r) {
  for (const auto& c : r.checks) {
    INFO(c.name << ": value " << c.value << " tol " << c.tolerance << " " << c.detail);
    CHECK(c.passed);
  }
  CHECK(r.all_passed());
}

}  // namespace

TEST_CASE("default parameters pass every check") {
  const auto r = run_verification({});
  CHECK(r.checks.size() >= 20);
  require_all(r);
}

TEST_CASE("Fermi-liquid lifetime passes every check") {
  VerifyConfig cfg;
  cfg.params = ModelParams::from_gtilde(2e-5, 1.0, 200.0);  // delta_c / T_c ~ 20
  cfg.lifetime = FermiLiquidLifetime{};
  require_all(run_verification(cfg));
}

TEST_CASE("a wrong hierarchy coefficient is caught") {
  VerifyConfig cfg;
  cfg.inject_f_fault = true;
  const auto r = run_verification(cfg);
  const auto& oracle = find(r, "series-oracle");
  CHECK_FALSE(oracle.passed);
  CHECK(oracle.detail.find("first mismatch at n=") != std::string::npos);
  CHECK_FALSE(find(r, "sector-chain").passed);
  CHECK_FALSE(r.all_passed());
  CHECK(find(r, "thermal-identity").passed);
}

TEST_CASE("configured kernel unavailable: rational test kernels still run") {
  VerifyConfig cfg;
  cfg.lifetime = ConstantLifetime{0.025 / std::sqrt(0.6)};  // 2 c2 = 1.2: no T_c
  const auto r = run_verification(cfg);
  const auto& oracle = find(r, "series-oracle");
  CHECK(oracle.passed);
  CHECK(oracle.detail.find("unavailable") != std::string::npos);
  CHECK_FALSE(find(r, "tc-pole-invariance").passed);
  CHECK(find(r, "tc-pole-invariance").detail.find("error:") == 0);
}
