#pragma once

#include <string>
#include <vector>

#include "chsbs/critical.hpp"
#include "chsbs/model.hpp"

namespace chsbs {

struct VerifyConfig {
  ModelParams params = ModelParams::from_gtilde(0.025, 1.0, 100.0);
  LifetimeModel lifetime = ConstantLifetime{0.05};
  CriticalOptions critical;
  FitWindow gamma_window;
  FitWindow nu_window{1e-4, 1e-2, 9};
  double xi_reduced_t = 1e-3;
  CorrelationOptions correlation;
  FockVertexForm fock_form = FockVertexForm::Binomial;
  unsigned seed = 20240611u;   // random rational test kernels
  int random_kernels = 6;
  bool inject_f_fault = false;  // negative control for the series oracle
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // the measured quantity (discrepancy, exponent, ...)
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Runs every cross-module invariant on one parameter set. Checks that throw are
// recorded as failures with the error message; nothing propagates.
VerifyReport run_verification(const VerifyConfig& config);

}  // namespace chsbs
