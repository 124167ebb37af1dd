// Acceptance gate: runs the built-in checks on every preset and grades criteria 1-8
// against pinned tolerances. Exit status is nonzero if any criterion fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chsbs/chsbs.h"
#include "commands.hpp"
#include "run_config.hpp"

using namespace chsbs_cli;

namespace {

struct Check {
  bool passed = false;
  double value = NAN;
  double tolerance = NAN;
  double seconds = 0.0;
  std::string detail;
};

using Report = std::map<std::string, Check>;

struct Preset {
  std::string name;
  Report checks;
};

struct Grade {
  bool ok = true;
  std::string why;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      why = what;
    }
  }
};

Report run_preset(const std::string& path, bool inject_fault) {
  RunConfig cfg = load_config(path);
  validate_config(cfg);
  const Context ctx(cfg, {1, false, inject_fault});
  chsbs_verify_report* rep = nullptr;
  if (chsbs_verify(ctx.get(), &rep) != CHSBS_OK) throw std::runtime_error(chsbs_last_error());
  Report out;
  for (std::size_t i = 0; i < chsbs_verify_count(rep); ++i) {
    out[chsbs_verify_name(rep, i)] = {chsbs_verify_passed(rep, i) == 1, chsbs_verify_value(rep, i),
                                      chsbs_verify_tolerance(rep, i), chsbs_verify_seconds(rep, i),
                                      chsbs_verify_detail(rep, i)};
  }
  chsbs_verify_report_destroy(rep);
  return out;
}

// Look up a check; a missing one fails the grade.
const Check* get(const Preset& p, const std::string& name, Grade& g) {
  const auto it = p.checks.find(name);
  g.require(it != p.checks.end(), p.name + ": check " + name + " missing");
  return it == p.checks.end() ? nullptr : &it->second;
}

// The library's own verdict must agree, and it must not have used a looser tolerance than the gate.
void library_agrees(const Preset& p, const std::string& name, const Check& c, double pinned, Grade& g) {
  g.require(c.passed, p.name + ": " + name + " failed in the library (" + c.detail + ")");
  g.require(c.tolerance <= pinned, p.name + ": " + name + " ran with a looser tolerance than pinned");
}

struct Criterion {
  int id;
  const char* title;
  double runtime_limit;  // seconds per preset; 0 = none
  std::vector<std::string> checks;
  std::function<void(const Preset&, Grade&)> grade;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> files;
  bool inject_fault = false;  // negative control: the gate must then fail
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--inject-fault") inject_fault = true;
    else files.emplace_back(argv[i]);
  }
  if (files.empty()) {
    std::fprintf(stderr, "usage: acceptance [--inject-fault] <preset config>...\n");
    return 2;
  }

  std::vector<Preset> presets;
  for (const auto& f : files) {
    try {
      presets.push_back({f.substr(f.find_last_of('/') + 1), run_preset(f, inject_fault)});
    } catch (const std::exception& e) {
      std::fprintf(stderr, "%s: %s\n", f.c_str(), e.what());
      return 2;
    }
  }

  std::vector<std::string> gamma_checks;
  for (int n = 0; n <= 5; ++n) gamma_checks.push_back("gamma-fock-" + std::to_string(n));
  gamma_checks.push_back("gamma-thermal");

  const std::vector<Criterion> criteria{
      {1, "oracle equivalence, n = 0..12, exact", 1.0, {"series-oracle"},
       [](const Preset& p, Grade& g) {
         if (const auto* c = get(p, "series-oracle", g)) {
           library_agrees(p, "series-oracle", *c, 0.0, g);
           g.require(c->value == 0.0, p.name + ": series mismatch");
         }
       }},
      {2, "thermal closure identity and resummation", 1.0, {"thermal-identity", "thermal-resummation"},
       [](const Preset& p, Grade& g) {
         if (const auto* c = get(p, "thermal-identity", g)) {
           library_agrees(p, "thermal-identity", *c, 0.0, g);
           g.require(c->value == 0.0, p.name + ": identity residual nonzero");
         }
         if (const auto* c = get(p, "thermal-resummation", g)) {
           library_agrees(p, "thermal-resummation", *c, 1e-8, g);  // tail < 1e-12 is part of the library verdict
           g.require(c->value < 1e-8, p.name + ": resummation residual " + std::to_string(c->value));
         }
       }},
      {3, "T_c invariance across Fock n, thermal above vacuum", 10.0,
       {"tc-pole-invariance", "thermal-tc-above-vacuum"},
       [](const Preset& p, Grade& g) {
         if (const auto* c = get(p, "tc-pole-invariance", g)) {
           library_agrees(p, "tc-pole-invariance", *c, 1e-10, g);
           g.require(c->value <= 1e-10, p.name + ": pole/root mismatch");
         }
         if (const auto* c = get(p, "thermal-tc-above-vacuum", g)) {
           library_agrees(p, "thermal-tc-above-vacuum", *c, 0.0, g);
           g.require(c->value > 0.0, p.name + ": thermal T_c not above vacuum");
         }
       }},
      {4, "susceptibility exponents gamma", 30.0, gamma_checks,
       [](const Preset& p, Grade& g) {
         for (int n = 0; n <= 5; ++n) {
           const std::string name = "gamma-fock-" + std::to_string(n);
           if (const auto* c = get(p, name, g)) {
             library_agrees(p, name, *c, 0.05, g);
             g.require(std::abs(c->value - (n + 1)) <= 0.05, p.name + ": " + name + " = " + std::to_string(c->value));
           }
         }
         if (const auto* c = get(p, "gamma-thermal", g)) {
           library_agrees(p, "gamma-thermal", *c, 0.02, g);
           g.require(std::abs(c->value - 1.0) <= 0.02, p.name + ": gamma-thermal = " + std::to_string(c->value));
         }
       }},
      {5, "correlation length ratios and nu", 120.0,
       {"xi-fock-0", "xi-ratio-fock-1", "xi-ratio-fock-3", "xi-ratio-fock-8", "nu-thermal", "nu-fock:4"},
       [](const Preset& p, Grade& g) {
         for (int n : {1, 3, 8}) {
           const std::string name = "xi-ratio-fock-" + std::to_string(n);
           if (const auto* c = get(p, name, g)) {
             const double expect = std::sqrt(n + 1.0);
             g.require(c->passed, p.name + ": " + name + " failed in the library (" + c->detail + ")");
             g.require(std::abs(c->value / expect - 1.0) <= 0.02, p.name + ": " + name + " = " + std::to_string(c->value));
           }
         }
         for (const char* name : {"nu-thermal", "nu-fock:4"}) {
           if (const auto* c = get(p, name, g)) {
             library_agrees(p, name, *c, 0.02, g);
             g.require(std::abs(c->value - 0.5) <= 0.02, p.name + ": " + name + " = " + std::to_string(c->value));
           }
         }
       }},
      {6, "BCS-kernel quadrature, convergence slope, off-shell cancellation", 60.0,
       {"bcs-quadrature-ratio", "bcs-convergence-slope", "offshell-cancellation"},
       [](const Preset& p, Grade& g) {
         if (const auto* c = get(p, "bcs-quadrature-ratio", g)) {
           library_agrees(p, "bcs-quadrature-ratio", *c, 1e-3, g);
           g.require(std::abs(c->value) <= 1e-3, p.name + ": ratio deviation " + std::to_string(c->value));
         }
         if (const auto* c = get(p, "bcs-convergence-slope", g)) {
           library_agrees(p, "bcs-convergence-slope", *c, 0.2, g);
           g.require(std::abs(c->value + 1.0) <= 0.2, p.name + ": slope " + std::to_string(c->value));
         }
         if (const auto* c = get(p, "offshell-cancellation", g)) {
           library_agrees(p, "offshell-cancellation", *c, 1e-2, g);
           g.require(c->value < 1e-2, p.name + ": off-shell depth " + std::to_string(c->value));
         }
       }},
      {7, "sector chain equals closed form and hierarchy, exact", 5.0, {"sector-chain"},
       [](const Preset& p, Grade& g) {
         if (const auto* c = get(p, "sector-chain", g)) {
           library_agrees(p, "sector-chain", *c, 0.0, g);
           g.require(c->value == 0.0, p.name + ": sector chain mismatch");
         }
       }},
      {8, "Gaussian collapse, exact", 0.0, {"gaussian-collapse"},
       [](const Preset& p, Grade& g) {
         if (const auto* c = get(p, "gaussian-collapse", g)) {
           library_agrees(p, "gaussian-collapse", *c, 0.0, g);
           g.require(c->value == 0.0, p.name + ": state dependence survives");
         }
       }},
  };

  int failures = 0;
  for (const auto& cr : criteria) {
    Grade g;
    double worst_time = 0.0;
    for (const auto& p : presets) {
      cr.grade(p, g);
      double t = 0.0;
      for (const auto& name : cr.checks) {
        const auto it = p.checks.find(name);
        if (it != p.checks.end()) t += it->second.seconds;
      }
      worst_time = std::max(worst_time, t);
    }
    if (cr.runtime_limit > 0.0)
      g.require(worst_time < cr.runtime_limit, "runtime " + std::to_string(worst_time) + " s over the limit");
    char limit[32] = "none";
    if (cr.runtime_limit > 0.0) std::snprintf(limit, sizeof limit, "%g s", cr.runtime_limit);
    std::printf("criterion %d: %s  %s  [%zu presets, %.3f s, limit %s]%s%s\n", cr.id, g.ok ? "PASS" : "FAIL", cr.title,
                presets.size(), worst_time, limit, g.ok ? "" : "  ", g.why.c_str());
    if (!g.ok) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
