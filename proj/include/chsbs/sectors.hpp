#pragma once

#include <array>
#include <string>
#include <vector>

#include "chsbs/hierarchy.hpp"
#include "chsbs/model.hpp"
#include "chsbs/quadrature.hpp"
#include "chsbs/useries.hpp"

namespace chsbs {

// ------------------------------------------------------------ BCS loop quadrature

struct BcsKernelQuadrature {
  QuadratureResult integral;  // the frequency integral, broadened G_K and exact D_A
  Complex analytic{};         // its contour-integration value for delta_c * tau -> infinity
  double ratio = 0.0;         // Re(integral / analytic)
  double delta_c_tau = 0.0;
};

// Numerical check of the contour step that turns the BCS loop into gtilde delta_c / T.
// Works in delta_c units internally. Throws ErrorCode::Quadrature past 1e6 evaluations.
BcsKernelQuadrature bcs_kernel_quadrature(const ModelParams& p, const LifetimeModel& lt, double T,
                                          double tol = 1e-10);

struct ConvergenceStudy {
  std::vector<double> delta_c_tau;
  std::vector<double> deviation;  // |ratio - 1|
  double slope = 0.0;             // d log(deviation) / d log(delta_c tau)
  double r_squared = 0.0;
};

// Sweep of the quadrature ratio over constant lifetimes tau = delta_c_tau / delta_c.
ConvergenceStudy bcs_convergence_study(const ModelParams& p, double T, const std::vector<double>& delta_c_tau,
                                       double tol = 1e-10);

struct OffshellCancellation {
  std::array<Complex, 4> terms{};  // (s, sign of Im omega_1) = (+,+), (+,-), (-,+), (-,-)
  Complex sum{};
  double depth = 0.0;              // |sum| / sum |terms|, ~ 1/(delta_c tau)
  double relative_to_onshell = 0.0;  // |sum| / a_bcs, kept as a diagnostic
};

// BCS kernels at external frequencies +delta_c and -delta_c, from the residues at
// omega_1 = +-i/tau. The two external sectors cancel pairwise.
OffshellCancellation offshell_bcs_cancellation(const ModelParams& p, const LifetimeModel& lt, double T);

// Kernel of the omitted +-2 delta_c sectors relative to the +-delta_c ones: gamma^2 / (4 delta_c^2 + gamma^2).
double two_delta_c_sector_estimate(const ModelParams& p, const LifetimeModel& lt, double T);

// ------------------------------------------------------------------ sector system

enum Sector { OnShell = 0, PlusDeltaC = 1, MinusDeltaC = 2 };
std::string to_string(Sector s);

struct SectorEntry {
  RationalFunction value;  // 0 for absent couplings
  bool resonant = false;   // carries the photon statistics factor (1+u)/(1-u)
};

struct SectorOptions {
  bool zero_resonant = false;  // drop photon absorption/emission, BCS only
  bool zero_keldysh = false;   // photon statistics factor -> 1 (no source dependence)
};

// Gamma = b + K Gamma over the three frequency sectors.
struct SectorSystem {
  std::array<std::array<SectorEntry, 3>, 3> kernel;
  std::array<BigRational, 3> bare{};
  // finite q0 only shifts the electron energy; the reduction assumes this is small
  double q0_energy_shift = 0.0;
  bool q0_negligible = true;
};

// Exact assembly from rational kernel scalars; requires the physical hierarchy weight.
SectorSystem build_sector_system(const KernelScalars<BigRational>& k, const BigRational& gtilde,
                                 const SectorOptions& opts = {});
// From physical parameters: every double enters as its exact dyadic rational.
SectorSystem build_sector_system(const ModelParams& p, const LifetimeModel& lt, double T,
                                 const SectorOptions& opts = {}, const KernelOptions& kopts = {});

// On-shell component by Gaussian elimination over rational functions of u.
// Throws ErrorCode::Singular if a pivot vanishes identically or at u = 0.
RationalFunction solve_sector_system(const SectorSystem& sys);

// The same solve in double precision at a fixed u (partial pivoting).
double solve_sector_system_at(const SectorSystem& sys, double u);

}  // namespace chsbs
