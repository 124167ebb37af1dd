#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chsbs/dual.hpp"
#include "chsbs/error.hpp"

namespace chsbs {

using Complex = std::complex<double>;

// Physical scales. g0 is an energy (the coupling enters only through g0^2/delta_c
// and g0^2/delta_c^2); gtilde is derived, never stored.
struct ModelParams {
  double g0 = 0.0;
  double delta_c = 1.0;
  double q0 = 0.0;
  double fermi_energy = 1.0;
  double fermi_momentum = 1.0;

  static ModelParams from_gtilde(double gtilde, double delta_c, double fermi_energy,
                                 double fermi_momentum = 1.0, double q0 = 0.0);

  double gtilde() const;
  void validate() const;

  // Energies divided by delta_c; momenta untouched. gtilde is invariant.
  ModelParams in_delta_c_units() const;
};

struct ConstantLifetime {
  double inverse_tau = 0.0;
};
struct FermiLiquidLifetime {};
using LifetimeModel = std::variant<ConstantLifetime, FermiLiquidLifetime>;

LifetimeModel in_delta_c_units(const LifetimeModel& lt, double delta_c);
void validate(const LifetimeModel& lt);

// tau^-1(T). Templated so temperature derivatives can flow through Dual.
template <class S>
S inverse_lifetime(const LifetimeModel& lt, const ModelParams& p, const S& T) {
  if (const auto* c = std::get_if<ConstantLifetime>(&lt)) return S(c->inverse_tau);
  const double t = value_of(T);
  if (!(t > 0.0 && t < p.fermi_energy))
    fail(ErrorCode::Domain, "Fermi-liquid lifetime needs 0 < T < E_F, got T=" + std::to_string(t));
  using std::log;
  return (std::numbers::pi / (8.0 * p.fermi_energy)) * T * T * log(p.fermi_energy / T);
}

// Dispersion measured from the Fermi surface.
struct Dispersion {
  std::function<double(double)> energy;

  static Dispersion quadratic_2d(double fermi_energy, double fermi_momentum);
  double operator()(double k) const { return energy(k); }
};

struct Vacuum {
  bool operator==(const Vacuum&) const = default;
};
struct Fock {
  int n = 0;
  bool operator==(const Fock&) const = default;
};
// beta = nullopt: photons equilibrated with the electrons (beta = 1/T).
struct Thermal {
  std::optional<double> beta;
  bool operator==(const Thermal&) const = default;
};
struct DiagonalMixture {
  std::map<int, double> weights;
  bool operator==(const DiagonalMixture&) const = default;
};
using InitialPhotonState = std::variant<Vacuum, Fock, Thermal, DiagonalMixture>;

void validate(const InitialPhotonState& state);
std::string to_string(const InitialPhotonState& state);
// Inverse of to_string; surrounding whitespace is ignored. Throws InvalidArgument.
InitialPhotonState parse_state(std::string_view text);
// Comma-separated list; commas inside mix:{...} belong to the mixture.
std::vector<InitialPhotonState> parse_state_list(std::string_view text);

// x = exp(-beta * delta_c) for a thermal state; T is used when beta is not pinned.
double boltzmann_factor(const Thermal& th, const ModelParams& p, std::optional<double> T);

// Normalized weights (1-x) x^n, truncated once the remaining mass drops below tail.
struct BoltzmannWeights {
  std::vector<double> weights;
  double tail = 0.0;  // probability mass not represented
};
BoltzmannWeights boltzmann_weights(double x, double tail_tolerance);

Complex fermion_gr(double k, double omega, const ModelParams& p, const LifetimeModel& lt,
                   double T, bool advanced = false, const Dispersion* dispersion = nullptr);
Complex fermion_gk(double k, double omega, const ModelParams& p, const LifetimeModel& lt,
                   double T, const Dispersion* dispersion = nullptr);

Complex photon_dr(double omega, const ModelParams& p, double eta, bool advanced = false);

struct SpectralDelta {
  double frequency;
  double weight;
};
// 2i Im D_R as a sum of delta functions; the overall factor i is left to the caller.
std::array<SpectralDelta, 2> photon_im_dr_weights(const ModelParams& p);

// (1+u)/(1-u) replaced by the state's value.
double statistical_factor(const InitialPhotonState& state, const ModelParams& p,
                          std::optional<double> T = std::nullopt);

Complex photon_dk_physical(double t, double t_prime, const ModelParams& p,
                           const InitialPhotonState& state, std::optional<double> T = std::nullopt);

// Hermitian matrix of <b_s^dagger b_s'>, row-major.
struct CorrelationMatrix {
  std::size_t dim = 0;
  std::vector<Complex> entries;

  Complex operator()(std::size_t s, std::size_t s_prime) const { return entries[s * dim + s_prime]; }
  bool is_hermitian(double tol = 1e-12) const;
};

Complex photon_gk_two_time(std::size_t s, std::size_t s_prime, double t, double t_prime,
                           const CorrelationMatrix& correlations,
                           std::span<const double> mode_frequencies);

double mean_photon_number(const InitialPhotonState& state, const ModelParams& p,
                          std::optional<double> T = std::nullopt);

}  // namespace chsbs
