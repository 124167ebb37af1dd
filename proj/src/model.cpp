#include "chsbs/model.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace chsbs {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void require_finite(const Complex& z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail(ErrorCode::Domain, std::string(what) + ": non-finite result");
}

double lifetime_rate(const LifetimeModel& lt, const ModelParams& p, double T) {
  const double g = inverse_lifetime(lt, p, T);
  if (!(g > 0.0) || !std::isfinite(g))
    fail(ErrorCode::Domain, "inverse lifetime must be positive and finite");
  return g;
}

}  // namespace

ModelParams ModelParams::from_gtilde(double gtilde, double delta_c, double fermi_energy,
                                     double fermi_momentum, double q0) {
  if (!(gtilde >= 0.0)) fail(ErrorCode::InvalidArgument, "gtilde must be non-negative");
  ModelParams p;
  p.delta_c = delta_c;
  p.g0 = 4.0 * std::numbers::pi * delta_c * std::sqrt(gtilde);
  p.fermi_energy = fermi_energy;
  p.fermi_momentum = fermi_momentum;
  p.q0 = q0;
  return p;
}

double ModelParams::gtilde() const {
  const double r = g0 / (4.0 * std::numbers::pi * delta_c);
  return r * r;
}

void ModelParams::validate() const {
  if (!(delta_c > 0.0) || !std::isfinite(delta_c))
    fail(ErrorCode::InvalidArgument, "delta_c must be positive (attractive regime)");
  if (!std::isfinite(g0)) fail(ErrorCode::InvalidArgument, "g0 must be finite");
  if (!(fermi_energy > 0.0) || !std::isfinite(fermi_energy))
    fail(ErrorCode::InvalidArgument, "fermi_energy must be positive");
  if (!(fermi_momentum > 0.0) || !std::isfinite(fermi_momentum))
    fail(ErrorCode::InvalidArgument, "fermi_momentum must be positive");
  if (!(q0 >= 0.0) || !(q0 < 0.1 * fermi_momentum))
    fail(ErrorCode::InvalidArgument, "q0 must satisfy 0 <= q0 << k_F (q0 < 0.1 k_F)");
}

ModelParams ModelParams::in_delta_c_units() const {
  ModelParams out = *this;
  out.g0 = g0 / delta_c;
  out.fermi_energy = fermi_energy / delta_c;
  out.delta_c = 1.0;
  return out;
}

LifetimeModel in_delta_c_units(const LifetimeModel& lt, double delta_c) {
  if (const auto* c = std::get_if<ConstantLifetime>(&lt))
    return ConstantLifetime{c->inverse_tau / delta_c};
  return lt;
}

void validate(const LifetimeModel& lt) {
  if (const auto* c = std::get_if<ConstantLifetime>(&lt)) {
    if (!(c->inverse_tau > 0.0) || !std::isfinite(c->inverse_tau))
      fail(ErrorCode::InvalidArgument, "constant inverse lifetime must be positive");
  }
}

Dispersion Dispersion::quadratic_2d(double fermi_energy, double fermi_momentum) {
  return {[=](double k) { return fermi_energy * (k * k / (fermi_momentum * fermi_momentum) - 1.0); }};
}

void validate(const InitialPhotonState& state) {
  if (const auto* f = std::get_if<Fock>(&state)) {
    if (f->n < 0) fail(ErrorCode::InvalidArgument, "Fock photon number must be non-negative");
  } else if (const auto* th = std::get_if<Thermal>(&state)) {
    if (th->beta && (!(*th->beta > 0.0) || !std::isfinite(*th->beta)))
      fail(ErrorCode::InvalidArgument, "thermal beta must be positive and finite");
  } else if (const auto* mix = std::get_if<DiagonalMixture>(&state)) {
    if (mix->weights.empty()) fail(ErrorCode::InvalidArgument, "mixture has no weights");
    double sum = 0.0;
    for (auto [n, w] : mix->weights) {
      if (n < 0) fail(ErrorCode::InvalidArgument, "mixture photon number must be non-negative");
      if (!(w >= 0.0) || !std::isfinite(w))
        fail(ErrorCode::InvalidArgument, "mixture weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      fail(ErrorCode::InvalidArgument, "mixture weights must sum to 1 (got " + shortest(sum) + ")");
  }
}

std::string to_string(const InitialPhotonState& state) {
  struct V {
    std::string operator()(const Vacuum&) const { return "vacuum"; }
    std::string operator()(const Fock& f) const { return "fock:" + std::to_string(f.n); }
    std::string operator()(const Thermal& t) const {
      return t.beta ? "thermal:beta=" + shortest(*t.beta) : "thermal";
    }
    std::string operator()(const DiagonalMixture& m) const {
      std::string s = "mix:{";
      bool first = true;
      for (auto [n, w] : m.weights) {
        if (!first) s += ',';
        first = false;
        s += std::to_string(n) + ':' + shortest(w);
      }
      return s + '}';
    }
  };
  return std::visit(V{}, state);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view s, std::string_view context) {
  s = trim(s);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    fail(ErrorCode::InvalidArgument, "bad number '" + std::string(s) + "' in state '" + std::string(context) + "'");
  return v;
}

}  // namespace

InitialPhotonState parse_state(std::string_view text) {
  const std::string_view s = trim(text);
  InitialPhotonState out;
  if (s == "vacuum") {
    out = Vacuum{};
  } else if (s == "thermal") {
    out = Thermal{};
  } else if (s.starts_with("thermal:beta=")) {
    out = Thermal{parse_number<double>(s.substr(13), s)};
  } else if (s.starts_with("fock:")) {
    out = Fock{parse_number<int>(s.substr(5), s)};
  } else if (s.starts_with("mix:{") && s.ends_with("}")) {
    DiagonalMixture mix;
    std::string_view body = s.substr(5, s.size() - 6);
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view item = body.substr(0, comma);
      const auto colon = item.find(':');
      if (colon == std::string_view::npos)
        fail(ErrorCode::InvalidArgument, "mixture entry '" + std::string(item) + "' needs n:weight");
      const int n = parse_number<int>(item.substr(0, colon), s);
      if (!mix.weights.emplace(n, parse_number<double>(item.substr(colon + 1), s)).second)
        fail(ErrorCode::InvalidArgument, "photon number " + std::to_string(n) + " repeated in '" + std::string(s) + "'");
      body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    }
    out = mix;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown photon state '" + std::string(s) + "'");
  }
  validate(out);
  return out;
}

std::vector<InitialPhotonState> parse_state_list(std::string_view text) {
  std::vector<InitialPhotonState> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '{') ++depth;
    if (i < text.size() && text[i] == '}') --depth;
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      out.push_back(parse_state(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

double boltzmann_factor(const Thermal& th, const ModelParams& p, std::optional<double> T) {
  double beta;
  if (th.beta) {
    beta = *th.beta;
  } else {
    if (!T || !(*T > 0.0))
      fail(ErrorCode::InvalidArgument, "thermal state without beta needs a positive temperature");
    beta = 1.0 / *T;
  }
  return std::exp(-beta * p.delta_c);
}

BoltzmannWeights boltzmann_weights(double x, double tail_tolerance) {
  if (!(x >= 0.0 && x < 1.0)) fail(ErrorCode::InvalidArgument, "Boltzmann factor must lie in [0,1)");
  BoltzmannWeights out;
  double xn = 1.0;
  // remaining mass after N terms is exactly x^N
  while (xn >= tail_tolerance) {
    out.weights.push_back((1.0 - x) * xn);
    xn *= x;
    if (out.weights.size() > 100000) fail(ErrorCode::Domain, "Boltzmann tail does not converge");
  }
  out.tail = xn;
  return out;
}

Complex fermion_gr(double k, double omega, const ModelParams& p, const LifetimeModel& lt, double T,
                   bool advanced, const Dispersion* dispersion) {
  const double eps = dispersion ? (*dispersion)(k) : Dispersion::quadratic_2d(p.fermi_energy, p.fermi_momentum)(k);
  const double g = lifetime_rate(lt, p, T);
  const Complex z = 1.0 / Complex(omega - eps, advanced ? -g : g);
  require_finite(z, "fermion_gr");
  return z;
}

Complex fermion_gk(double k, double omega, const ModelParams& p, const LifetimeModel& lt, double T,
                   const Dispersion* dispersion) {
  if (!(T > 0.0)) fail(ErrorCode::Domain, "fermion_gk needs T > 0");
  const double eps = dispersion ? (*dispersion)(k) : Dispersion::quadratic_2d(p.fermi_energy, p.fermi_momentum)(k);
  const double g = lifetime_rate(lt, p, T);
  const Complex num(0.0, -2.0 * g * std::tanh(omega / (2.0 * T)));
  const Complex z = num / (Complex(omega - eps, -g) * Complex(omega - eps, g));
  require_finite(z, "fermion_gk");
  return z;
}

Complex photon_dr(double omega, const ModelParams& p, double eta, bool advanced) {
  if (!(eta > 0.0)) fail(ErrorCode::InvalidArgument, "photon_dr needs eta > 0");
  const Complex w(omega, advanced ? -eta : eta);
  const Complex z = 1.0 / (2.0 * w * w - 2.0 * p.delta_c * p.delta_c);
  require_finite(z, "photon_dr");
  return z;
}

std::array<SpectralDelta, 2> photon_im_dr_weights(const ModelParams& p) {
  const double w = std::numbers::pi / (2.0 * p.delta_c);
  return {SpectralDelta{p.delta_c, -w}, SpectralDelta{-p.delta_c, w}};
}

double statistical_factor(const InitialPhotonState& state, const ModelParams& p, std::optional<double> T) {
  validate(state);
  if (std::holds_alternative<Vacuum>(state)) return 1.0;
  if (const auto* f = std::get_if<Fock>(&state)) return 1.0 + 2.0 * f->n;
  if (const auto* th = std::get_if<Thermal>(&state)) {
    const double x = boltzmann_factor(*th, p, T);
    return (1.0 + x) / (1.0 - x);
  }
  double s = 0.0;
  for (auto [n, w] : std::get<DiagonalMixture>(state).weights) s += w * (1.0 + 2.0 * n);
  return s;
}

Complex photon_dk_physical(double t, double t_prime, const ModelParams& p, const InitialPhotonState& state,
                           std::optional<double> T) {
  const double s = statistical_factor(state, p, T);
  return Complex(0.0, -s * std::cos(p.delta_c * (t - t_prime)) / (2.0 * p.delta_c));
}

bool CorrelationMatrix::is_hermitian(double tol) const {
  if (entries.size() != dim * dim) return false;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

Complex photon_gk_two_time(std::size_t s, std::size_t s_prime, double t, double t_prime,
                           const CorrelationMatrix& correlations, std::span<const double> mode_frequencies) {
  if (!correlations.is_hermitian())
    fail(ErrorCode::InvalidArgument, "photon correlation matrix must be Hermitian");
  if (s >= correlations.dim || s_prime >= correlations.dim || mode_frequencies.size() != correlations.dim)
    fail(ErrorCode::InvalidArgument, "mode index or frequency list does not match correlation matrix");
  const double phase = mode_frequencies[s] * t - mode_frequencies[s_prime] * t_prime;
  return Complex(0.0, -1.0) * (1.0 + 2.0 * correlations(s, s_prime)) * std::exp(Complex(0.0, -phase));
}

double mean_photon_number(const InitialPhotonState& state, const ModelParams& p, std::optional<double> T) {
  validate(state);
  if (std::holds_alternative<Vacuum>(state)) return 0.0;
  if (const auto* f = std::get_if<Fock>(&state)) return f->n;
  if (const auto* th = std::get_if<Thermal>(&state)) {
    const double x = boltzmann_factor(*th, p, T);
    return x / (1.0 - x);
  }
  double s = 0.0;
  for (auto [n, w] : std::get<DiagonalMixture>(state).weights) s += w * n;
  return s;
}

}  // namespace chsbs
