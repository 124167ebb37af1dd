#include "chsbs/sectors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "chsbs/critical.hpp"

namespace chsbs {

namespace {

struct Normalized {
  ModelParams p;
  LifetimeModel lt;
  double T;
  double gamma;  // tau^-1 / delta_c
};

Normalized normalize(const ModelParams& p, const LifetimeModel& lt, double T) {
  p.validate();
  validate(lt);
  if (!(T > 0.0)) fail(ErrorCode::Domain, "temperature must be positive");
  Normalized n{p.in_delta_c_units(), in_delta_c_units(lt, p.delta_c), T / p.delta_c, 0.0};
  n.gamma = inverse_lifetime(n.lt, n.p, n.T);
  if (!(n.gamma > 0.0)) fail(ErrorCode::Domain, "sector reduction needs a finite lifetime");
  return n;
}

}  // namespace

BcsKernelQuadrature bcs_kernel_quadrature(const ModelParams& p, const LifetimeModel& lt, double T, double tol) {
  const auto n = normalize(p, lt, T);
  const double g = n.gamma, t = n.T;
  // Folded onto omega > 0 (the integrand is even); the D_A pole at omega = delta_c
  // becomes a principal value, handled by subtraction on [0, 2].
  auto h = [g, t](double w) { return std::tanh(w / (2.0 * t)) * w / ((w * w + g * g) * (w * w + g * g) * (w + 1.0)); };
  const double h1 = h(1.0);
  auto subtracted = [&](double w) { return (h(w) - h1) / (w - 1.0); };
  auto plain = [&](double w) { return h(w) / (w - 1.0); };

  std::vector<double> cuts{0.0, g, 10.0 * g, 1.0, 2.0, 50.0};
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(std::numeric_limits<double>::infinity());

  QuadratureOptions q;
  q.rel_tol = tol;
  q.max_evaluations = 1'000'000 / (cuts.size() - 1);
  // pieces run concurrently; the sum is taken in interval order
  std::vector<std::future<QuadratureResult>> parts;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= 2.0) parts.push_back(std::async(std::launch::async, [=] { return integrate(subtracted, a, b, q); }));
    else parts.push_back(std::async(std::launch::async, [=] { return integrate(plain, a, b, q); }));
  }
  QuadratureResult pv;
  for (auto& f : parts) {
    const auto r = f.get();
    pv.value += r.value;
    pv.error_estimate += r.error_estimate;
    pv.evaluations += r.evaluations;
  }

  BcsKernelQuadrature out;
  out.delta_c_tau = 1.0 / g;
  const double pole = g * g * std::tanh(1.0 / (2.0 * t)) / ((1.0 + g * g) * (1.0 + g * g));
  const double bracket = 2.0 * g / std::numbers::pi * pv.value.real() - pole;
  out.integral.value = Complex(0.0, bracket);
  out.integral.error_estimate = 2.0 * g / std::numbers::pi * pv.error_estimate;
  out.integral.evaluations = pv.evaluations;
  out.analytic = Complex(0.0, -1.0 / (4.0 * t));
  out.ratio = (out.integral.value / out.analytic).real();
  return out;
}

ConvergenceStudy bcs_convergence_study(const ModelParams& p, double T, const std::vector<double>& delta_c_tau,
                                       double tol) {
  if (delta_c_tau.size() < 2) fail(ErrorCode::InvalidArgument, "convergence study needs two or more lifetimes");
  ConvergenceStudy s;
  std::vector<double> x, y;
  for (double dt : delta_c_tau) {
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "delta_c tau must be positive");
    const auto q = bcs_kernel_quadrature(p, ConstantLifetime{p.delta_c / dt}, T, tol);
    s.delta_c_tau.push_back(dt);
    s.deviation.push_back(std::abs(q.ratio - 1.0));
    x.push_back(std::log(dt));
    y.push_back(std::log(s.deviation.back()));
  }
  const auto fit = linear_fit(x, y);
  s.slope = fit.slope;
  s.r_squared = fit.r_squared;
  return s;
}

OffshellCancellation offshell_bcs_cancellation(const ModelParams& p, const LifetimeModel& lt, double T) {
  const auto n = normalize(p, lt, T);
  const double gt = n.p.gtilde();
  auto D = [](Complex z) { return 1.0 / (2.0 * z * z - 2.0); };
  const double D0 = -0.5;
  OffshellCancellation out;
  int i = 0;
  for (double s : {1.0, -1.0}) {
    for (double sigma : {1.0, -1.0}) {
      const Complex w1(0.0, sigma * n.gamma);
      out.terms[i++] = gt * std::tanh(w1 / (2.0 * n.T)) / w1 * D(w1 - s) / D0;
    }
  }
  double norm = 0.0;
  for (const auto& t : out.terms) {
    out.sum += t;
    norm += std::abs(t);
  }
  out.depth = std::abs(out.sum) / norm;
  out.relative_to_onshell = std::abs(out.sum) / (gt / n.T);
  return out;
}

double two_delta_c_sector_estimate(const ModelParams& p, const LifetimeModel& lt, double T) {
  const auto n = normalize(p, lt, T);
  return n.gamma * n.gamma / (4.0 + n.gamma * n.gamma);
}

std::string to_string(Sector s) {
  switch (s) {
    case OnShell: return "on-shell";
    case PlusDeltaC: return "+delta_c";
    case MinusDeltaC: return "-delta_c";
  }
  return "?";
}

SectorSystem build_sector_system(const KernelScalars<BigRational>& k, const BigRational& gtilde,
                                 const SectorOptions& opts) {
  if (k.w != 8 * k.c2) fail(ErrorCode::InvalidArgument, "sector system needs the physical hierarchy weight");
  if (gtilde <= 0) fail(ErrorCode::InvalidArgument, "sector system needs gtilde > 0");
  SectorSystem sys;
  const RationalFunction f = opts.zero_keldysh ? RationalFunction(1) : f_factor(1);
  sys.kernel[OnShell][OnShell] = {RationalFunction(k.a_bcs), false};
  if (!opts.zero_resonant) {
    for (int s : {PlusDeltaC, MinusDeltaC}) {
      sys.kernel[OnShell][s] = {RationalFunction(-gtilde) * f, true};
      sys.kernel[s][OnShell] = {RationalFunction(-k.c2 / gtilde) * f, true};
    }
  }
  sys.bare = {k.gamma0, BigRational(0), BigRational(0)};
  return sys;
}

SectorSystem build_sector_system(const ModelParams& p, const LifetimeModel& lt, double T, const SectorOptions& opts,
                                 const KernelOptions& kopts) {
  if (kopts.weight != HierarchyWeight::Physical)
    fail(ErrorCode::InvalidArgument, "sector system needs the physical hierarchy weight");
  const auto kd = kernel_scalars(p, lt, T, kopts);
  const auto k = exact_kernel(exact_rational(kd.gamma0), exact_rational(kd.a_bcs), exact_rational(kd.c2));
  auto sys = build_sector_system(k, exact_rational(p.gtilde()), opts);
  if (p.fermi_momentum > 0.0) {
    const double r = 1.0 + p.q0 / p.fermi_momentum;
    sys.q0_energy_shift = p.fermi_energy * (r * r - 1.0);
  }
  sys.q0_negligible = std::abs(sys.q0_energy_shift) < 0.1 * p.delta_c;
  return sys;
}

RationalFunction solve_sector_system(const SectorSystem& sys) {
  using Row = std::array<RationalFunction, 4>;
  std::array<Row, 3> m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = RationalFunction(i == j ? 1 : 0) - sys.kernel[i][j].value;
    m[i][3] = RationalFunction(sys.bare[i]);
  }
  const BigRational zero(0);
  for (int c = 0; c < 3; ++c) {
    // prefer a pivot that is nonzero at u = 0
    int piv = -1;
    for (int r = c; r < 3; ++r) {
      if (m[r][c].is_zero()) continue;
      if (piv < 0) piv = r;
      if (m[r][c].numerator()(zero) != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) fail(ErrorCode::Singular, "sector system is singular");
    std::swap(m[c], m[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c || m[r][c].is_zero()) continue;
      const RationalFunction factor = m[r][c] / m[c][c];
      for (int j = c; j < 4; ++j) m[r][j] = m[r][j] - factor * m[c][j];
    }
  }
  // rows were swapped; column OnShell now sits in row 0 after full elimination
  const RationalFunction out = m[OnShell][3] / m[OnShell][OnShell];
  if (out.denominator()(zero) == 0) fail(ErrorCode::Singular, "on-shell vertex has a pole at u = 0");
  return out;
}

double solve_sector_system_at(const SectorSystem& sys, double u) {
  std::array<std::array<double, 4>, 3> m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = (i == j ? 1.0 : 0.0) - sys.kernel[i][j].value.evaluate(u);
    m[i][3] = to_double(sys.bare[i]);
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) fail(ErrorCode::Singular, "sector system is singular at u = " + std::to_string(u));
    std::swap(m[c], m[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double factor = m[r][c] / m[c][c];
      for (int j = c; j < 4; ++j) m[r][j] -= factor * m[c][j];
    }
  }
  return m[OnShell][3] / m[OnShell][OnShell];
}

}  // namespace chsbs
