#include "chsbs/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chsbs/error.hpp"

namespace chsbs {

namespace {

struct BudgetExceeded {};

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  QuadratureResult res;
  std::size_t count = 0;
  auto counted = [&](double x) {
    if (++count > opts.max_evaluations) throw BudgetExceeded{};
    return f(x);
  };
  double err = 0.0, l1 = 0.0;
  double value = 0.0;
  try {
    value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(counted, a, b, opts.max_depth,
                                                                         opts.rel_tol, &err, &l1);
  } catch (const BudgetExceeded&) {
    fail(ErrorCode::Quadrature, "quadrature did not converge within " + std::to_string(opts.max_evaluations) +
                                    " evaluations on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  if (!std::isfinite(value)) fail(ErrorCode::Quadrature, "quadrature produced a non-finite value");
  res.value = value;
  res.error_estimate = err;
  res.evaluations = count;
  const double allowed = std::max(opts.abs_tol, opts.rel_tol * l1);
  if (err > allowed && err > 0.0)
    fail(ErrorCode::Quadrature, "quadrature error estimate " + std::to_string(err) + " above tolerance " +
                                    std::to_string(allowed));
  return res;
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, const std::vector<double>& breakpoints,
                                     const QuadratureOptions& opts) {
  QuadratureResult total;
  QuadratureOptions local = opts;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    local.max_evaluations = opts.max_evaluations - std::min(opts.max_evaluations - 1, total.evaluations);
    const auto r = integrate(f, breakpoints[i], breakpoints[i + 1], local);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.evaluations += r.evaluations;
  }
  return total;
}

double wynn_epsilon(const std::vector<double>& s, double* error) {
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  if (n < 3) {
    if (error) *error = n == 2 ? std::abs(s[1] - s[0]) : std::numeric_limits<double>::infinity();
    return s.back();
  }
  // eps[k][j]: column k of the epsilon table; even columns hold estimates
  std::vector<std::vector<double>> eps(n + 1);
  eps[0].assign(n + 1, 0.0);  // eps_{-1}
  eps[1] = s;                 // eps_0
  double best = s.back(), prev_best = s[n - 2];
  for (std::size_t k = 2; k <= n; ++k) {
    const auto& a = eps[k - 2];
    const auto& b = eps[k - 1];
    eps[k].resize(b.size() - 1);
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      const double d = b[j + 1] - b[j];
      if (d == 0.0) {
        // a repeated entry: the sequence has already settled
        if (error) *error = std::abs(s[n - 1] - s[n - 2]);
        return s.back();
      }
      eps[k][j] = a[j + 1] + 1.0 / d;
    }
    if (k % 2 == 1 && !eps[k].empty()) {
      const std::size_t m = eps[k].size();
      prev_best = m >= 2 ? eps[k][m - 2] : best;
      best = eps[k][m - 1];
    }
  }
  if (error) *error = std::abs(best - prev_best);
  return best;
}

QuadratureResult integrate_cosine_transform(const std::function<double(double)>& g, double x,
                                            const QuadratureOptions& opts) {
  if (!(x > 0.0)) fail(ErrorCode::InvalidArgument, "cosine transform needs x > 0");
  const double half = std::numbers::pi / x;

  QuadratureOptions panel = opts;
  panel.rel_tol = std::min(opts.rel_tol, 1e-12);
  QuadratureResult res;
  std::vector<double> partial;
  double sum = 0.0, scale = 0.0, estimate = 0.0, est_err = 0.0;
  int stable = 0;
  constexpr int kMinPanels = 8, kMaxPanels = 400;
  for (int k = 0; k < kMaxPanels; ++k) {
    panel.max_evaluations = opts.max_evaluations - std::min(opts.max_evaluations - 1, res.evaluations);
    // panel k in the local variable s: the cosine becomes (-1)^k cos(pi s) without
    // evaluating cos at large arguments
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const auto r = integrate([&](double s) { return g((k + s) * half) * std::cos(std::numbers::pi * s); }, 0.0,
                             1.0, panel);
    const double term = sign * half * r.value.real();
    sum += term;
    scale = std::max(scale, std::abs(sum));
    // later panels only need to be accurate against the size of the running sum
    panel.abs_tol = std::max(opts.abs_tol, 1e-15 * scale) / half;
    res.evaluations += r.evaluations;
    res.error_estimate += half * r.error_estimate;
    partial.push_back(sum);
    if (partial.size() > 40) partial.erase(partial.begin());  // keep the table small and well conditioned
    if (k + 1 < kMinPanels) continue;
    const double prev = estimate;
    estimate = wynn_epsilon(partial, &est_err);
    // roundoff in the partial sums sets a floor once the transform is much smaller than them
    const double tol = std::max({opts.abs_tol, opts.rel_tol * std::abs(estimate), 64 * kEps * scale});
    if (est_err <= tol && std::abs(estimate - prev) <= tol) {
      if (++stable >= 2) {
        res.value = estimate;
        res.error_estimate += std::max(est_err, std::abs(estimate - prev));
        return res;
      }
    } else {
      stable = 0;
    }
  }
  fail(ErrorCode::Quadrature, "oscillatory transform did not converge (last extrapolation error " +
                                  std::to_string(est_err) + ")");
}

}  // namespace chsbs
