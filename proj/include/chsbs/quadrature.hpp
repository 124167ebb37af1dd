#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "chsbs/model.hpp"

namespace chsbs {

struct QuadratureResult {
  Complex value{};
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_evaluations = 1'000'000;
  unsigned max_depth = 40;
};

// Adaptive Gauss-Kronrod (31 points); either limit may be infinite.
// Throws ErrorCode::Quadrature when the tolerance or the evaluation budget is not met.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

// Sum of integrals over consecutive breakpoints; the last breakpoint may be +inf.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     const std::vector<double>& breakpoints,
                                     const QuadratureOptions& opts = {});

// int_0^inf g(k) cos(k x) dk for g decaying at least like 1/k: half-period panels,
// partial sums accelerated with Wynn's epsilon algorithm.
QuadratureResult integrate_cosine_transform(const std::function<double(double)>& g, double x,
                                            const QuadratureOptions& opts = {});

// Limit estimate of a sequence of partial sums; *error gets the difference of the two
// most recent estimates.
double wynn_epsilon(const std::vector<double>& partial_sums, double* error = nullptr);

}  // namespace chsbs
