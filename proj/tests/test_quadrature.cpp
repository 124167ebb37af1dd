#include <cmath>
#include <numbers>

#include "chsbs/error.hpp"
#include "chsbs/quadrature.hpp"
#include "doctest.h"

using namespace chsbs;

TEST_CASE("Gauss-Kronrod on finite and infinite ranges") {
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 1.0).value.real() ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
  CHECK(integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, std::numeric_limits<double>::infinity())
            .value.real() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
  const auto pw = integrate_piecewise([](double x) { return std::abs(x - 1.0); }, {0.0, 1.0, 3.0});
  CHECK(pw.value.real() == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(pw.evaluations > 0);
}

TEST_CASE("quadrature budget is enforced") {
  QuadratureOptions o;
  o.max_evaluations = 10;
  try {
    integrate([](double x) { return std::sin(1.0 / (x + 1e-9)); }, 0.0, 1.0, o);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Quadrature);
  }
}

TEST_CASE("Wynn epsilon accelerates an alternating series") {
  std::vector<double> s;
  double acc = 0.0;
  for (int k = 1; k <= 20; ++k) {
    acc += (k % 2 ? 1.0 : -1.0) / k;
    s.push_back(acc);
  }
  double err = 0.0;
  const double v = wynn_epsilon(s, &err);
  CHECK(std::abs(acc - std::log(2.0)) > 1e-2);
  CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(err < 1e-10);
  CHECK(wynn_epsilon({1.0, 1.0, 1.0}) == 1.0);
}

TEST_CASE("cosine transform of a Lorentzian") {
  for (double x : {0.1, 1.0, 5.0, 20.0}) {
    const auto r = integrate_cosine_transform([](double k) { return 1.0 / (1.0 + k * k); }, x);
    CHECK(r.value.real() == doctest::Approx(std::numbers::pi / 2 * std::exp(-x)).epsilon(1e-8));
  }
  // slow 1/k decay: int_0^inf cos(kx)/sqrt(k^2+1) = K0(x)
  for (double x : {0.5, 3.0, 10.0}) {
    const auto r = integrate_cosine_transform([](double k) { return 1.0 / std::sqrt(k * k + 1.0); }, x);
    CHECK(r.value.real() == doctest::Approx(std::cyl_bessel_k(0.0, x)).epsilon(1e-7));
  }
  CHECK_THROWS_AS(integrate_cosine_transform([](double) { return 1.0; }, 0.0), Error);
}
