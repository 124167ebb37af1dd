#include "chsbs/error.hpp"
#include "chsbs/useries.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace chsbs;

namespace {

SeriesCoefficients ints(std::initializer_list<int> v) {
  SeriesCoefficients out;
  for (int x : v) out.emplace_back(x);
  return out;
}

const RationalFunction kU = RationalFunction::variable();
const RationalFunction kOne(1);

}  // namespace

TEST_CASE("rational arithmetic examples") {
  CHECK(rf_mul(kOne / (kOne - kU), kOne - kU) == kOne);
  const auto f = (kOne + kU) / (kOne - kU);
  const auto g = (kOne - kU) / (kOne + kU);
  const RationalFunction expected(Polynomial{2, 0, 2}, Polynomial{1, 0, -1});
  CHECK(rf_add(f, g) == expected);
  CHECK(rf_div(kOne, kOne) == kOne);
  CHECK_THROWS_AS(rf_div(kOne, RationalFunction()), Error);
}

TEST_CASE("rational functions are reduced with monic denominators") {
  const RationalFunction r(Polynomial{-2, 0, 2}, Polynomial{-3, 3});  // 2(u^2-1) / 3(u-1)
  CHECK(r.denominator() == Polynomial{1});
  CHECK(r.numerator() == Polynomial{BigRational(2, 3), BigRational(2, 3)});
}

TEST_CASE("taylor examples") {
  CHECK(taylor(kOne / (kOne - kU), 4) == ints({1, 1, 1, 1, 1}));
  CHECK(taylor(f_factor(2), 4) == ints({1, 4, 8, 12, 16}));
  CHECK(taylor(f_factor(1), 3) == ints({1, 2, 2, 2}));
  CHECK_THROWS_AS(taylor(kOne / kU, 3), Error);
  CHECK_THROWS_AS(taylor(kOne, 65), Error);
  CHECK(taylor(kOne / (kOne - kU), 80, 128).size() == 81);
}

TEST_CASE("f_factor") {
  CHECK(f_factor(1)(BigRational(0)) == 1);
  CHECK(f_factor(2).numerator() == Polynomial{1, 2, 1});
  CHECK(f_factor(2) == rf_mul(f_factor(1), f_factor(1)));
  CHECK_THROWS_AS(f_factor(0), Error);
}

TEST_CASE("perturbative_weight examples") {
  for (int n = 0; n < 10; ++n) CHECK(perturbative_weight(0, n) == 1);
  CHECK(perturbative_weight(1, 1) == 3);
  CHECK(perturbative_weight(1, 2) == 5);
}

TEST_CASE("perturbative_weight matches the binomial sum") {
  for (int p = 0; p <= 8; ++p)
    for (int n = 0; n <= 20; ++n) {
      BigInteger s = 0;
      for (int j = 0; j <= std::min(p, n); ++j) s += binomial(p, j) * binomial(n - j + p, p);
      CHECK(perturbative_weight(p, n) == BigRational(s));
    }
}

TEST_CASE("apply_L_mixture examples") {
  CHECK(apply_L_mixture(kOne / (kOne - kU), std::map<int, BigRational>{{0, 1}}, 4) == 1);
  CHECK(apply_L_mixture(f_factor(2), std::map<int, BigRational>{{0, BigRational(1, 2)}, {1, BigRational(1, 2)}}, 4) ==
        BigRational(5, 2));
  CHECK_THROWS_AS(apply_L_mixture(f_factor(2), std::map<int, BigRational>{{5, 1}}, 4), Error);
  CHECK_THROWS_AS(apply_L_mixture(f_factor(2), std::map<int, double>{{0, 0.6}, {1, 0.6}}, 4), Error);
}

TEST_CASE("Boltzmann weights on f^2/(1-u) reproduce the closed thermal form") {
  // sum_n (1-x) x^n [u^n] g(u)/(1-u) = g(x) for g analytic on |u| <= x
  const RationalFunction h = f_factor(2) / (kOne - kU);
  for (double x : {0.1, 0.25, 1.0 / 3.0, 0.5}) {
    std::map<int, double> w;
    double xn = 1.0, mass = 0.0;
    int n = 0;
    while (xn > 1e-17) {
      w[n++] = (1.0 - x) * xn;
      mass += (1.0 - x) * xn;
      xn *= x;
    }
    w[0] += 1.0 - mass;  // fold the tail into n = 0 so the weights are normalized
    const double lhs = apply_L_mixture(h, w, n);
    const double fx = (1.0 + x) / (1.0 - x);
    CHECK(lhs == doctest::Approx(fx * fx).epsilon(1e-10));
  }
}

TEST_CASE("field axioms hold exactly on random triples") {
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = testgen::rational_function(), b = testgen::rational_function(), c = testgen::rational_function();
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK(a - a == RationalFunction());
    if (!b.is_zero()) CHECK((a / b) * b == a);
  }
}

TEST_CASE("taylor of a product is the Cauchy convolution") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testgen::rational_function(), b = testgen::rational_function();
    const std::size_t order = static_cast<std::size_t>(testgen::integer(0, 32));
    const auto sa = taylor(a, order), sb = taylor(b, order), sab = taylor(rf_mul(a, b), order);
    for (std::size_t k = 0; k <= order; ++k) {
      BigRational conv = 0;
      for (std::size_t j = 0; j <= k; ++j) conv += sa[j] * sb[k - j];
      CHECK(sab[k] == conv);
    }
  }
}

TEST_CASE("scalar thermal identity holds exactly") {
  for (int trial = 0; trial < 50; ++trial) {
    const BigRational x = testgen::rational_in(0, 1);
    const BigRational lhs = 1 + 4 * x / ((1 - x) * (1 - x));
    const BigRational r = (1 + x) / (1 - x);
    CHECK(lhs == r * r);
  }
  const BigRational half(1, 2);
  CHECK(1 + 4 * half / ((1 - half) * (1 - half)) == 9);
}

TEST_CASE("exact conversion of doubles") {
  CHECK(exact_rational(0.5) == BigRational(1, 2));
  CHECK(exact_rational(-3.0) == -3);
  CHECK(to_double(exact_rational(0.1)) == 0.1);
  CHECK(exact_rational(0.1) != BigRational(1, 10));
  for (int i = 0; i < 100; ++i) {
    const double x = testgen::uniform(-1e6, 1e6) * std::pow(10.0, testgen::integer(-200, 200));
    CHECK(to_double(exact_rational(x)) == x);
  }
}
