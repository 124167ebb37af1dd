#pragma once

#include <random>

#include "chsbs/useries.hpp"

namespace testgen {

inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed1234u);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

// p/q with small integers, q > 0
inline chsbs::BigRational rational(int num_lo, int num_hi, int den_max = 17) {
  return chsbs::BigRational(integer(num_lo, num_hi)) / chsbs::BigRational(integer(1, den_max));
}

// rational strictly inside (lo, hi) built from a random fraction k/d
inline chsbs::BigRational rational_in(const chsbs::BigRational& lo, const chsbs::BigRational& hi, int den_max = 97) {
  const int d = integer(2, den_max);
  const int k = integer(1, d - 1);
  return lo + (hi - lo) * chsbs::BigRational(k) / chsbs::BigRational(d);
}

inline chsbs::Polynomial polynomial(int max_degree) {
  std::vector<chsbs::BigRational> c(integer(0, max_degree) + 1);
  for (auto& x : c) x = rational(-9, 9);
  return chsbs::Polynomial(c);
}

// random rational function with non-vanishing denominator at u = 0
inline chsbs::RationalFunction rational_function(int max_degree = 3) {
  chsbs::Polynomial den = polynomial(max_degree);
  while (den.is_zero() || den.coefficient(0) == 0) den = polynomial(max_degree);
  return {polynomial(max_degree), den};
}

}  // namespace testgen
