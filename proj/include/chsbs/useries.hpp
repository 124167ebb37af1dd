#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace chsbs {

using BigInteger = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Exact conversion of a finite double (every double is a dyadic rational).
BigRational exact_rational(double x);
double to_double(const BigRational& x);

// Dense polynomial in u over the rationals; coefficient i multiplies u^i.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<BigRational> coefficients);
  Polynomial(std::initializer_list<BigRational> coefficients)
      : Polynomial(std::vector<BigRational>(coefficients)) {}

  static Polynomial constant(const BigRational& c);
  static Polynomial monomial(const BigRational& c, std::size_t degree);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for the zero polynomial
  bool is_zero() const { return c_.empty(); }
  const std::vector<BigRational>& coefficients() const { return c_; }
  BigRational coefficient(std::size_t i) const;
  const BigRational& leading() const { return c_.back(); }

  BigRational operator()(const BigRational& u) const;
  double evaluate(double u) const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const BigRational& s, const Polynomial& a);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  // quotient, remainder
  static std::pair<Polynomial, Polynomial> divide(const Polynomial& a, const Polynomial& b);
  Polynomial monic() const;

  std::string str() const;

 private:
  void trim();
  std::vector<BigRational> c_;
};

Polynomial gcd(Polynomial a, Polynomial b);

// Ratio of polynomials, kept gcd-reduced with a monic denominator.
// Denominators must not vanish at u = 0: every expansion here is taken there.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(Polynomial::constant(1)) {}
  RationalFunction(const BigRational& c);  // NOLINT: constants embed implicitly
  RationalFunction(int c) : RationalFunction(BigRational(c)) {}  // NOLINT
  RationalFunction(Polynomial numerator, Polynomial denominator);

  static RationalFunction variable();

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  BigRational operator()(const BigRational& u) const;
  double evaluate(double u) const;

  RationalFunction operator-() const;
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string str() const;

 private:
  void normalize();
  Polynomial num_;
  Polynomial den_;
};

RationalFunction rf_add(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_mul(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_div(const RationalFunction& a, const RationalFunction& b);

using SeriesCoefficients = std::vector<BigRational>;

inline constexpr std::size_t kDefaultSeriesOrderCap = 64;

// Coefficients 0..order of the expansion at u = 0. Orders above `cap` are refused
// unless the caller raises the cap explicitly.
SeriesCoefficients taylor(const RationalFunction& rf, std::size_t order,
                          std::size_t cap = kDefaultSeriesOrderCap);

// ((1+u)/(1-u))^power
RationalFunction f_factor(int power);

// n-th coefficient of (1+u)^p / (1-u)^(p+1)
BigRational perturbative_weight(int p, int n);

// sum_n w_n [u^n] rf
BigRational apply_L_mixture(const RationalFunction& rf, const std::map<int, BigRational>& weights,
                            std::size_t order);
double apply_L_mixture(const RationalFunction& rf, const std::map<int, double>& weights,
                       std::size_t order);

BigInteger binomial(int n, int k);

}  // namespace chsbs
