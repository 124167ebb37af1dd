#include "chsbs/useries.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include "chsbs/error.hpp"

namespace chsbs {

BigRational exact_rational(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "cannot convert a non-finite value to a rational");
  if (x == 0.0) return BigRational(0);
  int e = 0;
  const double m = std::frexp(x, &e);
  const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  e -= 53;
  BigRational r(mant);
  const BigInteger pow2 = BigInteger(1) << std::abs(e);
  if (e >= 0) return r * BigRational(pow2);
  return r / BigRational(pow2);
}

double to_double(const BigRational& x) { return x.convert_to<double>(); }

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<BigRational> coefficients) : c_(std::move(coefficients)) { trim(); }

Polynomial Polynomial::constant(const BigRational& c) { return Polynomial(std::vector<BigRational>{c}); }

Polynomial Polynomial::monomial(const BigRational& c, std::size_t degree) {
  std::vector<BigRational> v(degree + 1);
  v[degree] = c;
  return Polynomial(std::move(v));
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigRational Polynomial::coefficient(std::size_t i) const { return i < c_.size() ? c_[i] : BigRational(0); }

BigRational Polynomial::operator()(const BigRational& u) const {
  BigRational acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double Polynomial::evaluate(double u) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * u + to_double(*it);
  return acc;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<BigRational> v(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coefficient(i) + b.coefficient(i);
  return Polynomial(std::move(v));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigRational> v(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(v));
}

Polynomial operator*(const BigRational& s, const Polynomial& a) {
  Polynomial r = a;
  for (auto& c : r.c_) c *= s;
  r.trim();
  return r;
}

std::pair<Polynomial, Polynomial> Polynomial::divide(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) fail(ErrorCode::Singular, "polynomial division by zero");
  Polynomial rem = a;
  if (a.degree() < b.degree()) return {Polynomial{}, rem};
  std::vector<BigRational> q(a.degree() - b.degree() + 1);
  while (!rem.is_zero() && rem.degree() >= b.degree()) {
    const std::size_t shift = rem.degree() - b.degree();
    const BigRational factor = rem.leading() / b.leading();
    q[shift] = factor;
    rem = rem - Polynomial::monomial(factor, shift) * b;
  }
  return {Polynomial(std::move(q)), rem};
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  return BigRational(1) / leading() * *this;
}

std::string Polynomial::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << '(' << c_[i] << ')';
    if (i == 1) os << "*u";
    if (i > 1) os << "*u^" << i;
  }
  return os.str();
}

Polynomial gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    auto r = Polynomial::divide(a, b).second;
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

// ---------------------------------------------------------- RationalFunction

RationalFunction::RationalFunction(const BigRational& c)
    : num_(Polynomial::constant(c)), den_(Polynomial::constant(1)) {}

RationalFunction::RationalFunction(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  normalize();
}

RationalFunction RationalFunction::variable() { return {Polynomial{0, 1}, Polynomial{1}}; }

void RationalFunction::normalize() {
  if (den_.is_zero()) fail(ErrorCode::Singular, "rational function with zero denominator");
  if (num_.is_zero()) {
    den_ = Polynomial::constant(1);
    return;
  }
  const Polynomial g = gcd(num_, den_);
  if (g.degree() > 0) {
    num_ = Polynomial::divide(num_, g).first;
    den_ = Polynomial::divide(den_, g).first;
  }
  const BigRational lead = den_.leading();
  num_ = BigRational(1) / lead * num_;
  den_ = BigRational(1) / lead * den_;
}

BigRational RationalFunction::operator()(const BigRational& u) const {
  const BigRational d = den_(u);
  if (d == 0) fail(ErrorCode::Singular, "rational function evaluated at a pole");
  return num_(u) / d;
}

double RationalFunction::evaluate(double u) const { return num_.evaluate(u) / den_.evaluate(u); }

RationalFunction RationalFunction::operator-() const { return {-num_, den_}; }

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) fail(ErrorCode::Singular, "division by the zero rational function");
  return {a.num_ * b.den_, a.den_ * b.num_};
}

std::string RationalFunction::str() const { return "[" + num_.str() + "] / [" + den_.str() + "]"; }

RationalFunction rf_add(const RationalFunction& a, const RationalFunction& b) { return a + b; }
RationalFunction rf_mul(const RationalFunction& a, const RationalFunction& b) { return a * b; }
RationalFunction rf_div(const RationalFunction& a, const RationalFunction& b) { return a / b; }

// ------------------------------------------------------------------- series

SeriesCoefficients taylor(const RationalFunction& rf, std::size_t order, std::size_t cap) {
  if (order > cap)
    fail(ErrorCode::InvalidArgument,
         "series order " + std::to_string(order) + " exceeds cap " + std::to_string(cap));
  const auto& den = rf.denominator().coefficients();
  const BigRational d0 = rf.denominator().coefficient(0);
  if (d0 == 0) fail(ErrorCode::Singular, "rational function has a pole at u = 0");
  SeriesCoefficients c(order + 1);
  for (std::size_t k = 0; k <= order; ++k) {
    BigRational acc = rf.numerator().coefficient(k);
    const std::size_t jmax = std::min(k, den.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) acc -= den[j] * c[k - j];
    c[k] = acc / d0;
  }
  return c;
}

RationalFunction f_factor(int power) {
  if (power < 1) fail(ErrorCode::InvalidArgument, "f_factor needs power >= 1");
  Polynomial num{1}, den{1};
  for (int i = 0; i < power; ++i) {
    num = num * Polynomial{1, 1};
    den = den * Polynomial{1, -1};
  }
  return {num, den};
}

BigRational perturbative_weight(int p, int n) {
  if (p < 0 || n < 0) fail(ErrorCode::InvalidArgument, "perturbative_weight needs p, n >= 0");
  Polynomial num{1}, den{1, -1};
  for (int i = 0; i < p; ++i) {
    num = num * Polynomial{1, 1};
    den = den * Polynomial{1, -1};
  }
  return taylor(RationalFunction(num, den), static_cast<std::size_t>(n), std::max<std::size_t>(n, kDefaultSeriesOrderCap))[n];
}

namespace {

template <class W>
void check_weight_indices(const std::map<int, W>& weights, std::size_t order) {
  if (weights.empty()) fail(ErrorCode::InvalidArgument, "empty weight map");
  if (weights.begin()->first < 0) fail(ErrorCode::InvalidArgument, "negative photon number in weights");
  if (static_cast<std::size_t>(weights.rbegin()->first) > order)
    fail(ErrorCode::InvalidArgument, "weight index " + std::to_string(weights.rbegin()->first) +
                                         " exceeds computed order " + std::to_string(order));
}

}  // namespace

BigRational apply_L_mixture(const RationalFunction& rf, const std::map<int, BigRational>& weights,
                            std::size_t order) {
  check_weight_indices(weights, order);
  BigRational sum(0);
  for (const auto& [n, w] : weights) {
    if (w < 0) fail(ErrorCode::InvalidArgument, "negative mixture weight");
    sum += w;
  }
  if (sum != 1) fail(ErrorCode::InvalidArgument, "mixture weights must sum to exactly 1");
  const auto c = taylor(rf, order, std::max(order, kDefaultSeriesOrderCap));
  BigRational acc(0);
  for (const auto& [n, w] : weights) acc += w * c[n];
  return acc;
}

double apply_L_mixture(const RationalFunction& rf, const std::map<int, double>& weights, std::size_t order) {
  check_weight_indices(weights, order);
  double sum = 0.0;
  for (const auto& [n, w] : weights) {
    if (!(w >= 0.0)) fail(ErrorCode::InvalidArgument, "negative mixture weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "mixture weights must sum to 1");
  const auto c = taylor(rf, order, std::max(order, kDefaultSeriesOrderCap));
  double acc = 0.0;
  for (const auto& [n, w] : weights) acc += w * to_double(c[n]);
  return acc;
}

BigInteger binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  BigInteger r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace chsbs
