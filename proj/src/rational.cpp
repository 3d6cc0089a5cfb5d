#include "odeq/rational.hpp"

#include <numeric>

namespace odeq {

namespace {

using i128 = __int128;

std::int64_t check_narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw std::overflow_error("rational overflow");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num_ = g ? n / g : n;
  den_ = g ? d / g : d;
}

Rational Rational::operator+(const Rational& o) const {
  const i128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
  const i128 d = i128(den_) * o.den_;
  i128 x = n < 0 ? -n : n, y = d;
  while (y != 0) {
    const i128 t = x % y;
    x = y;
    y = t;
  }
  const i128 g = x == 0 ? 1 : x;
  return Rational(check_narrow(n / g), check_narrow(d / g));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  const Rational a(num_, o.den_);
  const Rational b(o.num_, den_);
  const i128 n = i128(a.num_) * b.num_;
  const i128 d = i128(a.den_) * b.den_;
  return Rational(check_narrow(n), check_narrow(d));
}

Rational Rational::operator/(const Rational& o) const {
  return *this * o.reciprocal();
}

Rational Rational::reciprocal() const {
  if (num_ == 0) throw std::domain_error("reciprocal of zero");
  return Rational(den_, num_);
}

Rational Rational::pow(std::int64_t e) const {
  if (e < 0) return reciprocal().pow(-e);
  Rational acc(1);
  Rational base = *this;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    base = e > 1 ? base * base : base;
    e >>= 1;
  }
  return acc;
}

bool Rational::operator<(const Rational& o) const {
  return i128(num_) * o.den_ < i128(o.num_) * den_;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace odeq
