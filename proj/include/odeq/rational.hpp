#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace odeq {

/// Exact rational arithmetic on 64-bit integers. Values are always reduced
/// and the denominator is kept positive. Overflow in intermediate products
/// is detected via 128-bit arithmetic and reported, never wrapped.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }

  Rational operator-() const { return Rational(-num_, den_); }
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;

  /// Integer power; negative exponents invert (throws on zero base).
  Rational pow(std::int64_t e) const;
  Rational reciprocal() const;
  Rational abs() const { return num_ < 0 ? -*this : *this; }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;

  double as_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// "n" for integers, "n/d" otherwise.
  std::string str() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace odeq
