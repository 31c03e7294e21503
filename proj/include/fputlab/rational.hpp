#pragma once

#include <gmpxx.h>

#include <concepts>
#include <iosfwd>
#include <string>
#include <string_view>

namespace fputlab {

// Arbitrary-precision rational number. Thin value wrapper over GMP's mpq_class
// that keeps the GMP headers' expression templates out of calling code.
class Rational {
 public:
  Rational() = default;
  template <std::integral I>
  Rational(I n) : v_(static_cast<long>(n)) {}  // NOLINT(implicit)
  Rational(long num, long den);
  explicit Rational(mpq_class v);

  // Accepts "p", "-p", "p/q"; throws std::invalid_argument on anything else
  // or on a zero denominator.
  static Rational parse(std::string_view text);
  // Also accepts exact decimals "-0.125", "2.5e-3"; "0.1" is 1/10, not the
  // nearest double.
  static Rational parseDecimal(std::string_view text);

  const mpq_class& value() const { return v_; }
  std::string str() const;  // "p" or "p/q"
  double toDouble() const { return v_.get_d(); }

  bool isZero() const { return sgn(v_) == 0; }
  bool isOne() const { return v_ == 1; }
  bool isInteger() const;
  int sign() const { return sgn(v_); }
  Rational abs() const;
  Rational inverse() const;  // throws std::domain_error on zero

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);
  Rational operator-() const;

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

 private:
  mpq_class v_;
};

Rational pow(const Rational& base, int exponent);
std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace fputlab
