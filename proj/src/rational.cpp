#include "fputlab/rational.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <stdexcept>

namespace fputlab {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

Rational Rational::parseDecimal(std::string_view text) {
  if (text.find('/') != std::string_view::npos) return parse(text);
  auto bad = [&] { return std::invalid_argument("malformed decimal: '" + std::string(text) + "'"); };
  std::string_view body = text;
  long exponent = 0;
  if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
    const std::string_view ex = body.substr(e + 1);
    std::string digitsOnly(ex);
    if (!digitsOnly.empty() && (digitsOnly[0] == '-' || digitsOnly[0] == '+')) digitsOnly.erase(0, 1);
    if (digitsOnly.empty() || digitsOnly.size() > 6 ||
        !std::all_of(digitsOnly.begin(), digitsOnly.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw bad();
    exponent = std::stol(std::string(ex));
    body = body.substr(0, e);
  }
  std::string mantissa(body);
  long scale = 0;
  if (auto dot = mantissa.find('.'); dot != std::string::npos) {
    scale = static_cast<long>(mantissa.size() - dot - 1);
    mantissa.erase(dot, 1);
    if (mantissa.empty() || mantissa == "-" || mantissa == "+") throw bad();
  }
  Rational q;
  try {
    q = parse(mantissa);
  } catch (const std::invalid_argument&) {
    throw bad();
  }
  mpz_class ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent - scale)));
  mpq_class f(ten);
  return exponent - scale >= 0 ? q * Rational(f) : q / Rational(f);
}

Rational Rational::parse(std::string_view text) {
  auto digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!digits(num) || !digits(den))
    throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
  mpz_class n(std::string(num), 10), d(std::string(den), 10);
  if (d == 0) throw std::invalid_argument("malformed rational (zero denominator): '" + std::string(text) + "'");
  mpq_class q(n, d);
  q.canonicalize();
  if (negative) q = -q;
  return Rational(q);
}

std::string Rational::str() const { return v_.get_str(); }

bool Rational::isInteger() const { return v_.get_den() == 1; }

Rational Rational::abs() const { return Rational(mpq_class(::abs(v_))); }

Rational Rational::inverse() const {
  if (isZero()) throw std::domain_error("Rational: inverse of zero");
  return Rational(mpq_class(1 / v_));
}

Rational& Rational::operator+=(const Rational& o) {
  v_ += o.v_;
  return *this;
}
Rational& Rational::operator-=(const Rational& o) {
  v_ -= o.v_;
  return *this;
}
Rational& Rational::operator*=(const Rational& o) {
  v_ *= o.v_;
  return *this;
}
Rational& Rational::operator/=(const Rational& o) {
  if (o.isZero()) throw std::domain_error("Rational: division by zero");
  v_ /= o.v_;
  return *this;
}
Rational Rational::operator-() const { return Rational(mpq_class(-v_)); }

Rational pow(const Rational& base, int exponent) {
  Rational b = exponent < 0 ? base.inverse() : base;
  unsigned e = exponent < 0 ? static_cast<unsigned>(-exponent) : static_cast<unsigned>(exponent);
  Rational result = 1;
  while (e) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace fputlab
