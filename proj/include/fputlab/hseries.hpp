#pragma once

// Even power series in the lattice spacing h, truncated at h^8:
//   S = s0 + h^2 s2 + h^4 s4 + h^6 s6 + O(h^8),
// with differential-polynomial coefficients.  BiSeries is the same for
// polynomials in two fields (U, V), stored as polynomials in the V-derivatives
// with DiffPoly(U) coefficients; compose() substitutes a series for V.

#include <array>
#include <map>
#include <string>

#include "fputlab/diffpoly.hpp"

namespace fputlab::sym {

class HSeries {
 public:
  static constexpr int kTruncation = 8;
  static constexpr int kTerms = kTruncation / 2;

  HSeries() = default;
  HSeries(DiffPoly c0);  // NOLINT(implicit)
  static HSeries monomial(int exponent, DiffPoly c);

  // exponent in {0, 2, 4, 6}; anything else throws std::out_of_range.
  DiffPoly& operator[](int exponent);
  const DiffPoly& operator[](int exponent) const;

  bool isZero() const;
  HSeries truncated(int maxExponent) const;  // drops exponents > maxExponent

  HSeries& operator+=(const HSeries& o);
  HSeries& operator-=(const HSeries& o);
  HSeries& operator*=(const Rational& c);
  HSeries operator-() const;
  friend HSeries operator+(HSeries a, const HSeries& b) { return a += b; }
  friend HSeries operator-(HSeries a, const HSeries& b) { return a -= b; }
  friend HSeries operator*(const HSeries& a, const HSeries& b);
  friend HSeries operator*(HSeries a, const Rational& c) { return a *= c; }
  friend bool operator==(const HSeries& a, const HSeries& b) { return a.c_ == b.c_; }

 private:
  std::array<DiffPoly, kTerms> c_;
};

HSeries dx(const HSeries& s);
HSeries dx(const HSeries& s, int times);
HSeries average(const HSeries& s);
HSeries antiderivative(const HSeries& s);
HSeries gateaux(const HSeries& f, const HSeries& g);
HSeries lieBracket(const HSeries& f, const HSeries& g);
HSeries substitute(const HSeries& s, const std::map<ParamId, Rational>& values);
std::string print(const HSeries& s);  // "h^0: ...\nh^2: ..." one line per order

// Polynomial in V_{kx} with DiffPoly(U) coefficients.
class BiPoly {
 public:
  BiPoly() = default;
  BiPoly(DiffPoly uPart);  // NOLINT(implicit)
  static BiPoly v(int order = 0);

  const std::map<Orders, DiffPoly>& terms() const { return t_; }
  bool isZero() const { return t_.empty(); }

  BiPoly& operator+=(const BiPoly& o);
  BiPoly& operator-=(const BiPoly& o);
  BiPoly& operator*=(const Rational& c);
  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b);
  friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.t_ == b.t_; }

  void add(const Orders& vOrders, const DiffPoly& coeff);

 private:
  std::map<Orders, DiffPoly> t_;  // V orders sorted descending -> U coefficient
};

BiPoly dx(const BiPoly& p);

class BiSeries {
 public:
  BiSeries() = default;
  BiSeries(BiPoly c0);  // NOLINT(implicit)
  static BiSeries monomial(int exponent, BiPoly c);
  BiPoly& operator[](int exponent);
  const BiPoly& operator[](int exponent) const;

  BiSeries& operator+=(const BiSeries& o);
  BiSeries& operator*=(const Rational& c);
  friend BiSeries operator+(BiSeries a, const BiSeries& b) { return a += b; }
  friend BiSeries operator*(const BiSeries& a, const BiSeries& b);
  friend BiSeries operator*(BiSeries a, const Rational& c) { return a *= c; }

 private:
  std::array<BiPoly, HSeries::kTerms> c_;
};

BiSeries dx(const BiSeries& s);
BiSeries dx(const BiSeries& s, int times);

// F(U, V := c) truncated at h^8.
HSeries compose(const BiSeries& f, const HSeries& c);

}  // namespace fputlab::sym
