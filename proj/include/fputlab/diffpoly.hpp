#pragma once

// Differential polynomials in a periodic field U(x) on the unit circle.
//
// A term is  coeff * params * <a_1>...<a_r> * U_{k1 x}...U_{km x} * P(q_1)...P(q_s)
// where <a> is the spatial average of a local monomial a, and P(q) is the
// zero-mean antiderivative of (q - <q>).  Every DiffPoly is kept canonical:
//   * average atoms are reduced modulo total derivatives (integration by parts),
//     so two averages that are equal as functionals are stored identically;
//   * primitive atoms are reduced local monomials that are not total derivatives;
//   * like terms are merged and zero coefficients dropped.
// Scalar parameters (alpha, A1, lam3, ...) may appear with integer exponents of
// either sign, so model coefficients can stay symbolic.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fputlab/rational.hpp"

namespace fputlab::sym {

class SymbolicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a result would need a primitive of a primitive, a product of two
// primitives, or an average that cannot be reduced to local averages.
class NotRepresentable : public SymbolicError {
 public:
  using SymbolicError::SymbolicError;
};

// Raised when antiderivative() is called on an input with nonzero average.
class PreconditionError : public SymbolicError {
 public:
  using SymbolicError::SymbolicError;
};

// ---- scalar parameters -----------------------------------------------------

using ParamId = int;

// Known names: alpha beta gamma, A1-A4, B1-B20, C1 C3 C5 C7, a1-a4, b1-b13,
// lam1-lam7.  Ids follow that order, which is also the print order.
ParamId paramId(std::string_view name);  // throws SymbolicError for unknown names
std::optional<ParamId> findParam(std::string_view name);
const std::string& paramName(ParamId id);
int paramCount();

// ---- canonical factors -----------------------------------------------------

// Derivative orders of a local monomial, sorted descending: U U_x^2 -> {1,1,0}.
using Orders = std::vector<int>;

struct Factors {
  std::vector<std::pair<ParamId, int>> params;  // sorted by id, exponents != 0
  std::vector<Orders> averages;                 // sorted multiset of atoms
  Orders derivs;                                // sorted descending
  std::vector<Orders> primitives;               // sorted multiset of atoms

  // Number of U factors, counting those inside averages and primitives.
  int degree() const;
  // True when the term does not vary in x (no local or primitive factors).
  bool isConstant() const { return derivs.empty() && primitives.empty(); }
  bool operator==(const Factors&) const = default;
};

// Graded order: total degree, then derivative orders (descending tuple,
// compared lexicographically), then averages, primitives, parameters.
struct GradedOrder {
  bool operator()(const Factors& a, const Factors& b) const;
};

Factors multiply(const Factors& a, const Factors& b);

struct Monomial {
  Rational coeff;
  Factors factors;
};

class DiffPoly {
 public:
  using TermMap = std::map<Factors, Rational, GradedOrder>;

  DiffPoly() = default;
  DiffPoly(const Rational& c);  // NOLINT(implicit): numeric constant
  template <std::integral I>
  DiffPoly(I c) : DiffPoly(Rational(c)) {}  // NOLINT(implicit)

  static DiffPoly u(int order = 0);
  static DiffPoly param(ParamId id, int exponent = 1);
  static DiffPoly param(std::string_view name, int exponent = 1);
  static DiffPoly term(const Rational& coeff, Factors f);
  // Local monomial with the given orders (any order, sorted internally).
  static DiffPoly local(Orders orders);
  // Average of a local monomial, reduced.
  static DiffPoly averageOf(Orders orders);
  // Zero-mean primitive of (q - <q>) for a local monomial q, reduced.
  static DiffPoly primitiveOf(Orders orders);

  bool isZero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  // No local or primitive factors (parameters and averages allowed).
  bool isConstant() const;
  // A single numeric coefficient (or zero), no parameters or averages.
  std::optional<Rational> asRational() const;
  // Highest derivative order in local and atom factors, -1 if none.
  int maxOrder() const;
  bool hasPrimitives() const;
  bool hasParam(ParamId id) const;

  // Coefficient of a given factor set (zero if absent).
  Rational coeff(const Factors& f) const;

  DiffPoly& operator+=(const DiffPoly& o);
  DiffPoly& operator-=(const DiffPoly& o);
  DiffPoly& operator*=(const DiffPoly& o);
  DiffPoly& operator*=(const Rational& c);
  DiffPoly operator-() const;

  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(DiffPoly a, const Rational& c) { return a *= c; }
  friend DiffPoly operator*(const Rational& c, DiffPoly a) { return a *= c; }
  template <std::integral I>
  friend DiffPoly operator*(I c, DiffPoly a) { return a *= Rational(c); }
  template <std::integral I>
  friend DiffPoly operator*(DiffPoly a, I c) { return a *= Rational(c); }
  friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }

  // Add c * (monomial with factors f) without re-reducing atoms; f must already
  // be canonical.
  void addTerm(const Factors& f, const Rational& c);

 private:
  TermMap terms_;
};

// Inverse of a single-term constant without averages (coeff * params).
DiffPoly invert(const DiffPoly& p);
DiffPoly power(const DiffPoly& p, int exponent);

DiffPoly dx(const DiffPoly& p);
DiffPoly dx(const DiffPoly& p, int times);
DiffPoly average(const DiffPoly& p);
// S with dx(S) == p and <S> == 0.  Requires <p> == 0.
DiffPoly antiderivative(const DiffPoly& p);
// Zero-mean primitive of (p - <p>).
DiffPoly primitive(const DiffPoly& p);
// Directional derivative f'(U)[g].
DiffPoly gateaux(const DiffPoly& f, const DiffPoly& g);
// [f, g] = f'(U)[g] - g'(U)[f].
DiffPoly lieBracket(const DiffPoly& f, const DiffPoly& g);
// Re-reduces every atom and merges terms.  Identity on values built through the
// public API; exposed so callers can assert idempotence.
DiffPoly canonicalize(const DiffPoly& p);
// Substitute numeric values for parameters; unknown parameters stay symbolic.
DiffPoly substitute(const DiffPoly& p, const std::map<ParamId, Rational>& values);

// Local monomial m = dx(exact) + sum residual, every residual monomial
// irreducible (top derivative order repeated, or only order 0).
struct LocalReduction {
  DiffPoly exact;
  std::map<Orders, Rational> residual;
};
const LocalReduction& reduceLocal(const Orders& m);

}  // namespace fputlab::sym
