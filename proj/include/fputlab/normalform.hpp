#pragma once

// Coefficient-level normal form of a KdV-type field
//   F = C1 U_x + h^2 C3 K3 + h^4 C5 (U_5x + A.basis5) + h^6 C7 (U_7x + B.basis7)
// by the near-identity generators G2 and G4.  Scalars are constant DiffPolys, so
// the same code runs with rational coefficients or with symbolic parameters
// (alpha, beta, gamma, A1.., B1.., C1..).  Every stage re-derives its result
// with the symbolic engine and throws VerificationError on a mismatch.

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "fputlab/diffpoly.hpp"
#include "fputlab/hseries.hpp"
#include "fputlab/linalg.hpp"

namespace fputlab::nf {

using Scalar = sym::DiffPoly;

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FPUTParameters {
  Scalar alpha, beta, gamma;

  static FPUTParameters symbolic();  // alpha, beta, gamma kept as parameters
  static FPUTParameters numeric(const Rational& alpha, const Rational& beta, const Rational& gamma);
  // Toda family: beta = 2 alpha^2 / 3, gamma = alpha^3 / 3.
  static FPUTParameters toda(const Scalar& alpha);
};

struct ModelCoefficients {
  std::array<Scalar, 4> A;
  std::array<Scalar, 20> B;
  std::array<Scalar, 4> C;  // C1, C3, C5, C7

  // C5^2 / (C3 C7)
  Scalar kappa() const;
};

// Coefficient of <U><U^2>U_x at order h^6.  The reduced field of the slaving
// relation has 105*6 = 630; the coefficient list printed with the theorem has 0.
enum class B18Choice { derived, asPrinted };

// Throws std::invalid_argument when alpha is zero.
ModelCoefficients fputToModel(const FPUTParameters& p, B18Choice b18 = B18Choice::derived);
// A1..A4, B1..B20, C1..C7 as free parameters.
ModelCoefficients symbolicModel();
ModelCoefficients substitute(const ModelCoefficients& m, const std::map<sym::ParamId, Rational>& values);

// Basis monomials: i = 1..4 for the order-h^4 part, i = 1..20 for order h^6.
const sym::DiffPoly& basis5(int i);
const sym::DiffPoly& basis7(int i);
// Generator pieces: G2 = (C5/C3) sum a_i g2Piece(i), G4 = (C7/C3) sum b_k g4Piece(k).
const sym::DiffPoly& g2Piece(int i);
const sym::DiffPoly& g4Piece(int k);

// F1, F3, F5, F7 for order = 1, 3, 5, 7.
sym::DiffPoly modelTerm(const ModelCoefficients& m, int order);
sym::HSeries modelField(const ModelCoefficients& m);
// Reads (A, B, C) back from a field; throws VerificationError if the field is
// not of the model form.
ModelCoefficients modelFromField(const sym::HSeries& f);

// Sum of coefficient * parameters over the terms of p whose x-dependent and
// average factors match `monomial` (a single term with coefficient 1).
Scalar coefficientOf(const sym::DiffPoly& p, const sym::DiffPoly& monomial);

struct FirstOrderResult {
  std::array<Scalar, 4> a;
  std::array<Scalar, 3> tildeA;  // A~4, A~5, A~6
  sym::DiffPoly G2;
  sym::DiffPoly N5;
};

FirstOrderResult solveFirstOrder(const ModelCoefficients& m);

struct R6Result {
  std::array<Scalar, 20> tildeB;
  sym::DiffPoly R6;
};

// Closed-form tilde-B, checked against 1/2 [G2, F5 + N5].
R6Result computeR6(const ModelCoefficients& m, const FirstOrderResult& f);

struct LinearSystem {
  RationalMatrix M;                // 20 x 13 as tabulated
  RationalMatrix bracketM;         // same matrix re-derived from [g4Piece(k), K3]
  std::vector<RationalVector> v;   // 7 tabulated left-kernel vectors
  std::size_t rankM = 0;
  std::size_t kernelDimension = 0; // 20 - rank M
  bool vAnnihilateM = false;       // v_i^T M = 0 for all i
  bool vIndependent = false;
  bool vSpanKernel = false;
  bool matchesBrackets = false;
  RationalMatrix square;           // [M | -dw/dlambda (no lambda4) | -e7]
  Rational squareDeterminant;
};

const LinearSystem& buildLinearSystem();

// w(lambda) with lambda = (lambda1..lambda7).
std::array<Scalar, 20> targetVector(const std::array<Scalar, 7>& lambda);

// r from the j = 7 solvability condition: r = -3 (B + kappa B~ - w) . v7.
Scalar obstruction(const ModelCoefficients& m);
// r with the coefficient list exactly as printed in the source formula; differs
// from obstruction() by -72 B3 + 27 B5.
Scalar obstructionAsPrinted(const ModelCoefficients& m);
// (B + kappa B~ - w(lambda)) . v_j for j = 1..7.
Scalar orthogonalityResidual(const ModelCoefficients& m, const std::array<Scalar, 20>& tildeB,
                             const std::array<Scalar, 7>& lambda, int j);

// Closed-form lambda1..lambda7 (lambda4 passed through).
std::array<Scalar, 7> lambdaFormulas(const ModelCoefficients& m, const Scalar& lambda4);

struct SecondOrderResult {
  std::array<Scalar, 20> tildeB;
  std::array<Scalar, 13> b;
  std::array<Scalar, 7> lambda;
  Scalar rho;  // coefficient of the residual monomial U^3 U_x inside C7(...)
  Scalar r;
  sym::DiffPoly R6;
  sym::DiffPoly G4;
  sym::DiffPoly N7;
};

SecondOrderResult solveSecondOrder(const ModelCoefficients& m, const FirstOrderResult& f, const Scalar& lambda4 = 0);

// C1(U,h)..C7(U,h) as h-series of pure-average expressions.
struct ConservedCoefficients {
  std::array<sym::HSeries, 4> C;
};

// Consistent with the normalized field: sum h^(i-1) Ci Ki + h^6 C7 (rho U^3 U_x
// + lambda7 <U_x^3>) equals F1 + h^2 F3 + h^4 N5 + h^6 N7 exactly (verified).
ConservedCoefficients conservedCoefficients(const ModelCoefficients& m, const FirstOrderResult& f,
                                            const SecondOrderResult& s);
// The product form C_i (1 + ...) with the same lambda and A~ values, as printed
// alongside the theorem; not verified.
ConservedCoefficients conservedCoefficientsProductForm(const ModelCoefficients& m, const FirstOrderResult& f,
                                                       const SecondOrderResult& s);
bool isPureAverage(const sym::HSeries& s);

// sum h^(i-1) Ci Ki + h^6 C7 rho U^3 U_x, plus h^6 C7 lambda7 <U_x^3> when
// includeDrift is set.
sym::HSeries normalizedField(const ConservedCoefficients& cc, const ModelCoefficients& m,
                             const SecondOrderResult& s, bool includeDrift);

// e^{h^4 [G4, .]} e^{h^2 [G2, .]} F truncated at h^8.
sym::HSeries transformField(const ModelCoefficients& m, const FirstOrderResult& f, const SecondOrderResult& s);

// ---- slaving relation ------------------------------------------------------------

// D_h[X + f(X + Y)] expanded through h^6, as a polynomial in (U, V); `swapped`
// gives the same with X = V, Y = U.
sym::BiSeries riemannFieldSeries(const FPUTParameters& p, bool swapped);

struct SlavingResult {
  sym::HSeries c;         // h^2 c2 + h^4 c4, zero-average gauge
  sym::HSeries field;     // reduced field F(U, c(U,h), h) through h^6
  sym::HSeries residual;  // c'(U) field + F(c, U); zero through h^4
};

SlavingResult slavingSymbolic(const FPUTParameters& p = FPUTParameters::symbolic());

}  // namespace fputlab::nf
