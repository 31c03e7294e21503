#include "fputlab/expression.hpp"
#include "fputlab/normalform.hpp"

namespace fputlab::nf {

using sym::BiPoly;
using sym::BiSeries;
using sym::DiffPoly;
using sym::HSeries;

BiSeries riemannFieldSeries(const FPUTParameters& p, bool swapped) {
  const BiPoly U(DiffPoly::u()), V = BiPoly::v();
  const BiPoly z = U + V;
  const BiPoly z2 = z * z, z3 = z2 * z, z4 = z3 * z;
  auto scaled = [](const Scalar& c, const BiPoly& q) { return BiPoly(c) * q; };

  BiSeries inner(swapped ? V : U);
  inner += BiSeries::monomial(2, scaled(Rational(1, 8), z2));
  inner += BiSeries::monomial(4, scaled(Rational(1, 32) * p.beta * sym::invert(sym::power(p.alpha, 2)), z3));
  inner += BiSeries::monomial(6, scaled(Rational(1, 128) * p.gamma * sym::invert(sym::power(p.alpha, 3)), z4));

  // D_h = d/dx + h^2/24 d^3 + h^4/1920 d^5 + h^6/322560 d^7
  BiSeries out = sym::dx(inner);
  out += BiSeries::monomial(2, BiPoly(Rational(1, 24))) * sym::dx(inner, 3);
  out += BiSeries::monomial(4, BiPoly(Rational(1, 1920))) * sym::dx(inner, 5);
  out += BiSeries::monomial(6, BiPoly(Rational(1, 322560))) * sym::dx(inner, 7);
  return out;
}

SlavingResult slavingSymbolic(const FPUTParameters& p) {
  if (p.alpha.isZero()) throw std::invalid_argument("slavingSymbolic: alpha must be nonzero");
  const BiSeries forward = riemannFieldSeries(p, false);
  const BiSeries backward = riemannFieldSeries(p, true);

  // c'(U) F(U, c) + F(c, U); the unknown c_k enters order k as 2 dx(c_k).
  auto residual = [&](const HSeries& c) {
    return sym::gateaux(c, sym::compose(forward, c)) + sym::compose(backward, c);
  };

  SlavingResult out;
  for (int k : {2, 4}) {
    const DiffPoly res = residual(out.c)[k];
    if (!sym::average(res).isZero())
      throw VerificationError("slaving: order " + std::to_string(k) + " residual has nonzero average");
    const DiffPoly ck = sym::antiderivative(res * Rational(-1, 2));
    if (!sym::average(ck).isZero()) throw VerificationError("slaving: gauge violated at order " + std::to_string(k));
    out.c[k] = ck;
  }
  out.residual = residual(out.c);
  for (int k : {0, 2, 4})
    if (!out.residual[k].isZero())
      throw VerificationError("slaving: invariance residual nonzero at order " + std::to_string(k) + ": " +
                              sym::print(out.residual[k]));
  out.field = sym::compose(forward, out.c);
  return out;
}

}  // namespace fputlab::nf
