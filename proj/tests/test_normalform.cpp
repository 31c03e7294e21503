#include <cstdint>
#include <random>

#include "doctest.h"
#include "fputlab/expression.hpp"
#include "fputlab/hierarchy.hpp"
#include "fputlab/normalform.hpp"

using namespace fputlab;
using namespace fputlab::nf;
using sym::DiffPoly;
using sym::parse;

namespace {

DiffPoly P(const char* s) { return parse(s); }

Rational randomRational(std::mt19937_64& rng, int lo = -9, int hi = 9) {
  std::uniform_int_distribution<int> num(lo, hi), den(1, 5);
  return Rational(num(rng), den(rng));
}

Rational randomNonzero(std::mt19937_64& rng) {
  Rational r;
  do r = randomRational(rng); while (r.isZero());
  return r;
}

ModelCoefficients randomModel(std::mt19937_64& rng) {
  ModelCoefficients m;
  for (auto& a : m.A) a = randomRational(rng);
  for (auto& b : m.B) b = randomRational(rng);
  for (auto& c : m.C) c = randomNonzero(rng);
  return m;
}

// Rank over Z/p by plain elimination; independent of the library's rational code.
int rankModP(const RationalMatrix& m) {
  const std::int64_t p = 1000003;
  std::vector<std::vector<std::int64_t>> a(m.rows(), std::vector<std::int64_t>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      REQUIRE(m(i, j).isInteger());
      a[i][j] = ((std::int64_t)m(i, j).toDouble() % p + p) % p;
    }
  auto inv = [&](std::int64_t x) {
    std::int64_t r = 1, e = p - 2;
    for (; e; e >>= 1, x = x * x % p)
      if (e & 1) r = r * x % p;
    return r;
  };
  int rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < (int)m.rows(); ++c) {
    std::size_t piv = rank;
    while (piv < m.rows() && a[piv][c] == 0) ++piv;
    if (piv == m.rows()) continue;
    std::swap(a[piv], a[rank]);
    const auto iv = inv(a[rank][c]);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if ((int)i == rank || a[i][c] == 0) continue;
      const auto f = a[i][c] * iv % p;
      for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = ((a[i][j] - f * a[rank][j]) % p + p) % p;
    }
    ++rank;
  }
  return rank;
}

const Scalar b = P("beta*alpha^-2");

}  // namespace

TEST_CASE("fputToModel") {
  const auto m = fputToModel(FPUTParameters::symbolic());
  CHECK(m.C[0] == DiffPoly(1));
  CHECK(m.C[1] == DiffPoly(Rational(1, 24)));
  CHECK(m.C[2] == DiffPoly(Rational(1, 1920)));
  CHECK(m.C[3] == DiffPoly(Rational(1, 322560)));
  CHECK(m.B[6] == P("210*(48*gamma*alpha^-3 - 60*beta*alpha^-2 + 23)"));
  CHECK(m.A[2] == P("90*(2*beta*alpha^-2 - 1)"));

  const auto toda = fputToModel(FPUTParameters::toda(P("alpha")));
  CHECK(toda.A[2] == DiffPoly(30));
  CHECK(toda.kappa() == DiffPoly(Rational(21, 10)));

  CHECK_THROWS_AS(fputToModel(FPUTParameters::numeric(0, 1, 1)), std::invalid_argument);
  CHECK(fputToModel(FPUTParameters::symbolic(), B18Choice::asPrinted).B[17].isZero());
  CHECK(fputToModel(FPUTParameters::symbolic()).B[17] == DiffPoly(630));
}

TEST_CASE("model field round trip") {
  std::mt19937_64 rng(11);
  const auto m = randomModel(rng);
  const auto back = modelFromField(modelField(m));
  for (int i = 0; i < 4; ++i) CHECK(back.A[i] == m.A[i]);
  for (int i = 0; i < 20; ++i) CHECK(back.B[i] == m.B[i]);
  for (int i = 0; i < 4; ++i) CHECK(back.C[i] == m.C[i]);
  CHECK(coefficientOf(P("3*beta*u*u_x + 2*u*u_x + av(u)*u*u_x"), P("u*u_x")) == P("3*beta + 2"));
}

TEST_CASE("first order: symbolic and FPUT") {
  const auto sm = symbolicModel();
  const auto f = solveFirstOrder(sm);
  CHECK(f.a[0] == P("(A3 - A1 - 10)/12"));
  CHECK(f.a[3] == P("2*(10 - A2)/3"));
  CHECK(f.tildeA[0] == P("A3 + A4 - 4*A2 + 10"));

  const auto ff = solveFirstOrder(fputToModel(FPUTParameters::symbolic()));
  CHECK(ff.tildeA[0] == -130 + 180 * b);
  CHECK(ff.tildeA[1] == DiffPoly(-20));
  CHECK(ff.tildeA[2] == DiffPoly(10));
}

TEST_CASE("first order: Toda generator coefficients") {
  ModelCoefficients m = fputToModel(FPUTParameters::toda(DiffPoly(1)));
  REQUIRE(m.A[2] == DiffPoly(30));
  // Oracle: solve the four linear equations directly for A = (60, 20, 30, 30).
  RationalMatrix E{{12, -6, -3, 0}, {0, 0, -3, 0}, {0, -6, -3, 0}, {0, 0, -12, -6}};
  RationalVector rhs{Rational(20 - 60), Rational(10 - 20), Rational(30 - 30), Rational(0)};
  const auto x = *inverse(E) * rhs;
  const auto f = solveFirstOrder(m);
  for (int i = 0; i < 4; ++i) CHECK(f.a[i] == DiffPoly(x[i]));
  CHECK(f.a[0] == DiffPoly(Rational(-10, 3)));
  CHECK(f.a[3] == DiffPoly(Rational(-20, 3)));
}

TEST_CASE("first order: KdV5 already normal") {
  ModelCoefficients m = symbolicModel();
  m.A = {20, 10, 30, 0};
  const auto f = solveFirstOrder(m);
  for (const auto& a : f.a) CHECK(a.isZero());
  CHECK(f.G2.isZero());
}

TEST_CASE("first order: random rational models") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) CHECK_NOTHROW(solveFirstOrder(randomModel(rng)));
}

TEST_CASE("tilde-B") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = randomModel(rng);
    const auto r = computeR6(m, solveFirstOrder(m));
    const auto& t = r.tildeB;
    CHECK((t[3] - Rational(1, 2) * t[4] + t[5] + t[19]).isZero());
  }
  ModelCoefficients kdv5 = symbolicModel();
  kdv5.A = {20, 10, 30, 0};
  for (const auto& t : computeR6(kdv5, solveFirstOrder(kdv5)).tildeB) CHECK(t.isZero());

  const auto sm = symbolicModel();
  const auto f = solveFirstOrder(sm);
  const auto r = computeR6(sm, f);
  CHECK(r.tildeB[2] == -5 * f.a[2]);
  CHECK(r.tildeB[7] == 5 * f.a[2]);
}

TEST_CASE("linear system") {
  const auto& ls = buildLinearSystem();
  CHECK(ls.M(0, 0) == Rational(60));
  CHECK(ls.M(0, 1) == Rational(-6));
  CHECK(ls.M(0, 2) == Rational(-3));
  CHECK(ls.rankM == 13);
  CHECK(rankModP(ls.M) == 13);
  CHECK(ls.vAnnihilateM);
  CHECK(ls.vIndependent);
  CHECK(ls.vSpanKernel);
  CHECK(ls.matchesBrackets);
  CHECK(!ls.squareDeterminant.isZero());
  for (const auto& v : ls.v) {
    RationalMatrix row(1, 20);
    for (int i = 0; i < 20; ++i) row(0, i) = v[i];
    const auto prod = row * ls.M;
    for (std::size_t k = 0; k < 13; ++k) CHECK(prod(0, k).isZero());
  }
}

TEST_CASE("obstruction") {
  const auto sym = fputToModel(FPUTParameters::symbolic());
  CHECK(obstruction(sym) == P("-7560*(14 - 27*beta*alpha^-2 + 12*gamma*alpha^-3)"));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Rational a = randomNonzero(rng), be = randomRational(rng), g = randomRational(rng);
    const auto m = fputToModel(FPUTParameters::numeric(a, be, g));
    const Rational expected = Rational(-7560) / pow(a, 3) * (14 * pow(a, 3) - 27 * a * be + 12 * g);
    CHECK(obstruction(m) == DiffPoly(expected));
  }
  for (int k = 1; k <= 5; ++k) {
    const auto m = fputToModel(FPUTParameters::toda(DiffPoly(Rational(k, 2))));
    CHECK(obstruction(m).isZero());
  }
  CHECK(obstruction(fputToModel(FPUTParameters::numeric(1, 0, 0))) == DiffPoly(-105840));

  // The printed list repeats B3 and B5; the difference is -72 B3 + 27 B5.
  const auto sm = symbolicModel();
  CHECK(obstructionAsPrinted(sm) - obstruction(sm) == P("-72*B3 + 27*B5"));
  CHECK(!(obstructionAsPrinted(sym) == obstruction(sym)));
}

TEST_CASE("second order: FPUT") {
  const auto m = fputToModel(FPUTParameters::symbolic());
  const auto f = solveFirstOrder(m);
  const auto s = solveSecondOrder(m, f);
  CHECK(s.lambda[0] == DiffPoly(28));
  CHECK(s.lambda[1] == -854 + 1260 * b);
  CHECK(s.lambda[2] == DiffPoly(84));
  CHECK(s.lambda[3].isZero());
  CHECK(s.lambda[5] == 28 * (49 - 90 * b));
  CHECK(s.lambda[6] == -427 + 630 * b);
  // B18 enters lambda5 with unit weight.
  CHECK(s.lambda[4] == 420 * (16 - 63 * b + 54 * b * b) + 630);
  const auto mp = fputToModel(FPUTParameters::symbolic(), B18Choice::asPrinted);
  CHECK(solveSecondOrder(mp, solveFirstOrder(mp)).lambda[4] == 420 * (16 - 63 * b + 54 * b * b));

  CHECK(-9 * s.rho == s.r);
  CHECK(s.r == obstruction(m));
}

TEST_CASE("second order: rho vanishes exactly with r") {
  for (int k = 1; k <= 3; ++k) {
    const auto m = fputToModel(FPUTParameters::toda(DiffPoly(k)));
    CHECK(solveSecondOrder(m, solveFirstOrder(m)).rho.isZero());
  }
  const auto m = fputToModel(FPUTParameters::numeric(1, 0, 0));
  const auto s = solveSecondOrder(m, solveFirstOrder(m));
  CHECK(s.rho == DiffPoly(11760));
}

TEST_CASE("second order: symbolic model") {
  const auto m = symbolicModel();
  const auto s = solveSecondOrder(m, solveFirstOrder(m), P("lam4"));
  CHECK(s.lambda[0] == P("-14 + B3 + B8"));
  CHECK(s.lambda[3] == P("lam4"));
  for (int j = 1; j <= 6; ++j) CHECK(orthogonalityResidual(m, s.tildeB, s.lambda, j).isZero());
  CHECK(-3 * orthogonalityResidual(m, s.tildeB, s.lambda, 7) == obstruction(m));
}

TEST_CASE("end-to-end transformation on random models") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = randomModel(rng);
    const auto f = solveFirstOrder(m);
    const auto s = solveSecondOrder(m, f);
    const auto t = transformField(m, f, s);
    CHECK(t[0] == modelTerm(m, 1));
    CHECK(t[2] == modelTerm(m, 3));
    CHECK(t[4] == f.N5);
    CHECK(t[6] == s.N7);
    const auto cc = conservedCoefficients(m, f, s);
    CHECK(normalizedField(cc, m, s, true) == t);

    // Normalizing the normalized field needs no further first-order generator.
    ModelCoefficients n = m;
    for (int i = 0; i < 4; ++i) n.A[i] = coefficientOf(f.N5, basis5(i + 1)) * sym::invert(m.C[2]);
    for (const auto& a : solveFirstOrder(n).a) CHECK(a.isZero());
  }
}

TEST_CASE("conserved coefficients") {
  const auto m = fputToModel(FPUTParameters::symbolic());
  const auto f = solveFirstOrder(m);
  const auto s = solveSecondOrder(m, f);
  const auto cc = conservedCoefficients(m, f, s);
  for (const auto& c : cc.C) CHECK(isPureAverage(c));
  CHECK(cc.C[3][0] == DiffPoly(Rational(1, 322560)));
  CHECK(cc.C[3][2].isZero());
  // Coefficients inside the normalized field carry the scale of the order they
  // come from: 28 <U> at order h^6 multiplies C7, not C5.
  CHECK(cc.C[2][2] == Rational(28, 322560) * P("av(u)"));

  const auto pf = conservedCoefficientsProductForm(m, f, s);
  CHECK(pf.C[2][2] == Rational(28, 1920) * P("av(u)"));
  CHECK(pf.C[1][2] == Rational(10, 24) * P("av(u)"));
  CHECK(!(normalizedField(pf, m, s, true) == normalizedField(cc, m, s, true)));
}

TEST_CASE("slaving relation") {
  const auto r = slavingSymbolic();
  CHECK(r.c[0].isZero());
  CHECK(r.c[2] == P("(av(u^2) - u^2)/16"));
  CHECK(r.c[4] == P("(5/384 - beta/(64*alpha^2))*(u^3 - av(u^3)) - av(u^2)*(u - av(u))/128"
                    " - (u_x^2 - av(u_x^2))/256"));
  CHECK(r.field[0] == P("u_x"));
  CHECK(r.field[2] == P("(u_3x + 6*u*u_x)/24"));
  CHECK(r.field[4] == P("1/1920*(u_5x + 60*u_x*u_2x + 20*u*u_3x + 90*(2*beta*alpha^-2 - 1)*u^2*u_x"
                        " + 30*av(u^2)*u_x)"));
  CHECK(r.field[6] ==
        P("1/322560*(u_7x + 420*u_2x*u_3x + 210*u_x*u_4x + 42*u*u_5x + 315*(8*beta*alpha^-2 - 5)*u_x^3"
          " + 630*(12*beta*alpha^-2 - 7)*u*u_x*u_2x + 630*(2*beta*alpha^-2 - 1)*u^2*u_3x"
          " + 210*(48*gamma*alpha^-3 - 60*beta*alpha^-2 + 23)*u^3*u_x"
          " + 210*av(u^2)*(u_3x + (18*beta*alpha^-2 - 9)*u*u_x)"
          " + 105*(3*av(u_x^2) + (12*beta*alpha^-2 - 10)*av(u^3) + 6*av(u^2)*av(u))*u_x)"));
  CAPTURE(sym::print(r.field[6]));

  // The reduced field is of model form and fixes B18.
  const auto m = modelFromField(r.field);
  CHECK(m.B[17] == DiffPoly(630));
  const auto expected = fputToModel(FPUTParameters::symbolic());
  for (int i = 0; i < 20; ++i) CHECK(m.B[i] == expected.B[i]);
  for (int i = 0; i < 4; ++i) CHECK(m.A[i] == expected.A[i]);
  CHECK_THROWS_AS(slavingSymbolic(FPUTParameters::numeric(0, 1, 1)), std::invalid_argument);
}
