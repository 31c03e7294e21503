// Acceptance suite: one PASS/FAIL line per criterion, tolerances as specified.
// Expected values are either transcribed from the printed formulas (kept as
// text below and parsed independently of the library's own tables) or
// re-derived by a second route.  Exit status is 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fputlab/continuum.hpp"
#include "fputlab/expression.hpp"
#include "fputlab/fit.hpp"
#include "fputlab/grid.hpp"
#include "fputlab/hierarchy.hpp"
#include "fputlab/lattice.hpp"
#include "fputlab/normalform.hpp"
#include "num_helpers.hpp"

using namespace fputlab;
using sym::DiffPoly;
using namespace testing_num;

namespace {

// ---- reporting -------------------------------------------------------------------

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  failures += !o.pass;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << id << "] " << title << ":" << o.detail.str()
            << " (" << std::fixed << std::setprecision(2) << secs << " s)" << std::defaultfloat << std::endl;
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

// ---- symbolic helpers ------------------------------------------------------------

DiffPoly P(const std::string& s) { return sym::parse(s); }

std::string replaceAll(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
  return s;
}

// kappa = C5^2 / (C3 C7) written with the parser's parameter names.
const std::string kKappa = "(C5^2*C3^-1*C7^-1)";

// Printed first-order solution, in the model coefficients A1..A4.
const std::map<std::string, std::string> kPrintedA = {
    {"a1", "((A3 - A1 - 10)/12)"}, {"a2", "((A3 - A2 - 20)/6)"}, {"a3", "((A2 - 10)/3)"}, {"a4", "(2*(10 - A2)/3)"}};

std::string withA(std::string s) {
  for (const auto& [k, v] : kPrintedA) s = replaceAll(s, k, v);
  return s;
}

// Printed tilde-B list in terms of a1..a4 and A1..A4.
const char* kPrintedTildeB[20] = {
    "a1*(A1 + 20) - 20*a2 - 15*a3",
    "a1*(A2 + 10) - 10*a2 - 10*a3",
    "-5*a3",
    "a1*(A3 + 30) - a2*(A1 + 20) - (a3/4)*(A1 + A2 + 30)",
    "2*a1*(A3 + 30) - a2*(A1 + 3*A2 + 50) - (3*a3/2)*(A1 + A2 + 30)",
    "-(a2 + 3*a3)*(A2 + 10)/2",
    "-(a2 + a3/3)*(A3 + 30)",
    "5*a3",
    "(6*a1 - 3*a2)*(A2 - 10) + 3*a3*(A1 - A2 + 30)/2 - a4*(A1 + 20)/2",
    "30*a3 - a4*(A2 + 10)/2",
    "(6*a2 + 3*a3)*(10 - A2)/2 + (a3 - 2*a4)*(A3 + 30)/2",
    "(a2 - a3)*(A2 + 10)/2",
    "(a2 - a3)*(A3 + 30)",
    "a3*(2*A2 - 10) + a4*(A2 + 10)/2",
    "(a3 + a4)*(A3 + 30) + 3*(a3 - a4)*(A2 - 10)",
    "(a3/2 - a2)*(A3 + 2*A4 - 4*A2 + 10) - a3*(A3 + 30)/6",
    "a1*(A3 + 2*A4 - 4*A2 + 10) + a3*(3*A2 - A1 + 10)/4",
    "(a2 - 3/2*a3 - a4)*(A3 + 2*A4 - 4*A2 + 10) + (3*a2 - 9/2*a3)*(A2 - 10)",
    "(a3 + a4)*(A3 + 2*A4 - A2 - 20)",
    "(a2 - a3)*(A1 - 2*A2)/2",
};

// Printed closed forms of lambda1..lambda7 (lambda4 free); "k" is kappa.
const char* kPrintedLambda[7] = {
    "-14 + B3 + B8",
    "42 + B12 - 8*B3 + B6 - 2/3*k*(A2 - 10)^2",
    "28 + B10 + B14 - 2*B3 - 10*B8 + 2/3*k*(100 - 20*A2 + A2^2)",
    "lam4",
    "10*B3 - 2*B6 + 10*B8 - 4*B10 + B11 - 6*B12 + B13 + B18"
    " + k*(-100 + 40*A2 - A2^2 - 10*A3 - 2/3*A2*A3 + 1/3*A3^2 - 10*A4 + 1/3*A3*A4)",
    "-56 + 4*B3 + 20*B8 - 2*B10 - 6*B14 + B15 + B19 + 2/3*k*(-100 + A2^2 + 10*A3 - A2*A3 + 10*A4 - A2*A4)",
    "28/3 + B16/2 + B17 + B20 - 7*B3/3 + B6/3 + k/18*(-300 + 70*A2 - A2^2 - A2*A3 - 3*A1*A4 + 6*A2*A4)",
};

const int kPrintedM[20][13] = {
    {60, -6, -3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},    {24, 0, -3, 0, 0, -3, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, -3, 0, 0, 0, 0, 0, 0, 0},      {0, 6, 0, -6, -3, -18, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 12, -18, -6, -72, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, -3, -21, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, -6, -2, -18, 0, 0, 0, 0, 0, 0, 0},   {0, 0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 54, 12, -6, -3, 0, 0, 0, 0},   {0, 0, 0, 0, 0, 24, 0, 0, -3, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 36, 0, -6, -3, 0, 0, 0, 0},    {0, 0, 0, 0, 3, -3, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 6, -18, 0, 0, 0, 0, -6, 0, 0},    {0, 0, 0, 0, 0, 0, 0, 0, 3, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 6, -6, 0, 0, 0},      {0, 0, 0, 6, -10, -18, 0, 0, 0, 0, 0, 0, -6},
    {0, 6, -6, 0, 3, 6, 0, 0, 0, 0, 0, -6, 0},     {0, 0, 0, 0, 6, 18, 0, 6, -9, 0, 6, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 6, 6, 0, 0, 0},       {0, -6, 6, -3, 3, 3, 0, 0, 0, 0, 0, 6, 3},
};

const int kPrintedV[7][20] = {
    {0, 0, -14, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3, 6, 0, 0, 6},
    {0, 0, 32, 0, 0, 0, 0, 0, 0, 4, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0},
    {0, 0, -48, 0, 0, 4, 0, 0, 0, -4, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0},
    {0, 0, 8, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0},
    {0, 0, -8, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {24, -60, 170, 24, -9, -8, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
};

// Rank over Z/p by plain elimination, independent of the library's rationals.
int rankModP(std::vector<std::vector<std::int64_t>> a) {
  const std::int64_t p = 1000003;
  for (auto& row : a)
    for (auto& x : row) x = ((x % p) + p) % p;
  auto inv = [&](std::int64_t x) {
    std::int64_t r = 1;
    for (std::int64_t e = p - 2; e; e >>= 1, x = x * x % p)
      if (e & 1) r = r * x % p;
    return r;
  };
  int rank = 0;
  const std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows); ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    const auto iv = inv(a[rank][c]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (static_cast<int>(i) == rank || a[i][c] == 0) continue;
      const auto f = a[i][c] * iv % p;
      for (std::size_t j = 0; j < cols; ++j) a[i][j] = ((a[i][j] - f * a[rank][j]) % p + p) % p;
    }
    ++rank;
  }
  return rank;
}

Rational randomRational(std::mt19937_64& rng, bool nonzero = false) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  Rational r;
  do r = Rational(num(rng), den(rng));
  while (nonzero && r.isZero());
  return r;
}

// ---- numeric helpers -------------------------------------------------------------

const Potential kPoly = Potential::polynomial(1, 0.5, -0.25);

double relErr(const GridFunction& a, const GridFunction& b) {
  return (a - b).maxAbs() / std::max(1e-300, std::max(a.maxAbs(), b.maxAbs()));
}

double num(const DiffPoly& p) { return p.isZero() ? 0.0 : p.asRational()->toDouble(); }

}  // namespace

int main() {
  std::cout << "fputlab acceptance suite\n";

  criterion(1, "Table reproduction", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = sym::verifyBracketTables();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int rows[4] = {0, 0, 0, 0}, passed = 0;
    for (const auto& c : checks) {
      ++rows[c.identity.table];
      passed += c.passed;
    }
    o.detail << " " << passed << "/" << checks.size() << " identities exact (tables " << rows[1] << " + " << rows[2]
             << " + " << rows[3] << "), " << sci(secs) << " s of 10 s";
    o.require(rows[1] == 4 && rows[2] == 28 && rows[3] == 13, "row counts 4 + 28 + 13");
    o.require(passed == 45, "all 45 identities");
    o.require(secs < 10, "runtime < 10 s");
  });

  criterion(2, "KdV commutativity", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = sym::verifyHierarchy();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::set<std::pair<int, int>> pairs;
    int passed = 0;
    for (const auto& c : checks) {
      pairs.insert({std::min(c.i, c.j), std::max(c.i, c.j)});
      passed += c.passed;
    }
    // Independent spot check of the largest bracket.
    const bool k57 = sym::lieBracket(sym::kdv(5), sym::kdv(7)).isZero();
    o.detail << " " << passed << "/" << checks.size() << " brackets [Ki,Kj] = 0 over " << pairs.size()
             << " pairs; [K5,K7] recomputed = 0: " << (k57 ? "yes" : "no") << "; " << sci(secs) << " s of 60 s";
    o.require(passed == static_cast<int>(checks.size()) && k57, "all brackets vanish");
    int distinct = 0;
    for (int i : {1, 3, 5, 7})
      for (int j : {1, 3, 5, 7})
        if (i < j) distinct += pairs.count({i, j});
    o.require(distinct == 6, "all 6 distinct pairs covered");
    o.require(secs < 60, "runtime < 60 s");
  });

  criterion(3, "First-order normal form", [](Outcome& o) {
    const auto m = nf::symbolicModel();
    const auto f = nf::solveFirstOrder(m);
    int aOk = 0;
    for (int i = 0; i < 4; ++i) aOk += f.a[i] == P(kPrintedA.at("a" + std::to_string(i + 1)));
    const DiffPoly tA4 = P("A3 + A4 - 4*A2 + 10"), tA5 = P("20 - 2*A2"), tA6 = P("A2 - 10");
    const bool tOk = f.tildeA[0] == tA4 && f.tildeA[1] == tA5 && f.tildeA[2] == tA6;
    // F5 + [G2, F3] = N5 by a fresh bracket, and N5 against its printed form.
    const DiffPoly n5 = nf::modelTerm(m, 5) + sym::lieBracket(f.G2, nf::modelTerm(m, 3));
    const DiffPoly printedN5 = P("C5*(u_5x + 20*u_x*u_2x + 10*u*u_3x + 30*u^2*u_x + (" + sym::print(tA4) +
                                 ")*av(u^2)*u_x + (" + sym::print(tA5) + ")*av(u)^2*u_x + (" + sym::print(tA6) +
                                 ")*av(u)*(u_3x + 6*u*u_x))");
    const bool n5Ok = n5 == f.N5 && n5 == printedN5;
    o.detail << " a1..a4 " << aOk << "/4, tildeA4..6 " << (tOk ? "3/3" : "mismatch")
             << ", F5 + [G2,F3] = N5 for symbolic A: " << (n5Ok ? "exact" : "mismatch");
    o.require(aOk == 4 && tOk && n5Ok, "symbolic first-order identities");
  });

  criterion(4, "Second-order machinery", [](Outcome& o) {
    const auto m = nf::symbolicModel();
    const auto f = nf::solveFirstOrder(m);
    const auto r6 = nf::computeR6(m, f);
    int tbOk = 0;
    for (int i = 0; i < 20; ++i) tbOk += r6.tildeB[i] == P(withA(kPrintedTildeB[i]));
    // R6 by a second route: (1/2)[G2, F5 + N5].
    const bool r6Ok = r6.R6 == Rational(1, 2) * sym::lieBracket(f.G2, nf::modelTerm(m, 5) + f.N5);
    const auto& t = r6.tildeB;
    const bool zeroAvg = (t[3] - Rational(1, 2) * t[4] + t[5] + t[19]).isZero();

    const auto& ls = nf::buildLinearSystem();
    int mOk = 0;
    std::vector<std::vector<std::int64_t>> Mz(20, std::vector<std::int64_t>(13));
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 13; ++j) {
        Mz[i][j] = kPrintedM[i][j];
        mOk += ls.M(i, j) == Rational(kPrintedM[i][j]) && ls.bracketM(i, j) == Rational(kPrintedM[i][j]);
      }
    int vOk = 0, annihilate = 0;
    for (int k = 0; k < 7; ++k) {
      bool same = true;
      for (int i = 0; i < 20; ++i) same = same && ls.v[k][i] == Rational(kPrintedV[k][i]);
      vOk += same;
      bool zero = true;
      for (int j = 0; j < 13; ++j) {
        std::int64_t s = 0;
        for (int i = 0; i < 20; ++i) s += std::int64_t(kPrintedV[k][i]) * kPrintedM[i][j];
        zero = zero && s == 0;
      }
      annihilate += zero;
    }
    std::vector<std::vector<std::int64_t>> Vz(7, std::vector<std::int64_t>(20));
    for (int k = 0; k < 7; ++k)
      for (int i = 0; i < 20; ++i) Vz[k][i] = kPrintedV[k][i];
    const int rank = rankModP(Mz), vRank = rankModP(Vz);

    // lambda formulas against the solved system, lambda4 symbolic.
    const auto s = nf::solveSecondOrder(m, f, P("lam4"));
    int lOk = 0;
    for (int i = 0; i < 7; ++i) {
      const DiffPoly printed = P(replaceAll(kPrintedLambda[i], "k", kKappa));
      lOk += s.lambda[i] == printed && nf::lambdaFormulas(m, P("lam4"))[i] == printed;
    }

    // FPUT specializations.
    const auto fm = nf::fputToModel(nf::FPUTParameters::symbolic());
    const auto ff = nf::solveFirstOrder(fm);
    const auto fs = nf::solveSecondOrder(fm, ff);
    const DiffPoly b = P("beta*alpha^-2");
    const auto fp = nf::fputToModel(nf::FPUTParameters::symbolic(), nf::B18Choice::asPrinted);
    const auto fsPrinted = nf::solveSecondOrder(fp, nf::solveFirstOrder(fp));
    const bool fput = fs.lambda[0] == DiffPoly(28) && fs.lambda[1] == -854 + 1260 * b && fs.lambda[2] == DiffPoly(84) &&
                      fsPrinted.lambda[4] == 420 * (16 - 63 * b + 54 * b * b) && fs.lambda[5] == 28 * (49 - 90 * b) &&
                      fs.lambda[6] == -427 + 630 * b && ff.tildeA[0] == -130 + 180 * b &&
                      ff.tildeA[1] == DiffPoly(-20) && ff.tildeA[2] == DiffPoly(10);
    const auto cc = nf::conservedCoefficients(fm, ff, fs);
    const auto pf = nf::conservedCoefficientsProductForm(fm, ff, fs);
    const DiffPoly printedC5h2 = Rational(1, 1920) * P("28*av(u)");
    const bool productMatchesPrinted = pf.C[2][0] == DiffPoly(Rational(1, 1920)) && pf.C[2][2] == printedC5h2;
    const bool c5Ok = cc.C[2][0] == DiffPoly(Rational(1, 1920)) && cc.C[2][2] == printedC5h2;
    // The verified coefficients rebuild the transformed field exactly.
    const bool ccVerified = nf::normalizedField(cc, fm, fs, true) == nf::transformField(fm, ff, fs);
    const bool pfVerified = nf::normalizedField(pf, fm, fs, true) == nf::transformField(fm, ff, fs);

    o.detail << " tildeB " << tbOk << "/20, R6 = (1/2)[G2,F5+N5]: " << (r6Ok ? "yes" : "no")
             << ", zero-average identity: " << (zeroAvg ? "yes" : "no") << ", M " << mOk << "/260 (printed = bracket)"
             << ", v " << vOk << "/7, v_i^T M = 0: " << annihilate << "/7, rank M = " << rank << ", rank v = " << vRank
             << ", lambda formulas " << lOk << "/7, FPUT lambda and tildeA values (lambda5 with the printed B18 = 0): "
             << (fput ? "yes" : "no") << "; C5(U,h) printed (1/1920)(1 + 28 h^2 <U>) vs verified 1/1920 + ("
             << sym::print(cc.C[2][2]) << ") h^2: " << (c5Ok ? "equal" : "differ")
             << " (verified form rebuilds the transformed field: " << (ccVerified ? "yes" : "no")
             << ", printed form: " << (pfVerified ? "yes" : "no") << ")";
    o.require(tbOk == 20 && r6Ok && zeroAvg, "tildeB");
    o.require(mOk == 260 && vOk == 7 && annihilate == 7 && rank == 13 && vRank == 7, "M and kernel");
    o.require(lOk == 7 && fput, "lambda formulas and FPUT values");
    o.require(productMatchesPrinted, "product form transcribed");
    o.require(c5Ok, "printed C5(U,h) equals the verified constant of motion");
  });

  criterion(5, "Obstruction", [](Outcome& o) {
    std::mt19937_64 rng(20240501);
    int ok = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const Rational a = randomRational(rng, true), b = randomRational(rng), g = randomRational(rng);
      const auto m = nf::fputToModel(nf::FPUTParameters::numeric(a, b, g));
      const Rational a3 = a * a * a;
      const Rational expected = Rational(-7560) / a3 * (Rational(14) * a3 - Rational(27) * a * b + Rational(12) * g);
      const auto s = nf::solveSecondOrder(m, nf::solveFirstOrder(m));
      ok += s.r == DiffPoly(expected) && nf::obstruction(m) == DiffPoly(expected);
    }
    int todaOk = 0;
    for (int k = 1; k <= 5; ++k) {
      const Rational a(2 * k - 7, 3);  // -5/3, -1, -1/3, 1/3, 1
      const auto m = nf::fputToModel(nf::FPUTParameters::numeric(a, Rational(2, 3) * a * a, Rational(1, 3) * a * a * a));
      const auto s = nf::solveSecondOrder(m, nf::solveFirstOrder(m));
      todaOk += s.r.isZero() && s.rho.isZero();
    }
    const auto m = nf::fputToModel(nf::FPUTParameters::numeric(1, 0, 0));
    const auto s = nf::solveSecondOrder(m, nf::solveFirstOrder(m));
    o.detail << " r closed form " << ok << "/10 random triples, Toda line r = rho = 0 for " << todaOk
             << "/5 alpha, pure alpha-model rho = " << sym::print(s.rho) << " (r = " << sym::print(s.r) << ")";
    o.require(ok == 10 && todaOk == 5 && !s.rho.isZero(), "obstruction");
  });

  {
    // Printed r, term for term (B3 and B5 each appear twice).
    const auto sm = nf::symbolicModel();
    const DiffPoly verbatim =
        P(replaceAll("1680 - 72*B1 + 180*B2 - 510*B3 - 72*B3 + 27*B5 - 72*B4 + 27*B5 + 24*B6 - 9*B7"
                     " + k*(-2400 + 6*A1^2 + 670*A2 - 30*A1*A2 - 4*A2^2 - 60*A3 + 3*A1*A3 - A2*A3)",
                     "k", kKappa));
    const auto fm = nf::fputToModel(nf::FPUTParameters::numeric(1, 0, 0));
    const bool libraryVerbatim = nf::obstructionAsPrinted(sm) == verbatim;
    std::cout << "NOTE  r printed verbatim differs from the solvability condition by "
              << sym::print(verbatim - nf::obstruction(sm)) << "; library keeps it as obstructionAsPrinted ("
              << (libraryVerbatim ? "matches transcription" : "MISMATCH") << "); at (alpha,beta,gamma) = (1,0,0) verbatim "
              << sym::print(nf::obstructionAsPrinted(fm)) << " vs "
              << sym::print(nf::obstruction(fm)) << " from the consistent list" << std::endl;
  }

  criterion(6, "Slaving relation", [](Outcome& o) {
    const auto r = nf::slavingSymbolic();
    const bool c2 = r.c[2] == P("(av(u^2) - u^2)/16");
    // Combined display: the h^4 bracket carries U^3 - <U^3>, so <c4> = 0.
    const bool c4 = r.c[4] == P("(5/384 - beta/(64*alpha^2))*(u^3 - av(u^3)) - av(u^2)*(u - av(u))/128"
                                " - (u_x^2 - av(u_x^2))/256");
    const std::string b = "beta*alpha^-2", g = "gamma*alpha^-3";
    const bool f0 = r.field[0] == P("u_x");
    const bool f2 = r.field[2] == P("(u_3x + 6*u*u_x)/24");
    const bool f4 = r.field[4] == P("1/1920*(u_5x + 60*u_x*u_2x + 20*u*u_3x + 90*(2*" + b +
                                    " - 1)*u^2*u_x + 30*av(u^2)*u_x)");
    const bool f6 = r.field[6] ==
                    P("1/322560*(u_7x + 420*u_2x*u_3x + 210*u_x*u_4x + 42*u*u_5x + 315*(8*" + b +
                      " - 5)*u_x^3 + 630*(12*" + b + " - 7)*u*u_x*u_2x + 630*(2*" + b + " - 1)*u^2*u_3x + 210*(48*" +
                      g + " - 60*" + b + " + 23)*u^3*u_x + 210*av(u^2)*(u_3x + (18*" + b +
                      " - 9)*u*u_x) + 105*(3*av(u_x^2) + (12*" + b + " - 10)*av(u^3) + 6*av(u^2)*av(u))*u_x)");
    const bool residual = r.residual[0].isZero() && r.residual[2].isZero() && r.residual[4].isZero();
    o.detail << " c2 " << (c2 ? "exact" : "mismatch") << ", c4 " << (c4 ? "exact" : "mismatch")
             << ", reduced field orders h^0/h^2/h^4/h^6: " << f0 << f2 << f4 << f6
             << ", invariance residual zero through h^4: " << (residual ? "yes" : "no");
    o.require(c2 && c4 && f0 && f2 && f4 && f6 && residual, "slaving");
  });

  criterion(7, "Numeric invariance", [](Outcome& o) {
    const auto U = twoModeGrid(256);
    const std::vector<double> hs{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    std::vector<double> full, truncated;
    for (double h : hs) {
      full.push_back(continuum::invarianceResidual(U, h, kPoly).sup);
      truncated.push_back(continuum::invarianceResidual(U, h, kPoly, false).sup);
    }
    const auto f6 = fitLogLog(hs, full), f4 = fitLogLog(hs, truncated);
    o.detail << " slope " << sci(f6.slope) << " (R^2 " << sci(f6.r2) << "), without c4 " << sci(f4.slope)
             << ", h = 1/32..1/256, N = 256";
    o.require(std::abs(f6.slope - 6) <= 0.5, "slope 6 +- 0.5");
    o.require(std::abs(f4.slope - 4) <= 0.5, "slope without c4 4 +- 0.5");
  });

  criterion(8, "Expansion ladder", [](Outcome& o) {
    const auto U = twoModeGrid<long double>(64);
    const auto V = (long double)0.4 * cosGrid<long double>(64, 1);
    const auto hs = dyadic(4, 7);
    o.detail << " slopes";
    for (const Potential& w : {kPoly, Potential::toda(0.9)}) {
      o.detail << " " << (w.kind == Potential::Kind::toda ? "toda" : "poly");
      for (int k : {0, 2, 4, 6}) {
        std::vector<double> err;
        for (double h : hs) err.push_back(double(continuum::expansionError<long double>(U, V, h, w, k)));
        const auto fit = fitLogLog(hs, err);
        o.detail << (k ? "/" : " ") << sci(fit.slope);
        o.require(std::abs(fit.slope - (k + 2)) <= 0.5, "order " + std::to_string(k));
      }
    }
    // D_h = d + h^2/24 d^3 + h^4/1920 d^5 + O(h^6).
    const auto f = sinGrid<long double>(32);
    std::vector<GridFunctionL> D;
    for (int m = 0; m <= 5; ++m) D.push_back(spectral::deriv(f, m));
    const auto dh = dyadic(4, 8);
    std::vector<double> e4, e6;
    for (double hd : dh) {
      const long double h = hd;
      const auto exact = spectral::applyDh(f, h);
      const GridFunctionL two = D[1] + (h * h / 24) * D[3];
      e4.push_back(maxDiff(exact, two));
      e6.push_back(maxDiff(exact, two + (h * h * h * h / 1920) * D[5]));
    }
    const auto s4 = fitLogLog(dh, e4), s6 = fitLogLog(dh, e6);
    o.detail << "; D_h expansion " << sci(s4.slope) << " and " << sci(s6.slope);
    o.require(std::abs(s4.slope - 4) <= 0.2, "D_h slope 4 +- 0.2");
    o.require(std::abs(s6.slope - 6) <= 0.3, "D_h slope 6 +- 0.3");
  });

  criterion(9, "Lattice and continuum", [](Outcome& o) {
    const std::size_t n = 64;
    continuum::FlowSpec spec;
    spec.field = continuum::FieldKind::exact;
    spec.h = 1.0 / n;
    spec.dt = 1e-4;
    spec.potential = kPoly;
    const auto u0 = randomBandLimited(n, 11, 3, 20.0, 0.3);
    const auto v0 = randomBandLimited(n, 12, 3, 20.0, 0.1);
    const auto c = continuum::compareWithLattice(u0, v0, spec, 0.1);

    lattice::IntegrateOptions opt;
    opt.dt = 1e-3;
    opt.steps = 10000;
    opt.stride = 10;
    const auto traj = lattice::integrate(lattice::sampleFromProfile(u0, v0, spec.h), kPoly, opt);
    const double e0 = traj.samples.front().energy;
    double drift = 0;
    for (const auto& s : traj.samples) drift = std::max(drift, std::abs(s.energy - e0) / std::abs(e0));
    o.detail << " n = N = 64, t_cont = 0.1: max|q_j - h u(hj)| = " << sci(c.maxQError) << " (q moved by "
             << sci(c.maxQChange) << "); Verlet dt = 1e-3 relative energy drift over t = 10: " << sci(drift);
    o.require(c.maxQError < 1e-6, "q error < 1e-6");
    o.require(c.maxQChange > 1e-2, "nontrivial motion");
    o.require(drift < 1e-6, "energy drift < 1e-6");
  });

  criterion(10, "Conservation", [](Outcome& o) {
    continuum::FlowSpec spec;
    spec.field = continuum::FieldKind::kdv;
    spec.kdvWhich = 3;
    spec.dt = 1e-4;
    const auto U0 = sinGrid(256);
    const auto r = continuum::integrateFlow(U0, GridFunction(), spec, 1.0, 1000);
    const auto& a = r.samples.front().integrals;
    double d1 = 0, d2 = 0, d3 = 0;
    for (const auto& s : r.samples) {
      d1 = std::max(d1, std::abs(s.integrals.I1 - a.I1));  // I1 = 0: absolute
      d2 = std::max(d2, std::abs(s.integrals.I2 - a.I2) / std::abs(a.I2));
      d3 = std::max(d3, std::abs(s.integrals.I3 - a.I3) / std::abs(a.I3));
    }
    o.detail << " K3, U0 = sin(2 pi x), t = 1, N = 256, dt = 1e-4: drift I1 " << sci(d1) << " (abs), I2 " << sci(d2)
             << ", I3 " << sci(d3);
    o.require(d1 < 1e-8 && d2 < 1e-8 && d3 < 1e-8, "K3 drift < 1e-8");

    // Same run from sin(2 pi x) + 0.3 cos(4 pi x), reported alongside.
    const auto r2 = continuum::integrateFlow(twoModeGrid(256), GridFunction(), spec, 1.0, 1000);
    const auto& b = r2.samples.front().integrals;
    double e2 = 0, e3 = 0;
    for (const auto& s : r2.samples) {
      e2 = std::max(e2, std::abs(s.integrals.I2 - b.I2) / std::abs(b.I2));
      e3 = std::max(e3, std::abs(s.integrals.I3 - b.I3) / std::abs(b.I3));
    }
    o.detail << " [two-mode profile, informational: I2 " << sci(e2) << ", I3 " << sci(e3) << "]";

    continuum::FlowSpec ex;
    ex.field = continuum::FieldKind::exact;
    ex.h = 0.1;
    ex.dt = 1e-4;
    ex.potential = kPoly;
    const auto U = randomBandLimited(128, 31, 4, 1.0, 0.4), V = randomBandLimited(128, 32, 4, 1.0, -0.3);
    const auto q = continuum::integrateFlow(U, V, ex, 0.1, 100);
    double mu = 0, mv = 0;
    for (const auto& s : q.samples) {
      mu = std::max(mu, std::abs(s.meanU - U.mean()));
      mv = std::max(mv, std::abs(s.meanV - V.mean()));
    }
    o.detail << "; exact two-wave flow, 1000 steps: mean drift U " << sci(mu) << ", V " << sci(mv);
    o.require(mu < 1e-13 && mv < 1e-13, "means conserved to rounding");
  });

  criterion(11, "Symbolic-numeric cross-oracle", [](Outcome& o) {
    const auto p = nf::FPUTParameters::numeric(1, Rational(1, 2), Rational(-1, 4));
    const auto m = nf::fputToModel(p);
    const auto f = nf::solveFirstOrder(m);
    const auto s = nf::solveSecondOrder(m, f);
    const auto slaving = nf::slavingSymbolic();
    const continuum::ParamValues pv{{sym::paramId("alpha"), kPoly.alpha},
                                    {sym::paramId("beta"), kPoly.taylorBeta()},
                                    {sym::paramId("gamma"), kPoly.taylorGamma()}};
    const double h = 0.1;
    double worst[4] = {0, 0, 0, 0};
    for (unsigned seed = 0; seed < 10; ++seed) {
      const auto U = randomBandLimited(128, 900 + seed, 4, 1.0, 0.3);
      const double m1 = U.mean(), m2 = (U * U).mean(), m3 = (U * U * U).mean();
      const auto Ux = spectral::deriv(U, 1);
      const double mx2 = (Ux * Ux).mean(), mx3 = (Ux * Ux * Ux).mean();

      GridFunction n5 = continuum::kdvField(U, 5);
      n5.axpy(num(f.tildeA[2]) * m1, continuum::kdvField(U, 3));
      n5.axpy(num(f.tildeA[0]) * m2 + num(f.tildeA[1]) * m1 * m1, Ux);
      n5 *= num(m.C[2]);
      worst[0] = std::max(worst[0], relErr(continuum::evaluate(f.N5, U), n5));

      const auto& l = s.lambda;
      GridFunction n7 = continuum::kdvField(U, 7);
      n7.axpy(num(l[0]) * m1, continuum::kdvField(U, 5));
      n7.axpy(num(l[1]) * m2 + num(l[2]) * m1 * m1, continuum::kdvField(U, 3));
      n7.axpy(num(l[3]) * (mx2 - 2 * m3) + num(l[4]) * m1 * m2 + num(l[5]) * m1 * m1 * m1, Ux);
      n7 += num(l[6]) * mx3;
      n7.axpy(num(s.rho), U * U * U * Ux);
      n7 *= num(m.C[3]);
      worst[1] = std::max(worst[1], relErr(continuum::evaluate(s.N7, U), n7));

      worst[2] = std::max(worst[2], relErr(continuum::evaluate(slaving.field, U, h, pv), continuum::rhsReduced(U, h, kPoly, 6)));
      worst[3] = std::max(worst[3], relErr(continuum::evaluate(slaving.c, U, h, pv), continuum::slavingC(U, h, kPoly)));
    }
    o.detail << " 10 random band-limited states, worst relative error N5 " << sci(worst[0]) << ", N7 "
             << sci(worst[1]) << ", reduced field " << sci(worst[2]) << ", c " << sci(worst[3]);
    for (double w : worst) o.require(w < 1e-10, "agreement to 1e-10");
  });

  std::cout << (11 - failures) << "/11 criteria pass" << std::endl;
  return failures ? 1 : 0;
}
