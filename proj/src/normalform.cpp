#include "fputlab/normalform.hpp"

#include <string>

#include "fputlab/expression.hpp"
#include "fputlab/hierarchy.hpp"

namespace fputlab::nf {

using sym::DiffPoly;
using sym::HSeries;

namespace {

Scalar P(const char* name) { return DiffPoly::param(name); }

Scalar ratio(long p, long q) { return DiffPoly(Rational(p, q)); }

std::vector<DiffPoly> parseAll(std::initializer_list<const char*> texts) {
  std::vector<DiffPoly> out;
  for (const char* t : texts) out.push_back(sym::parse(t));
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw VerificationError(what);
}

// Coefficients of p in `basis`; throws when p is not in their span.
std::vector<Scalar> decompose(const DiffPoly& p, const std::vector<DiffPoly>& basis, const std::string& what) {
  std::vector<Scalar> c;
  DiffPoly rebuilt;
  for (const auto& b : basis) {
    c.push_back(coefficientOf(p, b));
    rebuilt += c.back() * b;
  }
  require(rebuilt == p, what + ": not in the span of the basis, remainder " + sym::print(p - rebuilt));
  return c;
}

const std::vector<DiffPoly>& basis5All() {
  static const auto b = parseAll({"u_x*u_2x", "u*u_3x", "u^2*u_x", "av(u^2)*u_x"});
  return b;
}

const std::vector<DiffPoly>& basis7All() {
  static const auto b = parseAll({
      "u_2x*u_3x", "u_x*u_4x", "u*u_5x", "u_x^3", "u*u_x*u_2x", "u^2*u_3x", "u^3*u_x",
      "av(u)*u_5x", "av(u)*u_x*u_2x", "av(u)*u*u_3x", "av(u)*u^2*u_x",
      "av(u^2)*u_3x", "av(u^2)*u*u_x", "av(u)^2*u_3x", "av(u)^2*u*u_x",
      "av(u^3)*u_x", "av(u_x^2)*u_x", "av(u)*av(u^2)*u_x", "av(u)^3*u_x", "av(u_x^3)",
  });
  return b;
}

const std::vector<DiffPoly>& g2All() {
  static const auto b = parseAll({
      "u_2x",
      "u^2 - av(u^2)",
      "u_x*pr(u) + av(u^2) - av(u)^2",
      "av(u)*(u - av(u))",
  });
  return b;
}

const std::vector<DiffPoly>& g4All() {
  static const auto b = parseAll({
      "u_4x",
      "u_x^2 - av(u_x^2)",
      "u*u_2x + av(u_x^2)",
      "u^3 - av(u^3)",
      "u_x*pr(u^2) + av(u^3) - av(u)*av(u^2)",
      "(u_3x + 6*u*u_x)*pr(u) + 3*av(u^3) - av(u_x^2) - 3*av(u^2)*av(u)",
      "av(u)*u_2x",
      "av(u)*(u^2 - av(u^2))",
      "av(u)*(u_x*pr(u) + av(u^2) - av(u)^2)",
      "av(u)^2*(u - av(u))",
      "av(u^2)*(u - av(u))",
      "av(u_x^2)",
      "av(u^3)",
  });
  return b;
}

template <std::size_t N>
DiffPoly combine(const std::array<Scalar, N>& c, const std::vector<DiffPoly>& basis) {
  DiffPoly out;
  for (std::size_t i = 0; i < N; ++i) out += c[i] * basis[i];
  return out;
}

template <std::size_t N>
std::array<Scalar, N> mapScalars(const std::array<Scalar, N>& a, const std::map<sym::ParamId, Rational>& v) {
  std::array<Scalar, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = sym::substitute(a[i], v);
  return out;
}

const std::array<long, 20>& w0() {
  static const std::array<long, 20> w{70, 42, 14, 70, 280, 70, 140, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  return w;
}

// d w / d lambda_k (k = 1..7), each a 20-vector.
std::array<long, 20> dw(int k) {
  std::array<long, 20> e{};
  switch (k) {
    case 1: e[7] = 1; e[8] = 20; e[9] = 10; e[10] = 30; break;
    case 2: e[11] = 1; e[12] = 6; break;
    case 3: e[13] = 1; e[14] = 6; break;
    case 4: e[15] = -2; e[16] = 1; break;
    case 5: e[17] = 1; break;
    case 6: e[18] = 1; break;
    case 7: e[19] = 1; break;
    default: throw std::out_of_range("lambda index");
  }
  return e;
}

constexpr std::size_t kRhoRow = 6;  // U^3 U_x

}  // namespace

// ---- parameters and model ---------------------------------------------------------

FPUTParameters FPUTParameters::symbolic() { return {P("alpha"), P("beta"), P("gamma")}; }

FPUTParameters FPUTParameters::numeric(const Rational& alpha, const Rational& beta, const Rational& gamma) {
  return {DiffPoly(alpha), DiffPoly(beta), DiffPoly(gamma)};
}

FPUTParameters FPUTParameters::toda(const Scalar& alpha) {
  return {alpha, Rational(2, 3) * sym::power(alpha, 2), Rational(1, 3) * sym::power(alpha, 3)};
}

Scalar ModelCoefficients::kappa() const {
  return sym::power(C[2], 2) * sym::invert(C[1] * C[3]);
}

ModelCoefficients fputToModel(const FPUTParameters& p, B18Choice b18) {
  if (p.alpha.isZero()) throw std::invalid_argument("fputToModel: alpha must be nonzero");
  const Scalar b = p.beta * sym::invert(sym::power(p.alpha, 2));
  const Scalar g = p.gamma * sym::invert(sym::power(p.alpha, 3));
  ModelCoefficients m;
  m.A = {60, 20, 90 * (2 * b - 1), 30};
  m.B = {420, 210, 42, 315 * (8 * b - 5), 630 * (12 * b - 7), 630 * (2 * b - 1), 210 * (48 * g - 60 * b + 23),
         0, 0, 0, 0, 210, 210 * (18 * b - 9), 0, 0, 105 * (12 * b - 10), 315,
         b18 == B18Choice::derived ? 630 : 0, 0, 0};
  m.C = {1, ratio(1, 24), ratio(1, 1920), ratio(1, 322560)};
  return m;
}

ModelCoefficients symbolicModel() {
  ModelCoefficients m;
  for (int i = 0; i < 4; ++i) m.A[i] = P(("A" + std::to_string(i + 1)).c_str());
  for (int i = 0; i < 20; ++i) m.B[i] = P(("B" + std::to_string(i + 1)).c_str());
  m.C = {P("C1"), P("C3"), P("C5"), P("C7")};
  return m;
}

ModelCoefficients substitute(const ModelCoefficients& m, const std::map<sym::ParamId, Rational>& values) {
  return {mapScalars(m.A, values), mapScalars(m.B, values), mapScalars(m.C, values)};
}

const DiffPoly& basis5(int i) { return basis5All().at(i - 1); }
const DiffPoly& basis7(int i) { return basis7All().at(i - 1); }
const DiffPoly& g2Piece(int i) { return g2All().at(i - 1); }
const DiffPoly& g4Piece(int k) { return g4All().at(k - 1); }

DiffPoly modelTerm(const ModelCoefficients& m, int order) {
  switch (order) {
    case 1: return m.C[0] * DiffPoly::u(1);
    case 3: return m.C[1] * sym::kdv(3);
    case 5: return m.C[2] * (DiffPoly::u(5) + combine(m.A, basis5All()));
    case 7: return m.C[3] * (DiffPoly::u(7) + combine(m.B, basis7All()));
    default: throw std::out_of_range("modelTerm: order must be 1, 3, 5 or 7");
  }
}

HSeries modelField(const ModelCoefficients& m) {
  HSeries f;
  f[0] = modelTerm(m, 1);
  f[2] = modelTerm(m, 3);
  f[4] = modelTerm(m, 5);
  f[6] = modelTerm(m, 7);
  return f;
}

Scalar coefficientOf(const DiffPoly& p, const DiffPoly& monomial) {
  if (monomial.size() != 1) throw std::invalid_argument("coefficientOf: expects a single term");
  sym::Factors target = monomial.begin()->first;
  target.params.clear();
  Scalar out;
  for (const auto& [f, c] : p) {
    sym::Factors bare = f;
    bare.params.clear();
    if (bare == target) out += DiffPoly::term(c, sym::Factors{f.params, {}, {}, {}});
  }
  return out * monomial.begin()->second.inverse();
}

ModelCoefficients modelFromField(const HSeries& f) {
  ModelCoefficients m;
  m.C[0] = coefficientOf(f[0], DiffPoly::u(1));
  require(f[0] == m.C[0] * DiffPoly::u(1), "modelFromField: order h^0 is not C1 U_x");
  m.C[1] = coefficientOf(f[2], DiffPoly::u(3));
  require(f[2] == m.C[1] * sym::kdv(3), "modelFromField: order h^2 is not C3 K3");

  m.C[2] = coefficientOf(f[4], DiffPoly::u(5));
  const DiffPoly r5 = (f[4] - m.C[2] * DiffPoly::u(5)) * sym::invert(m.C[2]);
  auto a = decompose(r5, basis5All(), "modelFromField: order h^4");
  for (int i = 0; i < 4; ++i) m.A[i] = a[i];

  m.C[3] = coefficientOf(f[6], DiffPoly::u(7));
  const DiffPoly r7 = (f[6] - m.C[3] * DiffPoly::u(7)) * sym::invert(m.C[3]);
  auto b = decompose(r7, basis7All(), "modelFromField: order h^6");
  for (int i = 0; i < 20; ++i) m.B[i] = b[i];
  return m;
}

// ---- first order ----------------------------------------------------------------------

FirstOrderResult solveFirstOrder(const ModelCoefficients& m) {
  if (m.C[1].isZero()) throw std::invalid_argument("solveFirstOrder: C3 must be nonzero");
  const auto& A = m.A;
  FirstOrderResult r;
  r.a = {Rational(1, 12) * (A[2] - A[0] - 10), Rational(1, 6) * (A[2] - A[1] - 20), Rational(1, 3) * (A[1] - 10),
         Rational(2, 3) * (10 - A[1])};
  r.tildeA = {A[2] + A[3] - 4 * A[1] + 10, 20 - 2 * A[1], A[1] - 10};
  const auto& a = r.a;

  require(A[0] + 12 * a[0] - 6 * a[1] - 3 * a[2] == DiffPoly(20), "first-order equation 1");
  require(A[1] - 3 * a[2] == DiffPoly(10), "first-order equation 2");
  require(A[2] - 6 * a[1] - 3 * a[2] == DiffPoly(30), "first-order equation 3");
  require(6 * a[2] - 6 * a[3] == 18 * a[2], "first-order equation 4");

  r.G2 = m.C[2] * sym::invert(m.C[1]) * combine(r.a, g2All());
  require(sym::average(r.G2).isZero(), "G2 has nonzero average");

  r.N5 = modelTerm(m, 5) + sym::lieBracket(r.G2, modelTerm(m, 3));
  const DiffPoly want = m.C[2] * (sym::kdv(5) + r.tildeA[0] * sym::parse("av(u^2)*u_x") +
                                  r.tildeA[1] * sym::parse("av(u)^2*u_x") + r.tildeA[2] * sym::parse("av(u)") * sym::kdv(3));
  require(r.N5 == want, "N5 = F5 + [G2, F3] differs from the KdV5 target by " + sym::print(r.N5 - want));
  return r;
}

// ---- R6 ---------------------------------------------------------------------------------

R6Result computeR6(const ModelCoefficients& m, const FirstOrderResult& f) {
  const auto& A = m.A;
  const auto& a = f.a;
  const Scalar half = ratio(1, 2);
  const Scalar s = A[2] + 2 * A[3] - 4 * A[1] + 10;
  R6Result r;
  auto& t = r.tildeB;
  t[0] = a[0] * (A[0] + 20) - 20 * a[1] - 15 * a[2];
  t[1] = a[0] * (A[1] + 10) - 10 * a[1] - 10 * a[2];
  t[2] = -5 * a[2];
  t[3] = a[0] * (A[2] + 30) - a[1] * (A[0] + 20) - Rational(1, 4) * a[2] * (A[0] + A[1] + 30);
  t[4] = 2 * a[0] * (A[2] + 30) - a[1] * (A[0] + 3 * A[1] + 50) - Rational(3, 2) * a[2] * (A[0] + A[1] + 30);
  t[5] = -half * (a[1] + 3 * a[2]) * (A[1] + 10);
  t[6] = -(a[1] + Rational(1, 3) * a[2]) * (A[2] + 30);
  t[7] = 5 * a[2];
  t[8] = (6 * a[0] - 3 * a[1]) * (A[1] - 10) + Rational(3, 2) * a[2] * (A[0] - A[1] + 30) - half * a[3] * (A[0] + 20);
  t[9] = 30 * a[2] - half * a[3] * (A[1] + 10);
  t[10] = half * (6 * a[1] + 3 * a[2]) * (10 - A[1]) + half * (a[2] - 2 * a[3]) * (A[2] + 30);
  t[11] = half * (a[1] - a[2]) * (A[1] + 10);
  t[12] = (a[1] - a[2]) * (A[2] + 30);
  t[13] = a[2] * (2 * A[1] - 10) + half * a[3] * (A[1] + 10);
  t[14] = (a[2] + a[3]) * (A[2] + 30) + 3 * (a[2] - a[3]) * (A[1] - 10);
  t[15] = (half * a[2] - a[1]) * s - Rational(1, 6) * a[2] * (A[2] + 30);
  t[16] = a[0] * s + Rational(1, 4) * a[2] * (3 * A[1] - A[0] + 10);
  t[17] = (a[1] - Rational(3, 2) * a[2] - a[3]) * s + (3 * a[1] - Rational(9, 2) * a[2]) * (A[1] - 10);
  t[18] = (a[2] + a[3]) * (A[2] + 2 * A[3] - A[1] - 20);
  t[19] = half * (a[1] - a[2]) * (A[0] - 2 * A[1]);

  require((t[3] - half * t[4] + t[5] + t[19]).isZero(), "tilde-B zero-average identity");

  r.R6 = half * sym::lieBracket(f.G2, modelTerm(m, 5) + f.N5);
  const DiffPoly want = sym::power(m.C[2], 2) * sym::invert(m.C[1]) * combine(t, basis7All());
  require(r.R6 == want, "R6 differs from the tilde-B form by " + sym::print(r.R6 - want));
  return r;
}

// ---- linear system ------------------------------------------------------------------

const LinearSystem& buildLinearSystem() {
  static const LinearSystem ls = [] {
    LinearSystem s;
    s.M = RationalMatrix{
        {60, -6, -3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},   {24, 0, -3, 0, 0, -3, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, -3, 0, 0, 0, 0, 0, 0, 0},     {0, 6, 0, -6, -3, -18, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 12, -18, -6, -72, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, -3, -21, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, -6, -2, -18, 0, 0, 0, 0, 0, 0, 0},  {0, 0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 54, 12, -6, -3, 0, 0, 0, 0},  {0, 0, 0, 0, 0, 24, 0, 0, -3, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 36, 0, -6, -3, 0, 0, 0, 0},   {0, 0, 0, 0, 3, -3, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 6, -18, 0, 0, 0, 0, -6, 0, 0},   {0, 0, 0, 0, 0, 0, 0, 0, 3, 0, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 6, -6, 0, 0, 0},     {0, 0, 0, 6, -10, -18, 0, 0, 0, 0, 0, 0, -6},
        {0, 6, -6, 0, 3, 6, 0, 0, 0, 0, 0, -6, 0},    {0, 0, 0, 0, 6, 18, 0, 6, -9, 0, 6, 0, 0},
        {0, 0, 0, 0, 0, 0, 0, 0, 6, 6, 0, 0, 0},      {0, -6, 6, -3, 3, 3, 0, 0, 0, 0, 0, 6, 3},
    };
    const RationalMatrix V{
        {0, 0, -14, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3, 6, 0, 0, 6},
        {0, 0, 32, 0, 0, 0, 0, 0, 0, 4, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0},
        {0, 0, -48, 0, 0, 4, 0, 0, 0, -4, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0},
        {0, 0, 8, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0},
        {0, 0, -8, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
        {24, -60, 170, 24, -9, -8, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    };
    for (std::size_t i = 0; i < V.rows(); ++i) {
      RationalVector row(V.cols());
      for (std::size_t j = 0; j < V.cols(); ++j) row[j] = V(i, j);
      s.v.push_back(row);
    }
    s.rankM = rank(s.M);
    s.kernelDimension = s.M.rows() - s.rankM;
    const RationalMatrix vm = V * s.M;
    s.vAnnihilateM = vm == RationalMatrix(vm.rows(), vm.cols());
    s.vIndependent = rank(V) == V.rows();
    s.vSpanKernel = s.vAnnihilateM && s.vIndependent && s.kernelDimension == V.rows();

    s.bracketM = RationalMatrix(20, 13);
    bool exact = true;
    for (int k = 0; k < 13; ++k) {
      const DiffPoly br = sym::lieBracket(g4All()[k], sym::kdv(3));
      DiffPoly rebuilt;
      for (int i = 0; i < 20; ++i) {
        const DiffPoly c = coefficientOf(br, basis7All()[i]);
        const auto q = c.asRational();
        if (!q) exact = false;
        s.bracketM(i, k) = q.value_or(Rational(0));
        rebuilt += c * basis7All()[i];
      }
      exact = exact && rebuilt == br;
    }
    s.matchesBrackets = exact && s.bracketM == s.M;

    s.square = RationalMatrix(20, 20);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t k = 0; k < 13; ++k) s.square(i, k) = s.M(i, k);
    const int lambdaCols[6] = {1, 2, 3, 5, 6, 7};
    for (int c = 0; c < 6; ++c) {
      const auto e = dw(lambdaCols[c]);
      for (std::size_t i = 0; i < 20; ++i) s.square(i, 13 + c) = Rational(-e[i]);
    }
    s.square(kRhoRow, 19) = Rational(-1);
    s.squareDeterminant = determinant(s.square);
    return s;
  }();
  return ls;
}

std::array<Scalar, 20> targetVector(const std::array<Scalar, 7>& lambda) {
  std::array<Scalar, 20> w;
  for (int i = 0; i < 20; ++i) w[i] = w0()[i];
  for (int k = 1; k <= 7; ++k) {
    const auto e = dw(k);
    for (int i = 0; i < 20; ++i)
      if (e[i] != 0) w[i] += Rational(e[i]) * lambda[k - 1];
  }
  return w;
}

Scalar obstruction(const ModelCoefficients& m) {
  const auto& A = m.A;
  const auto& B = m.B;
  return 1680 - 72 * B[0] + 180 * B[1] - 510 * B[2] - 72 * B[3] + 27 * B[4] + 24 * B[5] - 9 * B[6] +
         m.kappa() * (-2400 + 6 * A[0] * A[0] + 670 * A[1] - 30 * A[0] * A[1] - 4 * A[1] * A[1] - 60 * A[2] +
                      3 * A[0] * A[2] - A[1] * A[2]);
}

Scalar obstructionAsPrinted(const ModelCoefficients& m) {
  const auto& A = m.A;
  const auto& B = m.B;
  return 1680 - 72 * B[0] + 180 * B[1] - 510 * B[2] - 72 * B[2] + 27 * B[4] - 72 * B[3] + 27 * B[4] + 24 * B[5] -
         9 * B[6] +
         m.kappa() * (-2400 + 6 * A[0] * A[0] + 670 * A[1] - 30 * A[0] * A[1] - 4 * A[1] * A[1] - 60 * A[2] +
                      3 * A[0] * A[2] - A[1] * A[2]);
}

Scalar orthogonalityResidual(const ModelCoefficients& m, const std::array<Scalar, 20>& tildeB,
                             const std::array<Scalar, 7>& lambda, int j) {
  const auto& v = buildLinearSystem().v.at(j - 1);
  const auto w = targetVector(lambda);
  const Scalar kappa = m.kappa();
  Scalar out;
  for (int i = 0; i < 20; ++i)
    if (!v[i].isZero()) out += v[i] * (m.B[i] + kappa * tildeB[i] - w[i]);
  return out;
}

std::array<Scalar, 7> lambdaFormulas(const ModelCoefficients& m, const Scalar& lambda4) {
  const auto& A = m.A;
  const auto& B = m.B;
  const Scalar k = m.kappa();
  auto b = [&](int i) -> const Scalar& { return B[i - 1]; };
  std::array<Scalar, 7> l;
  l[0] = -14 + b(3) + b(8);
  l[1] = 42 + b(12) - 8 * b(3) + b(6) - Rational(2, 3) * k * (A[1] - 10) * (A[1] - 10);
  l[2] = 28 + b(10) + b(14) - 2 * b(3) - 10 * b(8) + Rational(2, 3) * k * (100 - 20 * A[1] + A[1] * A[1]);
  l[3] = lambda4;
  l[4] = 10 * b(3) - 2 * b(6) + 10 * b(8) - 4 * b(10) + b(11) - 6 * b(12) + b(13) + b(18) +
         k * (-100 + 40 * A[1] - A[1] * A[1] - 10 * A[2] - Rational(2, 3) * A[1] * A[2] +
              Rational(1, 3) * A[2] * A[2] - 10 * A[3] + Rational(1, 3) * A[2] * A[3]);
  l[5] = -56 + 4 * b(3) + 20 * b(8) - 2 * b(10) - 6 * b(14) + b(15) + b(19) +
         Rational(2, 3) * k * (-100 + A[1] * A[1] + 10 * A[2] - A[1] * A[2] + 10 * A[3] - A[1] * A[3]);
  l[6] = ratio(28, 3) + Rational(1, 2) * b(16) + b(17) + b(20) - Rational(7, 3) * b(3) + Rational(1, 3) * b(6) +
         Rational(1, 18) * k * (-300 + 70 * A[1] - A[1] * A[1] - A[1] * A[2] - 3 * A[0] * A[3] + 6 * A[1] * A[3]);
  return l;
}

// ---- second order -----------------------------------------------------------------------

SecondOrderResult solveSecondOrder(const ModelCoefficients& m, const FirstOrderResult& f, const Scalar& lambda4) {
  if (m.C[1].isZero() || m.C[2].isZero() || m.C[3].isZero())
    throw std::invalid_argument("solveSecondOrder: C3, C5, C7 must be nonzero");
  const LinearSystem& ls = buildLinearSystem();
  static const RationalMatrix qInv = [] {
    auto inv = inverse(buildLinearSystem().square);
    if (!inv) throw VerificationError("square system is singular");
    return *inv;
  }();

  SecondOrderResult s;
  R6Result r6 = computeR6(m, f);
  s.tildeB = r6.tildeB;
  s.R6 = std::move(r6.R6);

  const Scalar kappa = m.kappa();
  const auto e4 = dw(4);
  std::array<Scalar, 20> rhs;
  for (int i = 0; i < 20; ++i) rhs[i] = Rational(w0()[i]) + Rational(e4[i]) * lambda4 - m.B[i] - kappa * s.tildeB[i];

  std::array<Scalar, 20> x;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j)
      if (!qInv(i, j).isZero()) x[i] += qInv(i, j) * rhs[j];

  for (int k = 0; k < 13; ++k) s.b[k] = x[k];
  s.lambda = {x[13], x[14], x[15], lambda4, x[16], x[17], x[18]};
  s.rho = x[19];
  s.r = obstruction(m);

  const auto expected = lambdaFormulas(m, lambda4);
  for (int k = 0; k < 7; ++k)
    require(s.lambda[k] == expected[k], "lambda" + std::to_string(k + 1) + " differs from the closed form: solved " +
                                            sym::print(s.lambda[k]) + ", formula " + sym::print(expected[k]));
  for (int j = 1; j <= 6; ++j)
    require(orthogonalityResidual(m, s.tildeB, s.lambda, j).isZero(),
            "orthogonality condition " + std::to_string(j) + " fails");
  require(-3 * orthogonalityResidual(m, s.tildeB, s.lambda, 7) == s.r, "j = 7 condition does not reproduce r");
  require(-9 * s.rho == s.r, "rho is not -r/9");

  s.G4 = m.C[3] * sym::invert(m.C[1]) * combine(s.b, g4All());
  // Pieces 12 and 13 are pure averages, so <G4> = (C7/C3)(b12 <U_x^2> + b13 <U^3>).
  s.N7 = modelTerm(m, 7) + s.R6 + sym::lieBracket(s.G4, modelTerm(m, 3));

  const auto& l = s.lambda;
  const DiffPoly want =
      m.C[3] * (sym::kdv(7) + l[0] * sym::parse("av(u)") * sym::kdv(5) + l[1] * sym::parse("av(u^2)") * sym::kdv(3) +
                l[2] * sym::parse("av(u)^2") * sym::kdv(3) + l[3] * sym::parse("(av(u_x^2) - 2*av(u^3))*u_x") +
                l[4] * sym::parse("av(u)*av(u^2)*u_x") + l[5] * sym::parse("av(u)^3*u_x") +
                l[6] * sym::parse("av(u_x^3)") + s.rho * sym::parse("u^3*u_x"));
  require(s.N7 == want, "N7 differs from the KdV7 target by " + sym::print(s.N7 - want));
  return s;
}

// ---- conserved coefficients ---------------------------------------------------------------

namespace {

HSeries series(std::initializer_list<std::pair<int, DiffPoly>> parts) {
  HSeries s;
  for (const auto& [e, c] : parts) s[e] += c;
  return s;
}

}  // namespace

ConservedCoefficients conservedCoefficients(const ModelCoefficients& m, const FirstOrderResult& f,
                                            const SecondOrderResult& s) {
  const DiffPoly u1 = sym::parse("av(u)"), u2 = sym::parse("av(u^2)"), u3 = sym::parse("av(u^3)"),
                 ux2 = sym::parse("av(u_x^2)");
  const auto& tA = f.tildeA;
  const auto& l = s.lambda;
  const auto& C = m.C;
  ConservedCoefficients cc;
  cc.C[0] = series({{0, C[0]},
                    {4, C[2] * (tA[0] * u2 + tA[1] * u1 * u1)},
                    {6, C[3] * (l[3] * (ux2 - 2 * u3) + l[4] * u1 * u2 + l[5] * u1 * u1 * u1)}});
  cc.C[1] = series({{0, C[1]}, {2, C[2] * tA[2] * u1}, {4, C[3] * (l[1] * u2 + l[2] * u1 * u1)}});
  cc.C[2] = series({{0, C[2]}, {2, C[3] * l[0] * u1}});
  cc.C[3] = series({{0, C[3]}});

  for (const auto& c : cc.C) require(isPureAverage(c), "conserved coefficient has a non-averaged factor");
  const HSeries field = normalizedField(cc, m, s, true);
  const HSeries target = series({{0, modelTerm(m, 1)}, {2, modelTerm(m, 3)}, {4, f.N5}, {6, s.N7}});
  require(field == target, "conserved coefficients do not rebuild the normalized field");
  return cc;
}

ConservedCoefficients conservedCoefficientsProductForm(const ModelCoefficients& m, const FirstOrderResult& f,
                                                       const SecondOrderResult& s) {
  const DiffPoly u1 = sym::parse("av(u)"), u2 = sym::parse("av(u^2)"), u3 = sym::parse("av(u^3)"),
                 ux2 = sym::parse("av(u_x^2)");
  const auto& tA = f.tildeA;
  const auto& l = s.lambda;
  const auto& C = m.C;
  ConservedCoefficients cc;
  cc.C[0] = series({{0, C[0]},
                    {4, C[0] * (tA[0] * u2 + tA[1] * u1 * u1)},
                    {6, C[0] * (l[3] * (ux2 - 2 * u3) + l[4] * u1 * u2 + l[5] * u1 * u1 * u1)}});
  cc.C[1] = series({{0, C[1]}, {2, C[1] * tA[2] * u1}, {4, C[1] * (l[1] * u2 + l[2] * u1 * u1)}});
  cc.C[2] = series({{0, C[2]}, {2, C[2] * l[0] * u1}});
  cc.C[3] = series({{0, C[3]}});
  return cc;
}

bool isPureAverage(const HSeries& s) {
  for (int e = 0; e < HSeries::kTruncation; e += 2)
    if (!s[e].isConstant()) return false;
  return true;
}

HSeries normalizedField(const ConservedCoefficients& cc, const ModelCoefficients& m, const SecondOrderResult& s,
                        bool includeDrift) {
  HSeries f = cc.C[0] * HSeries(sym::kdv(1)) + cc.C[1] * HSeries::monomial(2, sym::kdv(3)) +
              cc.C[2] * HSeries::monomial(4, sym::kdv(5)) + cc.C[3] * HSeries::monomial(6, sym::kdv(7));
  DiffPoly residual = s.rho * sym::parse("u^3*u_x");
  if (includeDrift) residual += s.lambda[6] * sym::parse("av(u_x^3)");
  f[6] += m.C[3] * residual;
  return f;
}

HSeries transformField(const ModelCoefficients& m, const FirstOrderResult& f, const SecondOrderResult& s) {
  const HSeries F = modelField(m);
  const HSeries g2 = HSeries::monomial(2, f.G2);
  HSeries out = F, term = F;
  for (int k = 1; k <= 3; ++k) {
    term = sym::lieBracket(g2, term) * Rational(1, k);
    out += term;
  }
  return out + sym::lieBracket(HSeries::monomial(4, s.G4), out);
}

}  // namespace fputlab::nf
