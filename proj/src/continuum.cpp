#include "fputlab/continuum.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fputlab/hierarchy.hpp"

namespace fputlab::continuum {

namespace {

template <class Real>
using G = BasicGrid<Real>;

template <class Real>
G<Real> d(const G<Real>& f, int m) {
  return spectral::deriv(f, m);
}

void requireOrder(int order, std::initializer_list<int> allowed, const char* what) {
  for (int a : allowed)
    if (a == order) return;
  throw std::invalid_argument(std::string(what) + ": unsupported order " + std::to_string(order));
}

// i (xi - h^2 xi^3/24 + h^4 xi^5/1920 - h^6 xi^7/322560), truncated at h^order:
// the Fourier symbol of the expanded D_h.
template <class Real>
std::complex<Real> expandedDhSymbol(long k, Real h, int order) {
  const Real xi = 2 * std::numbers::pi_v<Real> * Real(k);
  const Real x2 = xi * xi * h * h;
  Real s = 1;
  if (order >= 2) s += -x2 / 24;
  if (order >= 4) s += x2 * x2 / 1920;
  if (order >= 6) s += -x2 * x2 * x2 / 322560;
  return {0, xi * s};
}

template <class Real>
G<Real> expandedDh(const G<Real>& f, Real h, int order) {
  return spectral::applyMultiplier(f, [&](long k) { return expandedDhSymbol(k, h, order); }, order >= 2);
}

// Nonlinear part of F(X, Y) through h^order; depends on Z = X + Y only.
template <class Real>
G<Real> expandedNonlinear(const G<Real>& Z, Real h, const Potential& w, int order) {
  G<Real> out(Z.size());
  if (order < 2) return out;
  const Real a = Real(w.alpha), b = Real(w.taylorBeta()), g = Real(w.taylorGamma());
  const G<Real> Z2 = Z * Z;
  const Real h2 = h * h, h4 = h2 * h2, h6 = h4 * h2;
  out.axpy(h2 / 8, d(Z2, 1));
  if (order >= 4) {
    const G<Real> Z3 = Z2 * Z;
    out.axpy(h4 / 192, d(Z2, 3));
    out.axpy(h4 * b / (32 * a * a), d(Z3, 1));
    if (order >= 6) {
      out.axpy(h6 / 15360, d(Z2, 5));
      out.axpy(h6 * b / (768 * a * a), d(Z3, 3));
      out.axpy(h6 * g / (128 * a * a * a), d(Z3 * Z, 1));
    }
  }
  return out;
}

template <class Real>
void requireAlpha(const Potential& w) {
  if (w.alpha == 0) throw std::invalid_argument("continuum fields need alpha != 0");
}

}  // namespace

// ---- Riemann invariants ---------------------------------------------------------

RiemannState toRiemann(const GridFunction& u, const GridFunction& v, double h, double alpha) {
  if (alpha == 0) throw std::invalid_argument("toRiemann: alpha must be nonzero");
  if (!(h > 0)) throw std::invalid_argument("toRiemann: h must be positive");
  const GridFunction du = applyDh(u, h);
  return {2 * alpha * (du + v), 2 * alpha * (du - v), h, alpha};
}

ProfilePair fromRiemann(const RiemannState& s, double uMean) {
  if (s.alpha == 0) throw std::invalid_argument("fromRiemann: alpha must be nonzero");
  const double pi = std::numbers::pi;
  const GridFunction v = (s.U - s.V) * (1 / (4 * s.alpha));
  const GridFunction du = (s.U + s.V) * (1 / (4 * s.alpha));
  GridFunction u = spectral::applyMultiplier(du, [&](long k) {
    const double m = 2 * std::sin(pi * double(k) * s.h) / s.h;
    return std::abs(m) < 1e-12 ? std::complex<double>(0) : std::complex<double>(0, -1 / m);
  });
  u += uMean - u.mean();
  return {std::move(u), v};
}

// ---- two-wave fields ------------------------------------------------------------

template <class Real>
G<Real> nonlinearPart(const G<Real>& z, Real h, const Potential& w) {
  requireAlpha<Real>(w);
  const Real a = Real(w.alpha);
  const Real scale = h * h / (4 * a);
  G<Real> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = 2 * a / (h * h) * w.nonlinearForce(scale * z[i]);
    if (!std::isfinite(out[i])) throw std::overflow_error("nonlinear force is not finite");
  }
  return out;
}

template <class Real>
FieldPair<Real> rhsExact(const G<Real>& U, const G<Real>& V, Real h, const Potential& w) {
  const G<Real> f = nonlinearPart(U + V, h, w);
  return {applyDh(U + f, h), -applyDh(V + f, h)};
}

FieldPair<double> rhsExact(const RiemannState& s, const Potential& w) {
  if (s.alpha != w.alpha) throw std::invalid_argument("rhsExact: state and potential disagree on alpha");
  return rhsExact(s.U, s.V, s.h, w);
}

template <class Real>
FieldPair<Real> rhsExpanded(const G<Real>& U, const G<Real>& V, Real h, const Potential& w, int order) {
  requireOrder(order, {0, 2, 4, 6}, "rhsExpanded");
  requireAlpha<Real>(w);
  const G<Real> nl = expandedNonlinear(U + V, h, w, order);
  return {expandedDh(U, h, order) + nl, -(expandedDh(V, h, order) + nl)};
}

FieldPair<double> rhsExpanded(const RiemannState& s, const Potential& w, int order) {
  return rhsExpanded(s.U, s.V, s.h, w, order);
}

template <class Real>
FieldPair<Real> rhsUV(const G<Real>& u, const G<Real>& v, Real h, const Potential& w) {
  if (!(h > 0)) throw std::invalid_argument("rhsUV: h must be positive");
  const Real pi = std::numbers::pi_v<Real>;
  // h^-2 (u(x+h) - 2u(x) + u(x-h)), symbol -4 sin^2(pi k h) / h^2
  G<Real> vt = spectral::applyMultiplier(u, [&](long k) {
    const Real s = std::sin(pi * Real(k) * h);
    return std::complex<Real>(-4 * s * s / (h * h));
  });
  const G<Real> right = spectral::forwardDifference(u, h);
  const G<Real> left = -spectral::forwardDifference(u, -h);
  for (std::size_t i = 0; i < u.size(); ++i)
    vt[i] += (w.nonlinearForce(h * right[i]) - w.nonlinearForce(h * left[i])) / (h * h * h);
  return {v, vt};
}

template <class Real>
G<Real> rhsVExpansion(const G<Real>& u, Real h, const Potential& w, int order) {
  requireOrder(order, {0, 2, 4, 6}, "rhsVExpansion");
  const Real a = Real(w.alpha), b = Real(w.taylorBeta()), g = Real(w.taylorGamma());
  std::vector<G<Real>> D;
  for (int m = 0; m <= 8; ++m) D.push_back(d(u, m));
  const Real h2 = h * h;
  G<Real> out = D[2];
  if (order >= 2) {
    G<Real> t = Real(1) / 12 * D[4];
    t.axpy(2 * a, D[1] * D[2]);
    out.axpy(h2, t);
  }
  if (order >= 4) {
    G<Real> t = Real(1) / 360 * D[6];
    t.axpy(a / 3, D[2] * D[3]);
    t.axpy(a / 6, D[1] * D[4]);
    t.axpy(3 * b, D[1] * D[1] * D[2]);
    out.axpy(h2 * h2, t);
  }
  if (order >= 6) {
    G<Real> t = Real(1) / 20160 * D[8];
    t.axpy(a / 36, D[3] * D[4]);
    t.axpy(a / 60, D[2] * D[5]);
    t.axpy(a / 180, D[1] * D[6]);
    t.axpy(b / 4, D[2] * D[2] * D[2]);
    t.axpy(b, D[1] * D[2] * D[3]);
    t.axpy(b / 4, D[1] * D[1] * D[4]);
    t.axpy(4 * g, D[1] * D[1] * D[1] * D[2]);
    out.axpy(h2 * h2 * h2, t);
  }
  return out;
}

// ---- slaving relation and reduced field ----------------------------------------

template <class Real>
G<Real> slavingC(const G<Real>& U, Real h, const Potential& w, bool includeC4) {
  requireAlpha<Real>(w);
  const G<Real> U2 = U * U;
  G<Real> c = (Real(1) / 16) * (-U2 + U2.mean());
  c *= h * h;
  if (includeC4) {
    const Real a = Real(w.alpha), b = Real(w.taylorBeta());
    const Real k = Real(5) / 384 - b / (64 * a * a);
    const G<Real> U3 = U2 * U;
    const G<Real> Ux = d(U, 1);
    const G<Real> Ux2 = Ux * Ux;
    G<Real> c4 = k * (U3 - U3.mean());
    c4.axpy(-U2.mean() / 128, U - U.mean());
    c4.axpy(Real(-1) / 256, Ux2 - Ux2.mean());
    c.axpy(h * h * h * h, c4);
  }
  return c;
}

template <class Real>
G<Real> slavingCPrime(const G<Real>& U, const G<Real>& Gd, Real h, const Potential& w, bool includeC4) {
  requireAlpha<Real>(w);
  const G<Real> UG = U * Gd;
  G<Real> c = (Real(1) / 8) * (-UG + UG.mean());
  c *= h * h;
  if (includeC4) {
    const Real a = Real(w.alpha), b = Real(w.taylorBeta());
    const Real k = Real(5) / 384 - b / (64 * a * a);
    const G<Real> U2G = U * UG;
    const G<Real> UxGx = d(U, 1) * d(Gd, 1);
    G<Real> c4 = (3 * k) * (U2G - U2G.mean());
    c4.axpy(-2 * UG.mean() / 128, U - U.mean());
    c4.axpy(-(U * U).mean() / 128, Gd - Gd.mean());
    c4.axpy(Real(-2) / 256, UxGx - UxGx.mean());
    c.axpy(h * h * h * h, c4);
  }
  return c;
}

template <class Real>
G<Real> rhsReduced(const G<Real>& U, Real h, const Potential& w, int order) {
  requireOrder(order, {0, 2, 4, 6}, "rhsReduced");
  requireAlpha<Real>(w);
  const Real a = Real(w.alpha);
  const Real b = Real(w.taylorBeta()) / (a * a), g = Real(w.taylorGamma()) / (a * a * a);
  std::vector<G<Real>> D;
  for (int m = 0; m <= std::max(1, order + 1); ++m) D.push_back(d(U, m));
  const Real h2 = h * h;
  G<Real> out = D[1];
  if (order >= 2) out.axpy(h2 / 24, D[3] + 6 * (D[0] * D[1]));
  if (order >= 4) {
    G<Real> t = D[5];
    t.axpy(60, D[1] * D[2]);
    t.axpy(20, D[0] * D[3]);
    t.axpy(90 * (2 * b - 1), D[0] * D[0] * D[1]);
    t.axpy(30 * (D[0] * D[0]).mean(), D[1]);
    out.axpy(h2 * h2 / 1920, t);
  }
  if (order >= 6) {
    const Real m1 = D[0].mean(), m2 = (D[0] * D[0]).mean(), m3 = (D[0] * D[0] * D[0]).mean(),
               mx2 = (D[1] * D[1]).mean();
    G<Real> t = D[7];
    t.axpy(420, D[2] * D[3]);
    t.axpy(210, D[1] * D[4]);
    t.axpy(42, D[0] * D[5]);
    t.axpy(315 * (8 * b - 5), D[1] * D[1] * D[1]);
    t.axpy(630 * (12 * b - 7), D[0] * D[1] * D[2]);
    t.axpy(630 * (2 * b - 1), D[0] * D[0] * D[3]);
    t.axpy(210 * (48 * g - 60 * b + 23), D[0] * D[0] * D[0] * D[1]);
    t.axpy(210 * m2, D[3] + (18 * b - 9) * (D[0] * D[1]));
    t.axpy(105 * (3 * mx2 + (12 * b - 10) * m3 + 6 * m2 * m1), D[1]);
    out.axpy(h2 * h2 * h2 / 322560, t);
  }
  return out;
}

template <class Real>
G<Real> invarianceResidualField(const G<Real>& U, Real h, const Potential& w, bool includeC4) {
  const G<Real> c = slavingC(U, h, w, includeC4);
  const FieldPair<Real> f = rhsExpanded(U, c, h, w, 6);
  return slavingCPrime(U, f.U, h, w, includeC4) - f.V;
}

template <class Real>
ResidualNorms invarianceResidual(const G<Real>& U, Real h, const Potential& w, bool includeC4) {
  const G<Real> r = invarianceResidualField(U, h, w, includeC4);
  return {double(r.maxAbs()), double(r.rms())};
}

// ---- KdV hierarchy ----------------------------------------------------------------

template <class Real>
G<Real> kdvField(const G<Real>& U, int which) {
  requireOrder(which, {1, 3, 5, 7}, "kdvField");
  std::vector<G<Real>> D;
  for (int m = 0; m <= which; ++m) D.push_back(d(U, m));
  G<Real> out = D[which];
  switch (which) {
    case 3:
      out.axpy(6, D[0] * D[1]);
      break;
    case 5:
      out.axpy(20, D[1] * D[2]);
      out.axpy(10, D[0] * D[3]);
      out.axpy(30, D[0] * D[0] * D[1]);
      break;
    case 7:
      out.axpy(70, D[2] * D[3]);
      out.axpy(42, D[1] * D[4]);
      out.axpy(14, D[0] * D[5]);
      out.axpy(70, D[1] * D[1] * D[1]);
      out.axpy(280, D[0] * D[1] * D[2]);
      out.axpy(70, D[0] * D[0] * D[3]);
      out.axpy(140, D[0] * D[0] * D[0] * D[1]);
      break;
    default:
      break;
  }
  return out;
}

KdVIntegrals kdvIntegrals(const GridFunction& U) {
  const GridFunction Ux = d(U, 1);
  return {U.mean(), (U * U).mean(), (Ux * Ux - 2.0 * (U * U * U)).mean()};
}

// ---- symbolic expressions on the grid --------------------------------------------

namespace {

class Evaluator {
 public:
  Evaluator(const GridFunction& U, const ParamValues& params) : U_(U), params_(params) {}

  const GridFunction& derivative(int m) {
    while (static_cast<int>(D_.size()) <= m) D_.push_back(d(U_, static_cast<int>(D_.size())));
    return D_[m];
  }

  GridFunction local(const sym::Orders& orders) {
    GridFunction out(U_.size(), 1.0);
    for (int k : orders) out *= derivative(k);
    return out;
  }

  double scalarPart(const Rational& coeff, const sym::Factors& f) {
    double c = coeff.toDouble();
    for (const auto& [id, e] : f.params) {
      auto it = params_.find(id);
      if (it == params_.end())
        throw std::invalid_argument("evaluate: no value for parameter " + sym::paramName(id));
      c *= std::pow(it->second, e);
    }
    for (const auto& a : f.averages) c *= local(a).mean();
    return c;
  }

  GridFunction term(const Rational& coeff, const sym::Factors& f) {
    GridFunction out = local(f.derivs);
    for (const auto& p : f.primitives) out *= spectral::antiderivative(local(p));
    return out *= scalarPart(coeff, f);
  }

 private:
  const GridFunction& U_;
  const ParamValues& params_;
  std::vector<GridFunction> D_;
};

}  // namespace

GridFunction evaluate(const sym::DiffPoly& p, const GridFunction& U, const ParamValues& params) {
  Evaluator ev(U, params);
  GridFunction out(U.size());
  for (const auto& [f, c] : p) out += ev.term(c, f);
  return out;
}

GridFunction evaluate(const sym::HSeries& s, const GridFunction& U, double h, const ParamValues& params) {
  GridFunction out(U.size());
  double hp = 1;
  for (int e = 0; e < sym::HSeries::kTruncation; e += 2, hp *= h * h)
    if (!s[e].isZero()) out.axpy(hp, evaluate(s[e], U, params));
  return out;
}

GridFunction evaluateDirectional(const sym::DiffPoly& p, const GridFunction& U, const GridFunction& V,
                                 const ParamValues& params) {
  for (const auto& [f, c] : p)
    if (f.degree() > 4) throw std::invalid_argument("evaluateDirectional: degree above 4");
  // Scale the step to the size of U so the stencil values stay O(|U|).
  const double vs = V.maxAbs();
  if (vs == 0) return GridFunction(U.size());
  const double e = std::max(U.maxAbs(), 1.0) / vs;
  auto at = [&](double t) { return evaluate(p, U + (t * e) * V, params); };
  GridFunction out = at(-2 * 1.0);
  out.axpy(-8, at(-1));
  out.axpy(8, at(1));
  out.axpy(-1, at(2));
  return out *= 1 / (12 * e);
}

double evaluateScalar(const sym::DiffPoly& p, const GridFunction& U, const ParamValues& params) {
  if (!p.isConstant()) throw std::invalid_argument("evaluateScalar: expression depends on x");
  Evaluator ev(U, params);
  double s = 0;
  for (const auto& [f, c] : p) s += ev.scalarPart(c, f);
  return s;
}

// ---- normal form ----------------------------------------------------------------

namespace {

double numeric(const sym::DiffPoly& p, const char* what) {
  if (p.isZero()) return 0;
  const auto r = p.asRational();
  if (!r) throw std::invalid_argument(std::string("normal form data: ") + what + " is not numeric");
  return r->toDouble();
}

}  // namespace

NormalFormData normalFormData(const nf::ModelCoefficients& m, const nf::FirstOrderResult& f,
                              const nf::SecondOrderResult& s, const nf::ConservedCoefficients& cc) {
  NormalFormData d;
  d.C = cc.C;
  d.rho = numeric(s.rho, "rho");
  d.C7 = numeric(m.C[3], "C7");
  d.lambda7 = numeric(s.lambda[6], "lambda7");
  d.G2 = f.G2;
  d.G4 = s.G4;
  return d;
}

NormalFormData normalFormData(const nf::FPUTParameters& p, const Rational& lambda4) {
  const auto m = nf::fputToModel(p);
  const auto f = nf::solveFirstOrder(m);
  const auto s = nf::solveSecondOrder(m, f, lambda4);
  return normalFormData(m, f, s, nf::conservedCoefficients(m, f, s));
}

namespace {

std::array<double, 4> conservedValues(const GridFunction& U, double h, const NormalFormData& d) {
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    double hp = 1;
    for (int e = 0; e < sym::HSeries::kTruncation; e += 2, hp *= h * h)
      if (!d.C[i][e].isZero()) out[i] += hp * evaluateScalar(d.C[i][e], U, d.params);
  }
  return out;
}

}  // namespace

GridFunction rhsNormalized(const GridFunction& U, double h, const NormalFormData& data) {
  const auto C = conservedValues(U, h, data);
  const double h2 = h * h;
  GridFunction out = C[0] * kdvField(U, 1);
  out.axpy(h2 * C[1], kdvField(U, 3));
  out.axpy(h2 * h2 * C[2], kdvField(U, 5));
  GridFunction top = kdvField(U, 7);
  if (data.rho != 0) top.axpy(data.rho, U * U * U * d(U, 1));
  out.axpy(h2 * h2 * h2 * C[3], top);
  return out;
}

double normalizedDriftRate(const GridFunction& U, double h, const NormalFormData& data) {
  const GridFunction Ux = d(U, 1);
  return -std::pow(h, 6) * data.C7 * data.lambda7 * (Ux * Ux * Ux).mean();
}

GridFunction applyNormalCoordinates(const GridFunction& U, const NormalFormData& data, double h, Direction dir) {
  const double h2 = h * h, h4 = h2 * h2;
  const GridFunction g2 = evaluate(data.G2, U, data.params);
  const GridFunction g4 = evaluate(data.G4, U, data.params);
  const GridFunction g22 = evaluateDirectional(data.G2, U, g2, data.params);
  GridFunction out = U;
  if (dir == Direction::forward) {
    out.axpy(h2, g2);
    out.axpy(h4, g4 + 0.5 * g22);
  } else {
    out.axpy(-h2, g2);
    out.axpy(h4, 0.5 * g22 - g4);
  }
  return out;
}

// ---- flows ----------------------------------------------------------------------

const char* fieldKindName(FieldKind k) {
  switch (k) {
    case FieldKind::exact: return "exact";
    case FieldKind::expanded: return "expanded";
    case FieldKind::reduced: return "reduced";
    case FieldKind::kdv: return "kdv";
    case FieldKind::normalized: return "normalized";
  }
  return "?";
}

std::string FlowSpec::describe() const {
  std::ostringstream os;
  os << fieldKindName(field);
  if (field == FieldKind::expanded || field == FieldKind::reduced) os << "(" << order << ")";
  if (field == FieldKind::kdv) os << "(K" << kdvWhich << ")";
  return os.str();
}

namespace {

using Cplx = std::complex<double>;
using Spec = spectral::Spectrum<double>;

// phi_k(z) = sum_n z^n / (n + k)!, k = 1..3.  Series for small |z|, the
// recurrence phi_{k+1} = (phi_k - 1/k!) / z otherwise.
std::array<Cplx, 3> phiFunctions(Cplx z) {
  std::array<Cplx, 3> phi;
  if (std::abs(z) < 1) {
    for (int k = 1; k <= 3; ++k) {
      Cplx term = 1, sum = 0;
      double fact = 1;
      for (int i = 2; i <= k; ++i) fact *= i;
      term /= fact;
      for (int n = 0; n < 40; ++n) {
        sum += term;
        term *= z / double(n + k + 1);
      }
      phi[k - 1] = sum;
    }
  } else {
    phi[0] = (std::exp(z) - 1.0) / z;
    phi[1] = (phi[0] - 1.0) / z;
    phi[2] = (phi[1] - 0.5) / z;
  }
  return phi;
}

// Exponential time differencing RK4 coefficients of one linear symbol.
struct EtdCoefficients {
  std::vector<Cplx> E, E2, Q, f1, f2, f3;

  EtdCoefficients(const std::vector<Cplx>& symbol, double dt) {
    const std::size_t m = symbol.size();
    E.resize(m), E2.resize(m), Q.resize(m), f1.resize(m), f2.resize(m), f3.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const Cplx z = symbol[k] * dt;
      const auto p = phiFunctions(z);
      const auto ph = phiFunctions(z / 2.0);
      E[k] = std::exp(z);
      E2[k] = std::exp(z / 2.0);
      Q[k] = dt / 2 * ph[0];
      f1[k] = dt * (p[0] - 3.0 * p[1] + 4.0 * p[2]);
      f2[k] = dt * (p[1] - 2.0 * p[2]);
      f3[k] = dt * (-p[1] + 4.0 * p[2]);
    }
  }
};

struct SpecState {
  Spec U, V;  // V empty for one-component fields
};

class FlowStepper {
 public:
  FlowStepper(const FlowSpec& spec, std::size_t n) : spec_(spec), n_(n) {
    const std::size_t m = n / 2 + 1;
    std::vector<Cplx> sU(m), sV(m);
    for (std::size_t k = 0; k < m; ++k) {
      sU[k] = linearSymbol(static_cast<long>(k));
      sV[k] = -sU[k];
    }
    sU[m - 1] = sV[m - 1] = 0;
    symbolU_ = sU;
    etdU_.emplace(sU, spec.dt);
    if (spec.twoComponent()) etdV_.emplace(sV, spec.dt);
    mask_.assign(m, 1.0);
    mask_[m - 1] = 0;  // the Nyquist mode is not evolved
    if (spec.dealias)
      for (std::size_t k = n / 3 + 1; k < m; ++k) mask_[k] = 0;
  }

  SpecState toSpectral(const GridFunction& U, const GridFunction& V) const {
    SpecState s{filter(spectral::forward(U)), {}};
    if (V.size()) s.V = filter(spectral::forward(V));
    return s;
  }

  GridFunction grid(const Spec& c) const { return spectral::inverse(c, n_); }

  void step(SpecState& u) const {
    const SpecState Nu = nonlinear(u);
    const SpecState a = combine(u, Nu, &EtdCoefficients::E2, &EtdCoefficients::Q);
    const SpecState Na = nonlinear(a);
    const SpecState b = combine(u, Na, &EtdCoefficients::E2, &EtdCoefficients::Q);
    const SpecState Nb = nonlinear(b);
    SpecState rhs = Nb;
    scaleAdd(rhs, 2.0, Nu, -1.0);
    const SpecState c = combine(a, rhs, &EtdCoefficients::E2, &EtdCoefficients::Q);
    const SpecState Nc = nonlinear(c);
    finish(u.U, Nu.U, Na.U, Nb.U, Nc.U, *etdU_);
    if (u.V.size()) finish(u.V, Nu.V, Na.V, Nb.V, Nc.V, *etdV_);
  }

 private:
  Spec filter(Spec c) const {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= mask_[k];
    return c;
  }

  SpecState nonlinear(const SpecState& s) const {
    const double h = spec_.h;
    const Potential& w = spec_.potential;
    const GridFunction U = grid(s.U);
    SpecState out;
    switch (spec_.field) {
      case FieldKind::exact: {
        const GridFunction V = grid(s.V);
        out.U = spectral::forward(applyDh(nonlinearPart(U + V, h, w), h));
        break;
      }
      case FieldKind::expanded: {
        const GridFunction V = grid(s.V);
        out.U = spectral::forward(expandedNonlinear(U + V, h, w, spec_.order));
        break;
      }
      case FieldKind::reduced:
        out.U = spectral::forward(rhsReduced(U, h, w, spec_.order) - expandedDh(U, h, spec_.order));
        break;
      case FieldKind::kdv:
        out.U = spectral::forward(kdvField(U, spec_.kdvWhich) - d(U, spec_.kdvWhich));
        break;
      case FieldKind::normalized: {
        out.U = spectral::forward(rhsNormalized(U, h, *spec_.normalForm));
        for (std::size_t k = 0; k < out.U.size(); ++k) out.U[k] -= symbolU_[k] * s.U[k];
        break;
      }
    }
    out.U = filter(std::move(out.U));
    // The two-wave fields share their nonlinear part with opposite signs.
    if (spec_.twoComponent()) {
      out.V = out.U;
      for (auto& z : out.V) z = -z;
    }
    return out;
  }

  // u <- x * coeff1 + n * coeff2, per component.
  SpecState combine(const SpecState& x, const SpecState& nl, std::vector<Cplx> EtdCoefficients::*c1,
                    std::vector<Cplx> EtdCoefficients::*c2) const {
    SpecState out;
    auto one = [&](const Spec& a, const Spec& b, const EtdCoefficients& e) {
      Spec r(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) r[k] = (e.*c1)[k] * a[k] + (e.*c2)[k] * b[k];
      return r;
    };
    out.U = one(x.U, nl.U, *etdU_);
    if (x.V.size()) out.V = one(x.V, nl.V, *etdV_);
    return out;
  }

  static void scaleAdd(SpecState& x, double a, const SpecState& y, double b) {
    for (std::size_t k = 0; k < x.U.size(); ++k) x.U[k] = a * x.U[k] + b * y.U[k];
    for (std::size_t k = 0; k < x.V.size(); ++k) x.V[k] = a * x.V[k] + b * y.V[k];
  }

  static void finish(Spec& u, const Spec& Nu, const Spec& Na, const Spec& Nb, const Spec& Nc,
                     const EtdCoefficients& e) {
    for (std::size_t k = 0; k < u.size(); ++k)
      u[k] = e.E[k] * u[k] + e.f1[k] * Nu[k] + 2.0 * e.f2[k] * (Na[k] + Nb[k]) + e.f3[k] * Nc[k];
  }

  Cplx linearSymbol(long k) const {
    const double h = spec_.h;
    const double xi = 2 * std::numbers::pi * double(k);
    switch (spec_.field) {
      case FieldKind::exact: return {0, 2 * std::sin(std::numbers::pi * double(k) * h) / h};
      case FieldKind::expanded:
      case FieldKind::reduced: return expandedDhSymbol<double>(k, h, spec_.order);
      case FieldKind::kdv: return std::pow(Cplx(0, xi), spec_.kdvWhich);
      case FieldKind::normalized: {
        Cplx s = 0;
        double hp = 1;
        for (int i = 0; i < 4; ++i, hp *= h * h) {
          const auto c0 = spec_.normalForm->C[i][0].asRational();
          if (c0) s += hp * c0->toDouble() * std::pow(Cplx(0, xi), 2 * i + 1);
        }
        return s;
      }
    }
    return 0;
  }

  const FlowSpec& spec_;
  std::size_t n_;
  std::vector<Cplx> symbolU_;
  std::optional<EtdCoefficients> etdU_, etdV_;
  std::vector<double> mask_;
};

void checkState(const GridFunction& U, const GridFunction& V, const FlowSpec& spec, long step) {
  const double m = std::max(U.maxAbs(), V.size() ? V.maxAbs() : 0.0);
  if (!std::isfinite(m) || m > spec.blowUpNorm || !U.allFinite() || (V.size() && !V.allFinite())) {
    std::ostringstream os;
    os << spec.describe() << " flow blew up at step " << step << " (t = " << step * spec.dt
       << "), max |U|,|V| = " << m;
    throw BlowUpError(os.str());
  }
}

}  // namespace

FlowResult integrateFlow(const GridFunction& U0, const GridFunction& V0, const FlowSpec& spec, double T,
                         long sampleEvery) {
  if (!(spec.dt > 0)) throw std::invalid_argument("integrateFlow: dt must be positive");
  if (!(T >= 0)) throw std::invalid_argument("integrateFlow: T must be nonnegative");
  if (spec.field == FieldKind::normalized && !spec.normalForm)
    throw std::invalid_argument("integrateFlow: normalized field needs normal form data");
  if (spec.twoComponent() && V0.size() != U0.size())
    throw std::invalid_argument("integrateFlow: two-component field needs V0 of the same size");
  if (spec.field == FieldKind::expanded || spec.field == FieldKind::reduced)
    requireOrder(spec.order, {0, 2, 4, 6}, "integrateFlow");
  if (spec.field == FieldKind::kdv) requireOrder(spec.kdvWhich, {1, 3, 5, 7}, "integrateFlow");

  const FlowStepper stepper(spec, U0.size());
  SpecState s = stepper.toSpectral(U0, spec.twoComponent() ? V0 : GridFunction());
  const long steps = std::lround(T / spec.dt);

  FlowResult r;
  GridFunction U = stepper.grid(s.U), V = s.V.size() ? stepper.grid(s.V) : GridFunction();
  auto record = [&](long step) {
    r.samples.push_back({step * spec.dt, kdvIntegrals(U), U.mean(), V.size() ? V.mean() : 0.0});
  };
  record(0);
  const bool drift = spec.field == FieldKind::normalized;
  double rate = drift ? normalizedDriftRate(U, spec.h, *spec.normalForm) : 0.0;
  for (long step = 1; step <= steps; ++step) {
    stepper.step(s);
    U = stepper.grid(s.U);
    if (s.V.size()) V = stepper.grid(s.V);
    checkState(U, V, spec, step);
    if (drift) {
      const double next = normalizedDriftRate(U, spec.h, *spec.normalForm);
      r.driftAccumulator += spec.dt * (rate + next) / 2;
      rate = next;
    }
    if ((sampleEvery > 0 && step % sampleEvery == 0) || step == steps) record(step);
  }
  r.U = std::move(U);
  r.V = std::move(V);
  r.steps = steps;
  return r;
}

// ---- diagnostics ----------------------------------------------------------------

template <class Real>
Real expansionError(const G<Real>& U, const G<Real>& V, Real h, const Potential& w, int order) {
  const auto ex = rhsExact(U, V, h, w);
  const auto ap = rhsExpanded(U, V, h, w, order);
  return std::max((ex.U - ap.U).maxAbs(), (ex.V - ap.V).maxAbs());
}

#define FPUTLAB_INSTANTIATE(R)                                                                          \
  template G<R> nonlinearPart(const G<R>&, R, const Potential&);                                       \
  template FieldPair<R> rhsExact(const G<R>&, const G<R>&, R, const Potential&);                       \
  template FieldPair<R> rhsExpanded(const G<R>&, const G<R>&, R, const Potential&, int);               \
  template FieldPair<R> rhsUV(const G<R>&, const G<R>&, R, const Potential&);                          \
  template G<R> rhsVExpansion(const G<R>&, R, const Potential&, int);                                  \
  template G<R> slavingC(const G<R>&, R, const Potential&, bool);                                      \
  template G<R> slavingCPrime(const G<R>&, const G<R>&, R, const Potential&, bool);                   \
  template G<R> rhsReduced(const G<R>&, R, const Potential&, int);                                     \
  template G<R> invarianceResidualField(const G<R>&, R, const Potential&, bool);                      \
  template ResidualNorms invarianceResidual(const G<R>&, R, const Potential&, bool);                  \
  template G<R> kdvField(const G<R>&, int);                                                            \
  template R expansionError(const G<R>&, const G<R>&, R, const Potential&, int);

FPUTLAB_INSTANTIATE(double)
FPUTLAB_INSTANTIATE(long double)
#undef FPUTLAB_INSTANTIATE

}  // namespace fputlab::continuum

namespace fputlab::continuum {

LatticeComparison compareWithLattice(const GridFunction& u0, const GridFunction& v0, const FlowSpec& spec,
                                     double tCont, lattice::Scheme scheme) {
  if (spec.field != FieldKind::exact) throw std::invalid_argument("compareWithLattice: field must be exact");
  const std::size_t n = u0.size();
  if (v0.size() != n || std::abs(spec.h * static_cast<double>(n) - 1) > 1e-12)
    throw std::invalid_argument("compareWithLattice: need n = 1/h grid points");
  const double h = spec.h, alpha = spec.potential.alpha;

  const RiemannState s0 = toRiemann(u0, v0, h, alpha);
  const FlowResult flow = integrateFlow(s0.U, s0.V, spec, tCont);
  // <v> is conserved and u_t = v, so <u> moves linearly.
  const ProfilePair end = fromRiemann({flow.U, flow.V, h, alpha}, u0.mean() + tCont * v0.mean());

  lattice::IntegrateOptions opt;
  opt.dt = spec.dt / h;
  opt.steps = flow.steps;
  opt.scheme = scheme;
  opt.stride = flow.steps;
  const lattice::ChainState start = lattice::sampleFromProfile(u0, v0, h);
  const auto traj = lattice::integrate(start, spec.potential, opt);
  const auto& chain = traj.final();

  LatticeComparison out;
  out.tCont = tCont;
  out.flowSteps = flow.steps;
  out.latticeSteps = opt.steps;
  for (std::size_t j = 0; j < n; ++j) {
    out.maxQError = std::max(out.maxQError, std::abs(chain.q[j] - h * end.u[j]));
    out.maxPError = std::max(out.maxPError, std::abs(chain.p[j] - h * h * end.v[j]));
    out.maxQ = std::max(out.maxQ, std::abs(chain.q[j]));
    out.maxQChange = std::max(out.maxQChange, std::abs(chain.q[j] - start.q[j]));
  }
  return out;
}

}  // namespace fputlab::continuum
