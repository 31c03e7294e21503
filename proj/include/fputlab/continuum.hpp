#pragma once

// Pseudo-spectral realization of the continuum objects on the unit circle:
// discrete Riemann invariants, the exact and expanded two-wave fields, the
// slaving relation and reduced field, the KdV hierarchy, the normal form and
// the flows of all of them.
//
// Field functions are templates over the grid precision (double, long double)
// so convergence studies can resolve remainders below double rounding.
// Parameters enter through Potential: alpha, and the Taylor coefficients
// beta, gamma (which for the Toda kind are 2 alpha^2/3, alpha^3/3).

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fputlab/grid.hpp"
#include "fputlab/lattice.hpp"
#include "fputlab/normalform.hpp"
#include "fputlab/potential.hpp"

namespace fputlab::continuum {

using spectral::applyDh;
using spectral::deriv;

template <class Real>
struct FieldPair {
  BasicGrid<Real> U, V;
};

// ---- Riemann invariants ---------------------------------------------------------

struct RiemannState {
  GridFunction U, V;
  double h = 0;
  double alpha = 0;
};

struct ProfilePair {
  GridFunction u, v;
};

// U = 2 alpha (D_h u + v), V = 2 alpha (D_h u - v).  Throws for alpha == 0 or
// h <= 0.
RiemannState toRiemann(const GridFunction& u, const GridFunction& v, double h, double alpha);
// v = (U - V) / (4 alpha) and u from D_h u = (U + V) / (4 alpha) with the given
// mean.  Modes where the D_h multiplier vanishes (k h an integer) are not
// recoverable and come back as zero.
ProfilePair fromRiemann(const RiemannState& s, double uMean);

// ---- two-wave fields ------------------------------------------------------------

// f(z, h) = 2 alpha h^-2 [W'(h^2 z / (4 alpha)) - h^2 z / (4 alpha)] pointwise.
template <class Real>
BasicGrid<Real> nonlinearPart(const BasicGrid<Real>& z, Real h, const Potential& w);

// U_t = D_h[U + f(U + V)], V_t = -D_h[V + f(U + V)].  Throws std::overflow_error
// when f is not finite.
template <class Real>
FieldPair<Real> rhsExact(const BasicGrid<Real>& U, const BasicGrid<Real>& V, Real h, const Potential& w);
FieldPair<double> rhsExact(const RiemannState& s, const Potential& w);

// F(X, Y) with D_h and f expanded through h^order, order in {0, 2, 4, 6}:
//   X_x + h^2 (X_3x/24 + (Z^2)_x/8)
//   + h^4 (X_5x/1920 + (Z^2)_3x/192 + beta/(32 alpha^2) (Z^3)_x)
//   + h^6 (X_7x/322560 + (Z^2)_5x/15360 + beta/(768 alpha^2) (Z^3)_3x + gamma/(128 alpha^3) (Z^4)_x),
// Z = X + Y.  Returns (F(U, V), -F(V, U)).
template <class Real>
FieldPair<Real> rhsExpanded(const BasicGrid<Real>& U, const BasicGrid<Real>& V, Real h, const Potential& w,
                            int order);
FieldPair<double> rhsExpanded(const RiemannState& s, const Potential& w, int order);

// The chain equations on the continuum:
//   u_t = v,  v_t = h^-3 [W'(h(u(x+h) - u(x))) - W'(h(u(x) - u(x-h)))],
// with the shifts done spectrally.  The linear part is applied as the exact
// second-difference multiplier so small h does not cancel digits.
template <class Real>
FieldPair<Real> rhsUV(const BasicGrid<Real>& u, const BasicGrid<Real>& v, Real h, const Potential& w);

// Expansion of v_t in powers of h through h^order (order in {0, 2, 4, 6}):
//   u_xx + h^2 (u_4x/12 + 2 alpha u_x u_xx) + h^4 (...) + h^6 (...).
template <class Real>
BasicGrid<Real> rhsVExpansion(const BasicGrid<Real>& u, Real h, const Potential& w, int order);

// ---- slaving relation and reduced field ----------------------------------------

// c = h^2 c2 + h^4 c4 with
//   c2 = (<U^2> - U^2)/16,
//   c4 = (5/384 - beta/(64 alpha^2))(U^3 - <U^3>) - <U^2>(U - <U>)/128 - (U_x^2 - <U_x^2>)/256.
template <class Real>
BasicGrid<Real> slavingC(const BasicGrid<Real>& U, Real h, const Potential& w, bool includeC4 = true);
// Directional derivative c'(U)[G] of the same truncation.
template <class Real>
BasicGrid<Real> slavingCPrime(const BasicGrid<Real>& U, const BasicGrid<Real>& G, Real h, const Potential& w,
                              bool includeC4 = true);

// The reduced field F(U, c(U, h), h) through h^order, order in {0, 2, 4, 6}.
template <class Real>
BasicGrid<Real> rhsReduced(const BasicGrid<Real>& U, Real h, const Potential& w, int order);

struct ResidualNorms {
  double sup = 0;
  double l2 = 0;
};

// c'(U)[F(U, c)] + F(c, U) with (F, -F(c, U)) from rhsExpanded(6).
template <class Real>
BasicGrid<Real> invarianceResidualField(const BasicGrid<Real>& U, Real h, const Potential& w, bool includeC4 = true);
template <class Real>
ResidualNorms invarianceResidual(const BasicGrid<Real>& U, Real h, const Potential& w, bool includeC4 = true);

// ---- KdV hierarchy ----------------------------------------------------------------

// K1, K3, K5, K7; which in {1, 3, 5, 7}.
template <class Real>
BasicGrid<Real> kdvField(const BasicGrid<Real>& U, int which);

struct KdVIntegrals {
  double I1 = 0, I2 = 0, I3 = 0;  // <U>, <U^2>, <U_x^2 - 2 U^3>
};
KdVIntegrals kdvIntegrals(const GridFunction& U);

// ---- symbolic expressions on the grid --------------------------------------------

using ParamValues = std::map<sym::ParamId, double>;

// Evaluates a DiffPoly at U: local factors through spectral derivatives,
// averages as grid means, primitives through the spectral antiderivative.
// Throws std::invalid_argument for a parameter missing from `params`.
GridFunction evaluate(const sym::DiffPoly& p, const GridFunction& U, const ParamValues& params = {});
GridFunction evaluate(const sym::HSeries& s, const GridFunction& U, double h, const ParamValues& params = {});
// p'(U)[V], the directional derivative on the grid.  p(U + eV) is a polynomial
// in e of degree deg p, so the five-point central stencil is exact for
// deg p <= 4 and no symbolic Gateaux derivative is needed (G2'(U)[G2] has no
// closed DiffPoly form: it averages a primitive against a non-exact factor).
// Throws std::invalid_argument for deg p > 4.
GridFunction evaluateDirectional(const sym::DiffPoly& p, const GridFunction& U, const GridFunction& V,
                                 const ParamValues& params = {});
// Value of an x-independent expression.
double evaluateScalar(const sym::DiffPoly& p, const GridFunction& U, const ParamValues& params = {});

// ---- normal form ----------------------------------------------------------------

// Numeric snapshot of the normal-form data needed on the grid.
struct NormalFormData {
  std::array<sym::HSeries, 4> C;  // C1(U,h)..C7(U,h), pure averages
  double rho = 0;
  double C7 = 0;
  double lambda7 = 0;
  sym::DiffPoly G2, G4;
  ParamValues params;               // values for any symbolic parameters left
};

NormalFormData normalFormData(const nf::ModelCoefficients& m, const nf::FirstOrderResult& f,
                              const nf::SecondOrderResult& s, const nf::ConservedCoefficients& cc);
// Runs the full pipeline for a chain potential with exact parameters.
NormalFormData normalFormData(const nf::FPUTParameters& p, const Rational& lambda4 = Rational(0));

// C1 K1 + h^2 C3 K3 + h^4 C5 K5 + h^6 C7 (K7 + rho U^3 U_x), the C_i evaluated
// on the current U.
GridFunction rhsNormalized(const GridFunction& U, double h, const NormalFormData& d);
// Rate of the constant term -h^6 C7 lambda7 <U_x^3> removed by the final
// time-dependent change of variables.
double normalizedDriftRate(const GridFunction& U, double h, const NormalFormData& d);

enum class Direction { forward, inverse };
// forward: U + h^2 G2 + h^4 (G4 + G2'G2/2); inverse: U - h^2 G2 + h^4 (G2'G2/2 - G4).
GridFunction applyNormalCoordinates(const GridFunction& U, const NormalFormData& d, double h, Direction dir);

// ---- flows ----------------------------------------------------------------------

enum class FieldKind { exact, expanded, reduced, kdv, normalized };
const char* fieldKindName(FieldKind k);

struct FlowSpec {
  FieldKind field = FieldKind::exact;
  int order = 6;      // expanded / reduced
  int kdvWhich = 3;   // kdv
  double h = 0.1;
  Potential potential = Potential::polynomial(1, 0, 0);
  double dt = 1e-4;
  bool dealias = true;
  const NormalFormData* normalForm = nullptr;  // required for FieldKind::normalized
  double blowUpNorm = 1e6;

  // Two-component fields evolve (U, V); the others evolve U only.
  bool twoComponent() const { return field == FieldKind::exact || field == FieldKind::expanded; }
  std::string describe() const;
};

struct FlowSample {
  double t;
  KdVIntegrals integrals;
  double meanU, meanV;
};

struct FlowResult {
  GridFunction U, V;  // V empty for one-component fields
  std::vector<FlowSample> samples;
  double driftAccumulator = 0;  // integral of normalizedDriftRate for normalized flows
  long steps = 0;
};

class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-step exponential time differencing RK4 (Cox-Matthews) in Fourier
// space: the constant-coefficient linear part is integrated exactly, the
// remainder at fourth order.  The Nyquist mode is not evolved; with dealias set
// every nonlinear term is cut to |k| <= N/3.  The number of steps is
// round(T / dt); samples are taken every sampleEvery steps and at the end.
FlowResult integrateFlow(const GridFunction& U0, const GridFunction& V0, const FlowSpec& spec, double T,
                         long sampleEvery = 0);

// ---- lattice consistency --------------------------------------------------------

struct LatticeComparison {
  double maxQError = 0;  // max_j |q_j - h u(h j)|
  double maxPError = 0;  // max_j |p_j - h^2 v(h j)|
  double maxQ = 0;       // max_j |q_j|, for scale
  double maxQChange = 0; // max_j |q_j(t) - q_j(0)|, to show the state moved
  double tCont = 0;
  long flowSteps = 0, latticeSteps = 0;
};

// Runs the exact two-wave flow from (u0, v0) for continuum time tCont and the
// chain from q_j = h u0(h j), p_j = h^2 v0(h j) for lattice time tCont / h, both
// with the same number of steps.  Requires spec.field == exact and
// u0.size() * spec.h == 1.
LatticeComparison compareWithLattice(const GridFunction& u0, const GridFunction& v0, const FlowSpec& spec,
                                     double tCont, lattice::Scheme scheme = lattice::Scheme::rk4);

// ---- diagnostics ----------------------------------------------------------------

// ||rhsExact - rhsExpanded(order)||_inf over both components.
template <class Real>
Real expansionError(const BasicGrid<Real>& U, const BasicGrid<Real>& V, Real h, const Potential& w, int order);

}  // namespace fputlab::continuum
