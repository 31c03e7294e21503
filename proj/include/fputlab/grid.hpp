#pragma once

// Real periodic functions on the unit circle sampled at x_k = k/N, and the
// FFT-based operators acting on them.  Real is double or long double; the
// long double instantiation backs the convergence studies whose remainders
// fall below double rounding.

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace fputlab {

template <class Real>
class BasicGrid {
 public:
  using value_type = Real;

  BasicGrid() = default;
  explicit BasicGrid(std::size_t n, Real fill = 0) : v_(n, fill) {}
  explicit BasicGrid(std::vector<Real> values) : v_(std::move(values)) {}

  template <class F>
  static BasicGrid sample(std::size_t n, F&& f) {
    BasicGrid g(n);
    for (std::size_t k = 0; k < n; ++k) g.v_[k] = static_cast<Real>(f(Real(k) / Real(n)));
    return g;
  }

  std::size_t size() const { return v_.size(); }
  Real& operator[](std::size_t k) { return v_[k]; }
  const Real& operator[](std::size_t k) const { return v_[k]; }
  Real* data() { return v_.data(); }
  const Real* data() const { return v_.data(); }
  const std::vector<Real>& values() const { return v_; }
  Real x(std::size_t k) const { return Real(k) / Real(v_.size()); }

  Real mean() const;
  Real maxAbs() const;
  // sqrt(<f^2>)
  Real rms() const;
  bool allFinite() const;

  template <class S>
  BasicGrid<S> cast() const {
    std::vector<S> out(v_.begin(), v_.end());
    return BasicGrid<S>(std::move(out));
  }

  BasicGrid& operator+=(const BasicGrid& o);
  BasicGrid& operator-=(const BasicGrid& o);
  BasicGrid& operator*=(const BasicGrid& o);
  BasicGrid& operator+=(Real c);
  BasicGrid& operator*=(Real c);
  // this += a * x
  BasicGrid& axpy(Real a, const BasicGrid& x);
  BasicGrid operator-() const { return BasicGrid(*this) *= Real(-1); }

  friend BasicGrid operator+(BasicGrid a, const BasicGrid& b) { return a += b; }
  friend BasicGrid operator-(BasicGrid a, const BasicGrid& b) { return a -= b; }
  friend BasicGrid operator*(BasicGrid a, const BasicGrid& b) { return a *= b; }
  friend BasicGrid operator*(Real c, BasicGrid a) { return a *= c; }
  friend BasicGrid operator*(BasicGrid a, Real c) { return a *= c; }
  friend BasicGrid operator+(BasicGrid a, Real c) { return a += c; }
  friend BasicGrid operator-(BasicGrid a, Real c) { return a += -c; }

 private:
  std::vector<Real> v_;
};

using GridFunction = BasicGrid<double>;
using GridFunctionL = BasicGrid<long double>;

namespace spectral {

template <class Real>
using Spectrum = std::vector<std::complex<Real>>;

// c_k = (1/N) sum_j f_j e^{-2 pi i k j / N}, k = 0..N/2.  N must be even.
template <class Real>
Spectrum<Real> forward(const BasicGrid<Real>& f);
template <class Real>
BasicGrid<Real> inverse(const Spectrum<Real>& c, std::size_t n);

// Spectral coefficients below floor * max|c_k| are set to zero (Krasny filter).
// Used before high-order derivatives, where roundoff in the top modes would
// otherwise be amplified by (2 pi k)^m.
template <class Real>
Real noiseFloor();
template <>
double noiseFloor<double>();
template <>
long double noiseFloor<long double>();
template <class Real>
void chop(Spectrum<Real>& c);

// Mode k (k = 0..N/2) multiplied by m(k).  The Nyquist mode of a real signal is
// real, so it takes Re m(N/2).
template <class Real, class M>
BasicGrid<Real> applyMultiplier(const BasicGrid<Real>& f, M&& m, bool filterNoise = false) {
  auto c = forward(f);
  if (filterNoise) chop(c);
  const std::size_t half = f.size() / 2;
  for (std::size_t k = 0; k < half; ++k) c[k] *= std::complex<Real>(m(static_cast<long>(k)));
  c[half] *= std::complex<Real>(std::real(std::complex<Real>(m(static_cast<long>(half)))), 0);
  return inverse(c, f.size());
}

// m-th derivative.
template <class Real>
BasicGrid<Real> deriv(const BasicGrid<Real>& f, int m);
// D_h f = (f(x + h/2) - f(x - h/2)) / h, multiplier 2i sin(pi k h) / h.
template <class Real>
BasicGrid<Real> applyDh(const BasicGrid<Real>& f, Real h);
// f(x + s)
template <class Real>
BasicGrid<Real> shift(const BasicGrid<Real>& f, Real s);
// f(x + s) - f(x), without cancellation for small s.
template <class Real>
BasicGrid<Real> forwardDifference(const BasicGrid<Real>& f, Real s);
// Zero-mean primitive of f - <f>.
template <class Real>
BasicGrid<Real> antiderivative(const BasicGrid<Real>& f);
// Zeroes modes |k| > N/3.
template <class Real>
BasicGrid<Real> dealias(const BasicGrid<Real>& f);

}  // namespace spectral

// Sum of a few Fourier modes with random amplitudes; deterministic in seed.
// Modes 1..maxMode, amplitudes uniform in [-amplitude, amplitude] times
// exp(-k/2) so the function is smooth, plus an optional mean.
GridFunction randomBandLimited(std::size_t n, unsigned seed, int maxMode = 4, double amplitude = 1.0,
                               double mean = 0.0);

}  // namespace fputlab
