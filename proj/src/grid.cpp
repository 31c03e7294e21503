#include "fputlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fputlab/kernels.hpp"

namespace fputlab {

// ---- BasicGrid ---------------------------------------------------------------

template <class Real>
Real BasicGrid<Real>::mean() const {
  if (v_.empty()) return 0;
  if constexpr (std::is_same_v<Real, double>) return kernels::sum(v_.data(), v_.size()) / double(v_.size());
  Real s = 0;
  for (Real x : v_) s += x;
  return s / Real(v_.size());
}

template <class Real>
Real BasicGrid<Real>::maxAbs() const {
  if constexpr (std::is_same_v<Real, double>) return kernels::maxAbs(v_.data(), v_.size());
  Real m = 0;
  for (Real x : v_) m = std::max(m, std::abs(x));
  return m;
}

template <class Real>
Real BasicGrid<Real>::rms() const {
  if (v_.empty()) return 0;
  Real s = 0;
  for (Real x : v_) s += x * x;
  return std::sqrt(s / Real(v_.size()));
}

template <class Real>
bool BasicGrid<Real>::allFinite() const {
  return std::all_of(v_.begin(), v_.end(), [](Real x) { return std::isfinite(x); });
}

namespace {
template <class Real>
void requireSameSize(const BasicGrid<Real>& a, const BasicGrid<Real>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("grid size mismatch");
}
}  // namespace

template <class Real>
BasicGrid<Real>& BasicGrid<Real>::operator+=(const BasicGrid& o) {
  return axpy(Real(1), o);
}

template <class Real>
BasicGrid<Real>& BasicGrid<Real>::operator-=(const BasicGrid& o) {
  return axpy(Real(-1), o);
}

template <class Real>
BasicGrid<Real>& BasicGrid<Real>::operator*=(const BasicGrid& o) {
  requireSameSize(*this, o);
  if constexpr (std::is_same_v<Real, double>) {
    kernels::multiply(v_.data(), o.v_.data(), v_.data(), v_.size());
  } else {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] *= o.v_[i];
  }
  return *this;
}

template <class Real>
BasicGrid<Real>& BasicGrid<Real>::operator+=(Real c) {
  for (Real& x : v_) x += c;
  return *this;
}

template <class Real>
BasicGrid<Real>& BasicGrid<Real>::operator*=(Real c) {
  for (Real& x : v_) x *= c;
  return *this;
}

template <class Real>
BasicGrid<Real>& BasicGrid<Real>::axpy(Real a, const BasicGrid& x) {
  requireSameSize(*this, x);
  if constexpr (std::is_same_v<Real, double>) {
    kernels::axpy(a, x.v_.data(), v_.data(), v_.size());
  } else {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * x.v_[i];
  }
  return *this;
}

template class BasicGrid<double>;
template class BasicGrid<long double>;

// ---- FFTW plumbing -----------------------------------------------------------

namespace {

template <class Real>
struct Fftw;

template <>
struct Fftw<double> {
  using Plan = fftw_plan;
  using Cpx = fftw_complex;
  static void* alloc(std::size_t bytes) { return fftw_malloc(bytes); }
  static void release(void* p) { fftw_free(p); }
  static Plan r2c(int n, double* in, Cpx* out) {
    return fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static Plan c2r(int n, Cpx* in, double* out) {
    return fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void execR2c(Plan p, double* in, Cpx* out) { fftw_execute_dft_r2c(p, in, out); }
  static void execC2r(Plan p, Cpx* in, double* out) { fftw_execute_dft_c2r(p, in, out); }
};

template <>
struct Fftw<long double> {
  using Plan = fftwl_plan;
  using Cpx = fftwl_complex;
  static void* alloc(std::size_t bytes) { return fftwl_malloc(bytes); }
  static void release(void* p) { fftwl_free(p); }
  static Plan r2c(int n, long double* in, Cpx* out) {
    return fftwl_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static Plan c2r(int n, Cpx* in, long double* out) {
    return fftwl_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void execR2c(Plan p, long double* in, Cpx* out) { fftwl_execute_dft_r2c(p, in, out); }
  static void execC2r(Plan p, Cpx* in, long double* out) { fftwl_execute_dft_c2r(p, in, out); }
};

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is.  Plans are created once per size under a lock and never freed.
template <class Real>
struct Plans {
  typename Fftw<Real>::Plan r2c, c2r;
};

std::mutex& planMutex() {
  static std::mutex m;
  return m;
}

template <class Real>
const Plans<Real>& plansFor(std::size_t n) {
  static std::map<std::size_t, Plans<Real>> cache;
  std::lock_guard lock(planMutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  using F = Fftw<Real>;
  auto* in = static_cast<Real*>(F::alloc(sizeof(Real) * n));
  auto* out = static_cast<typename F::Cpx*>(F::alloc(sizeof(typename F::Cpx) * (n / 2 + 1)));
  Plans<Real> p{F::r2c(static_cast<int>(n), in, out), F::c2r(static_cast<int>(n), out, in)};
  F::release(in);
  F::release(out);
  if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n, p).first->second;
}

void requireEven(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("grid size must be even and at least 2");
}

}  // namespace

namespace spectral {

template <class Real>
Spectrum<Real> forward(const BasicGrid<Real>& f) {
  const std::size_t n = f.size();
  requireEven(n);
  using F = Fftw<Real>;
  std::vector<Real> in(f.values());
  Spectrum<Real> c(n / 2 + 1);
  F::execR2c(plansFor<Real>(n).r2c, in.data(), reinterpret_cast<typename F::Cpx*>(c.data()));
  const Real scale = Real(1) / Real(n);
  for (auto& z : c) z *= scale;
  return c;
}

template <class Real>
BasicGrid<Real> inverse(const Spectrum<Real>& c, std::size_t n) {
  requireEven(n);
  if (c.size() != n / 2 + 1) throw std::invalid_argument("spectrum size mismatch");
  using F = Fftw<Real>;
  Spectrum<Real> work(c);  // c2r overwrites its input
  work[0].imag(0);
  work[n / 2].imag(0);
  std::vector<Real> out(n);
  F::execC2r(plansFor<Real>(n).c2r, reinterpret_cast<typename F::Cpx*>(work.data()), out.data());
  return BasicGrid<Real>(std::move(out));
}

template <>
double noiseFloor<double>() {
  return 1e-13;
}
template <>
long double noiseFloor<long double>() {
  return 1e-16L;
}

template <class Real>
void chop(Spectrum<Real>& c) {
  Real m = 0;
  for (const auto& z : c) m = std::max(m, std::abs(z));
  const Real cut = noiseFloor<Real>() * m;
  for (auto& z : c)
    if (std::abs(z) < cut) z = 0;
}

template <class Real>
BasicGrid<Real> deriv(const BasicGrid<Real>& f, int m) {
  if (m < 0) throw std::invalid_argument("derivative order must be nonnegative");
  if (m == 0) return f;
  const Real twoPi = 2 * std::numbers::pi_v<Real>;
  return applyMultiplier(
      f, [&](long k) { return std::pow(std::complex<Real>(0, twoPi * Real(k)), m); }, m >= 2);
}

template <class Real>
BasicGrid<Real> applyDh(const BasicGrid<Real>& f, Real h) {
  if (!(h > 0)) throw std::invalid_argument("applyDh: h must be positive");
  const Real pi = std::numbers::pi_v<Real>;
  return applyMultiplier(f, [&](long k) { return std::complex<Real>(0, 2 * std::sin(pi * Real(k) * h) / h); });
}

template <class Real>
BasicGrid<Real> shift(const BasicGrid<Real>& f, Real s) {
  const Real twoPi = 2 * std::numbers::pi_v<Real>;
  return applyMultiplier(f, [&](long k) { return std::polar(Real(1), twoPi * Real(k) * s); });
}

template <class Real>
BasicGrid<Real> forwardDifference(const BasicGrid<Real>& f, Real s) {
  const Real pi = std::numbers::pi_v<Real>;
  // e^{2 i theta} - 1 = 2 i sin(theta) e^{i theta}
  return applyMultiplier(f, [&](long k) {
    const Real theta = pi * Real(k) * s;
    return std::complex<Real>(0, 2 * std::sin(theta)) * std::polar(Real(1), theta);
  });
}

template <class Real>
BasicGrid<Real> antiderivative(const BasicGrid<Real>& f) {
  const Real twoPi = 2 * std::numbers::pi_v<Real>;
  return applyMultiplier(f, [&](long k) {
    return k == 0 ? std::complex<Real>(0) : std::complex<Real>(0, -1 / (twoPi * Real(k)));
  });
}

template <class Real>
BasicGrid<Real> dealias(const BasicGrid<Real>& f) {
  const long cutoff = static_cast<long>(f.size() / 3);
  return applyMultiplier(f, [&](long k) { return Real(k <= cutoff ? 1 : 0); });
}

#define FPUTLAB_INSTANTIATE(R)                                            \
  template Spectrum<R> forward(const BasicGrid<R>&);                      \
  template BasicGrid<R> inverse(const Spectrum<R>&, std::size_t);         \
  template void chop(Spectrum<R>&);                                       \
  template BasicGrid<R> deriv(const BasicGrid<R>&, int);                  \
  template BasicGrid<R> applyDh(const BasicGrid<R>&, R);                  \
  template BasicGrid<R> shift(const BasicGrid<R>&, R);                    \
  template BasicGrid<R> forwardDifference(const BasicGrid<R>&, R);        \
  template BasicGrid<R> antiderivative(const BasicGrid<R>&);              \
  template BasicGrid<R> dealias(const BasicGrid<R>&);

FPUTLAB_INSTANTIATE(double)
FPUTLAB_INSTANTIATE(long double)
#undef FPUTLAB_INSTANTIATE

}  // namespace spectral

GridFunction randomBandLimited(std::size_t n, unsigned seed, int maxMode, double amplitude, double mean) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  std::vector<double> a(maxMode + 1), b(maxMode + 1);
  for (int k = 1; k <= maxMode; ++k) {
    a[k] = dist(rng) * std::exp(-0.5 * k);
    b[k] = dist(rng) * std::exp(-0.5 * k);
  }
  const double twoPi = 2 * std::numbers::pi;
  return GridFunction::sample(n, [&](double x) {
    double s = mean;
    for (int k = 1; k <= maxMode; ++k) s += a[k] * std::cos(twoPi * k * x) + b[k] * std::sin(twoPi * k * x);
    return s;
  });
}

}  // namespace fputlab
