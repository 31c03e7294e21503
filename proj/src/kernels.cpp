#include "fputlab/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fputlab::kernels {

namespace serial {

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scaleSpectrum(Complex* c, const Complex* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) c[i] *= m[i];
}

double maxAbs(const double* a, std::size_t n) {
  double m = 0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double sum(const double* a, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void nonlinearForce(const Potential& w, double scale, const double* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = w.nonlinearForce(scale * z[i]) / scale;
}

void latticeForce(const Potential& w, const double* q, double* dp, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double right = q[(j + 1) % n] - q[j];
    const double left = q[j] - q[(j + n - 1) % n];
    dp[j] = w.dW(right) - w.dW(left);
  }
}

}  // namespace serial

namespace omp {

void multiply(const double* a, const double* b, double* out, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scaleSpectrum(Complex* c, const Complex* m, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) c[i] *= m[i];
}

double maxAbs(const double* a, std::size_t n) {
  double m = 0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double sum(const double* a, std::size_t n) {
  double s = 0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void nonlinearForce(const Potential& w, double scale, const double* z, double* out, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = w.nonlinearForce(scale * z[i]) / scale;
}

void latticeForce(const Potential& w, const double* q, double* dp, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < n; ++j) {
    const double right = q[(j + 1) % n] - q[j];
    const double left = q[j] - q[(j + n - 1) % n];
    dp[j] = w.dW(right) - w.dW(left);
  }
}

}  // namespace omp

namespace {
std::atomic<Mode> gMode{Mode::serial};
}

void setMode(Mode m) { gMode = m; }
Mode mode() { return gMode; }

int maxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

#define FPUTLAB_DISPATCH(call) return gMode == Mode::parallel ? omp::call : serial::call

void multiply(const double* a, const double* b, double* out, std::size_t n) { FPUTLAB_DISPATCH(multiply(a, b, out, n)); }
void axpy(double a, const double* x, double* y, std::size_t n) { FPUTLAB_DISPATCH(axpy(a, x, y, n)); }
void scaleSpectrum(Complex* c, const Complex* m, std::size_t n) { FPUTLAB_DISPATCH(scaleSpectrum(c, m, n)); }
double maxAbs(const double* a, std::size_t n) { FPUTLAB_DISPATCH(maxAbs(a, n)); }
double sum(const double* a, std::size_t n) { FPUTLAB_DISPATCH(sum(a, n)); }
void nonlinearForce(const Potential& w, double scale, const double* z, double* out, std::size_t n) {
  FPUTLAB_DISPATCH(nonlinearForce(w, scale, z, out, n));
}
void latticeForce(const Potential& w, const double* q, double* dp, std::size_t n) {
  FPUTLAB_DISPATCH(latticeForce(w, q, dp, n));
}

#undef FPUTLAB_DISPATCH

}  // namespace fputlab::kernels
