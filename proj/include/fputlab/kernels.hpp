#pragma once

// Hot loops of the numeric code, each in a serial reference version and an
// OpenMP version.  The dispatchers at the bottom pick one according to the
// process-wide mode; tests compare the two directly.

#include <complex>
#include <cstddef>

#include "fputlab/potential.hpp"

namespace fputlab::kernels {

using Complex = std::complex<double>;

#define FPUTLAB_KERNEL_DECLS                                                                  \
  void multiply(const double* a, const double* b, double* out, std::size_t n);               \
  void axpy(double a, const double* x, double* y, std::size_t n);                            \
  void scaleSpectrum(Complex* c, const Complex* m, std::size_t n);                           \
  double maxAbs(const double* a, std::size_t n);                                             \
  double sum(const double* a, std::size_t n);                                                \
  void nonlinearForce(const Potential& w, double scale, const double* z, double* out, std::size_t n); \
  void latticeForce(const Potential& w, const double* q, double* dp, std::size_t n);

namespace serial {
FPUTLAB_KERNEL_DECLS
}
namespace omp {
FPUTLAB_KERNEL_DECLS
}

#undef FPUTLAB_KERNEL_DECLS

enum class Mode { serial, parallel };
void setMode(Mode m);
Mode mode();
// Threads OpenMP would use; 1 when built without OpenMP.
int maxThreads();

// out = a * b
void multiply(const double* a, const double* b, double* out, std::size_t n);
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
// c[k] *= m[k]
void scaleSpectrum(Complex* c, const Complex* m, std::size_t n);
double maxAbs(const double* a, std::size_t n);
double sum(const double* a, std::size_t n);
// out = w.nonlinearForce(scale * z) / scale
void nonlinearForce(const Potential& w, double scale, const double* z, double* out, std::size_t n);
// dp_j = W'(q_{j+1} - q_j) - W'(q_j - q_{j-1}), periodic
void latticeForce(const Potential& w, const double* q, double* dp, std::size_t n);

}  // namespace fputlab::kernels
