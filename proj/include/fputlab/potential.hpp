#pragma once

// Nearest-neighbour potentials of the chain.
//   polynomial: W(z) = z^2/2 + alpha z^3/3 + beta z^4/4 + gamma z^5/5
//   toda:       W(z) = (exp(2 alpha z) - 1 - 2 alpha z) / (4 alpha^2)
// The evaluators are templates so the continuum code can run in long double.

#include <cmath>
#include <string>

namespace fputlab {

namespace detail {

// exp(x) - 1 - x without cancellation near 0.
template <class R>
R expm1MinusX(R x) {
  using std::abs;
  if (abs(x) > R(0.1)) return std::expm1(x) - x;
  R term = x * x / 2, sum = 0;
  for (int k = 3; k < 40 && term != 0; ++k) {
    sum += term;
    term *= x / k;
  }
  return sum;
}

}  // namespace detail

struct Potential {
  enum class Kind { polynomial, toda };
  Kind kind = Kind::polynomial;
  double alpha = 0, beta = 0, gamma = 0;

  static Potential polynomial(double alpha, double beta, double gamma);
  // Throws std::invalid_argument for alpha == 0.
  static Potential toda(double alpha);

  template <class R>
  R W(R z) const {
    if (kind == Kind::toda) return detail::expm1MinusX(2 * R(alpha) * z) / (4 * R(alpha) * R(alpha));
    return z * z * (R(0.5) + z * (R(alpha) / 3 + z * (R(beta) / 4 + z * R(gamma) / 5)));
  }
  template <class R>
  R dW(R z) const {
    return z + nonlinearForce(z);
  }
  // dW(z) - z
  template <class R>
  R nonlinearForce(R z) const {
    if (kind == Kind::toda) return detail::expm1MinusX(2 * R(alpha) * z) / (2 * R(alpha));
    return z * z * (R(alpha) + z * (R(beta) + z * R(gamma)));
  }

  // Taylor coefficients (beta, gamma) of W; equal to the fields for the
  // polynomial kind, (2 alpha^2 / 3, alpha^3 / 3) for Toda.
  double taylorBeta() const;
  double taylorGamma() const;
  std::string describe() const;
};

}  // namespace fputlab
