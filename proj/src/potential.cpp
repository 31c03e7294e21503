#include "fputlab/potential.hpp"

#include <sstream>
#include <stdexcept>

namespace fputlab {

Potential Potential::polynomial(double alpha, double beta, double gamma) {
  return {Kind::polynomial, alpha, beta, gamma};
}

Potential Potential::toda(double alpha) {
  if (alpha == 0) throw std::invalid_argument("toda potential needs alpha != 0");
  return {Kind::toda, alpha, 0, 0};
}

double Potential::taylorBeta() const { return kind == Kind::toda ? 2 * alpha * alpha / 3 : beta; }
double Potential::taylorGamma() const { return kind == Kind::toda ? alpha * alpha * alpha / 3 : gamma; }

std::string Potential::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::toda)
    os << "toda(alpha=" << alpha << ")";
  else
    os << "polynomial(alpha=" << alpha << ", beta=" << beta << ", gamma=" << gamma << ")";
  return os.str();
}

}  // namespace fputlab
