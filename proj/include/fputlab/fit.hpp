#pragma once

#include <vector>

namespace fputlab {

// Least-squares line through (log h, log err).
struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  double hMin = 0, hMax = 0;
};

// Throws std::invalid_argument for fewer than two points, mismatched sizes or
// nonpositive values.
SlopeFit fitLogLog(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace fputlab
