#include "fputlab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fputlab {

SlopeFit fitLogLog(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) throw std::invalid_argument("fitLogLog: need >= 2 matched points");
  const std::size_t n = h.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0) || !(err[i] > 0)) throw std::invalid_argument("fitLogLog: values must be positive");
    x[i] = std::log(h[i]);
    y[i] = std::log(err[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i] / n, my += y[i] / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fitLogLog: h values must differ");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  f.hMin = *lo;
  f.hMax = *hi;
  return f;
}

}  // namespace fputlab
