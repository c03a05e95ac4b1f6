#pragma once

#include <cmath>

namespace testsupport {

// Chi-square upper tail for small dof via the regularized gamma series.
inline double chi2_sf(double x, int dof) {
  double a = dof / 2.0, z = x / 2.0;
  double term = 1.0 / a, sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= z / (a + k);
    sum += term;
  }
  double lower = std::exp(-z + a * std::log(z) - std::lgamma(a)) * sum;
  return 1.0 - lower;
}

}  // namespace testsupport
