#pragma once

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace coulomb4 {

/// Dawson's integral D(z) = exp(-z^2) int_0^z exp(t^2) dt.
/// Maclaurin series below |z| = 1, otherwise the continued fraction
///   D(z) = z / (1 + 2z^2/(3 - 4z^2/(5 + 6z^2/(7 - ...)))) evaluated bottom-up.
inline double dawson(double z) {
  const double az = std::abs(z);
  if (az < 1.0) {
    // D(z) = sum_k (-1)^k 2^k z^{2k+1} / (2k+1)!!
    const double z2 = z * z;
    double term = z, sum = z;
    for (int k = 1; k < 60; ++k) {
      term *= -2.0 * z2 / (2.0 * k + 1.0);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  const double z2 = z * z;
  const int depth = 60 + static_cast<int>(3.0 * z2);
  double t = 0.0;
  for (int k = depth; k >= 1; --k) {
    const double num = 2.0 * k * z2;
    t = (k % 2 == 1 ? num : -num) / ((2.0 * k + 1.0) + t);
  }
  return z / (1.0 + t);
}

/// Imaginary error function erfi(z) = -i erf(iz) = (2/sqrt(pi)) exp(z^2) D(z).
inline double erfi(double z) {
  if (std::abs(z) > 26.0) throw OverflowError("erfi overflows for |z| > 26");
  if (z == 0.0) return 0.0;
  const double az = std::abs(z);
  const double v = 2.0 * std::numbers::inv_sqrtpi * std::exp(az * az) * dawson(az);
  return z < 0.0 ? -v : v;
}

}  // namespace coulomb4
