#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "core.hpp"

namespace coulomb4 {

/// Value and first two derivatives of an ascending-power polynomial.
struct PolyJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline PolyJet poly_jet(std::span<const double> coeffs, double x) {
  PolyJet j;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    j.d2 = j.d2 * x + 2.0 * j.d1;
    j.d1 = j.d1 * x + j.value;
    j.value = j.value * x + *it;
  }
  return j;
}

/// Ascending coefficients of prod_i (x - roots[i]).
inline std::vector<double> poly_from_roots(std::span<const double> roots) {
  std::vector<double> c{1.0};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

/// Logarithm of the non-polynomial prefactor x^power exp(g(x)).
inline double log_prefactor(const WaveFunctionSpec& s, double x) {
  const double w = 1.0 / x;
  return s.power * std::log(x) - s.a() * x - w * (s.b() + w * (s.c() + w * s.d()));
}

inline double evaluate_wavefunction(const WaveFunctionSpec& s, double x) {
  require_positive_x(x);
  return std::exp(log_prefactor(s, x)) * poly_jet(s.poly_coeffs, x).value;
}

/// psi and psi'' expressed relative to the prefactor P(x) = x^power exp(g(x)):
/// psi = P * phi, psi'' = P * second. Working relative to P keeps every quantity
/// finite where P itself under- or overflows.
struct ScaledJet {
  double phi = 0.0;
  double second = 0.0;
};

inline ScaledJet scaled_second_derivative(const WaveFunctionSpec& s, double x) {
  const double w = 1.0 / x;
  // L = P'/P and its derivative.
  const double L = s.power * w - s.a() + w * w * (s.b() + w * (2.0 * s.c() + w * 3.0 * s.d()));
  const double dL = -w * w * (s.power + w * (2.0 * s.b() + w * (6.0 * s.c() + w * 12.0 * s.d())));
  const PolyJet pj = poly_jet(s.poly_coeffs, x);
  return {pj.value, (dL + L * L) * pj.value + 2.0 * L * pj.d1 + pj.d2};
}

}  // namespace coulomb4
