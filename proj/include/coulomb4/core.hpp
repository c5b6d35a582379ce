#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"

// Scaled units throughout: 2m/hbar^2 = 1 and k_B = 1, so every energy is the
// scaled quantity eps = (2m/hbar^2) E.

namespace coulomb4 {

/// Couplings of V(x) = a1/x + a2/x^2 + a3/x^3 + a4^2/x^4 on the half-line.
/// alpha4 is the length scale itself; the potential uses its square.
struct PotentialParams {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double alpha4 = 0.0;

  /// Exponent of the x^delta prefactor of the ordinary bound states.
  double delta() const { return 1.0 + alpha3 / (2.0 * alpha4); }

  /// alpha1 < 0, alpha4 > 0 and delta > 0.
  bool admissible() const { return alpha1 < 0.0 && alpha4 > 0.0 && delta() > 0.0; }

  void require_admissible() const {
    if (!(alpha1 < 0.0)) throw DomainError("alpha1 must be negative");
    if (!(alpha4 > 0.0)) throw DomainError("alpha4 must be positive");
    if (!(delta() > 0.0)) throw DomainError("delta = 1 + alpha3/(2 alpha4) must be positive");
  }
};

/// Minimal-length parameter of the deformed commutator.
struct GupContext {
  double beta = 0.0;

  void validate() const {
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  }
};

struct EnergyPair {
  double eps_ordinary = 0.0;
  double eps_gup = 0.0;
  int n = 0;
};

/// gamma[i] multiplies x^(-i) in the effective potential.
struct EffectiveCoefficients {
  std::array<double, 9> gamma{};
};

/// psi(x) = x^power * exp(-a x - b/x - c/x^2 - d/x^3) * sum_k poly_coeffs[k] x^k.
struct WaveFunctionSpec {
  double power = 0.0;
  std::array<double, 4> exp_coeffs{};  // a, b, c, d
  std::vector<double> poly_coeffs{1.0};
  std::optional<double> norm_constant;

  double a() const { return exp_coeffs[0]; }
  double b() const { return exp_coeffs[1]; }
  double c() const { return exp_coeffs[2]; }
  double d() const { return exp_coeffs[3]; }
};

inline void require_positive_x(double x) {
  if (!(x > 0.0)) throw DomainError("x must be positive");
}

inline double potential_value(const PotentialParams& p, double x) {
  require_positive_x(x);
  const double w = 1.0 / x;
  const double a4sq = p.alpha4 * p.alpha4;
  return w * (p.alpha1 + w * (p.alpha2 + w * (p.alpha3 + w * a4sq)));
}

/// Coefficients of V_e(x) = (V - eps_G) + beta (V - eps)^2 expanded in powers of 1/x.
inline EffectiveCoefficients effective_coefficients(const PotentialParams& p, const GupContext& g,
                                                    const EnergyPair& e) {
  const double b = g.beta;
  const double eps = e.eps_ordinary;
  const double a1 = p.alpha1, a2 = p.alpha2, a3 = p.alpha3;
  const double a4sq = p.alpha4 * p.alpha4;
  EffectiveCoefficients out;
  auto& gm = out.gamma;
  gm[0] = b * eps * eps - e.eps_gup;
  gm[1] = a1 * (1.0 - 2.0 * b * eps);
  gm[2] = a2 + b * (a1 * a1 - 2.0 * a2 * eps);
  gm[3] = a3 + 2.0 * b * (a1 * a2 - a3 * eps);
  gm[4] = a4sq + b * (2.0 * a1 * a3 + a2 * a2 - 2.0 * a4sq * eps);
  gm[5] = 2.0 * b * (a1 * a4sq + a2 * a3);
  gm[6] = b * (2.0 * a2 * a4sq + a3 * a3);
  gm[7] = 2.0 * b * a3 * a4sq;
  gm[8] = b * a4sq * a4sq;
  return out;
}

inline double effective_potential_value(const EffectiveCoefficients& gc, double x) {
  require_positive_x(x);
  const double w = 1.0 / x;
  double acc = 0.0;
  for (int i = 8; i >= 0; --i) acc = acc * w + gc.gamma[static_cast<std::size_t>(i)];
  return acc;
}

}  // namespace coulomb4
