#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"
#include "wavefunction.hpp"

// Quasi-exactly-solvable bound states of -psi'' + (V - eps) psi = 0 (beta = 0).
// psi_n = x^delta exp(-(x sqrt(-eps) + alpha4/x)) phi_n(x), phi_n a degree-n polynomial.

namespace coulomb4 {

inline constexpr double kClosureTolerance = 1e-8;

/// Energy of the n-th QES level, eps_n = -alpha1^2 alpha4^2 / (alpha3 + 2(n+1) alpha4)^2.
inline double closed_form_energy(int n, const PotentialParams& p) {
  if (n < 0) throw DomainError("quantum number must be non-negative");
  p.require_admissible();
  const double den = p.alpha3 + 2.0 * (n + 1) * p.alpha4;
  if (den == 0.0 || std::abs(den) <= 1e-14 * (std::abs(p.alpha3) + std::abs(p.alpha4)))
    throw SingularError("alpha3 = -2(n+1) alpha4: energy denominator vanishes");
  const double r = p.alpha1 * p.alpha4 / den;
  return -r * r;
}

struct LambdaPair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

inline LambdaPair lambda_coeffs(const PotentialParams& p, double eps) {
  if (!(eps < 0.0)) throw DomainError("lambda coefficients need eps < 0");
  const double s = std::sqrt(-eps);
  const double q = p.alpha3 / p.alpha4;
  return {p.alpha1 + (2.0 + q) * s, p.alpha2 - 0.25 * q * q - 0.5 * q + 2.0 * p.alpha4 * s};
}

/// Sum of magnitudes of the additive pieces of lambda2; the natural scale against
/// which a vanishing lambda2 is judged.
inline double lambda2_scale(const PotentialParams& p, double eps) {
  const double q = p.alpha3 / p.alpha4;
  return std::abs(p.alpha2) + 0.25 * q * q + 0.5 * std::abs(q) + 2.0 * p.alpha4 * std::sqrt(-eps);
}

struct RecursionResult {
  std::vector<double> coeffs;  // c_0 .. c_n, c_0 = 1
  double terminal = 0.0;       // c_{n+1}; vanishes iff the QES condition holds
};

/// Power-series coefficients of phi from
///   2(k+1) alpha4 c_{k+1} = (lambda2 - 2k delta - k(k-1)) c_k + (lambda1 + 2(k-1) sqrt(-eps)) c_{k-1}.
/// At eps = eps_n the c_{k-1} factor equals -2(n-k+1) sqrt(-eps), the sub-diagonal of the
/// tridiagonal QES matrix.
inline RecursionResult recursion_polynomial(int n, const PotentialParams& p, double eps) {
  if (n < 0) throw DomainError("quantum number must be non-negative");
  if (!(p.alpha4 > 0.0)) throw DomainError("alpha4 must be positive");
  const LambdaPair lam = lambda_coeffs(p, eps);
  const double s = std::sqrt(-eps);
  const double delta = p.delta();
  std::vector<double> c(static_cast<std::size_t>(n) + 2, 0.0);
  c[0] = 1.0;
  double prev = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double diag = lam.lambda2 - 2.0 * k * delta - double(k) * (k - 1);
    const double sub = lam.lambda1 + 2.0 * (k - 1) * s;
    const double ck = c[static_cast<std::size_t>(k)];
    c[static_cast<std::size_t>(k) + 1] = (diag * ck + sub * prev) / (2.0 * (k + 1) * p.alpha4);
    prev = ck;
  }
  RecursionResult out;
  out.terminal = c.back();
  c.pop_back();
  out.coeffs = std::move(c);
  return out;
}

struct DeterminantResidual {
  double raw = 0.0;         // det of the (n+1)x(n+1) tridiagonal matrix
  double normalized = 0.0;  // raw / prod of per-row scales
};

/// Tridiagonal QES determinant at eps = eps_n, via D_k = A_k D_{k-1} - sub_k super_{k-1} D_{k-2}.
/// Row k: sub = -2(n-k+1) sqrt(-eps), diag = lambda2 - 2k delta - k(k-1), super = -2(k+1) alpha4.
/// Each row is scaled by its largest entry magnitude, with the diagonal measured by the sum of
/// its additive terms so that a cancelling diagonal does not normalize itself away.
inline DeterminantResidual qes_determinant(int n, const PotentialParams& p) {
  const double eps = closed_form_energy(n, p);
  const LambdaPair lam = lambda_coeffs(p, eps);
  const double s = std::sqrt(-eps);
  const double delta = p.delta();
  const double l2scale = lambda2_scale(p, eps);

  double raw_km2 = 1.0, raw_km1 = 1.0, nrm_km2 = 1.0, nrm_km1 = 1.0;
  double raw_super_prev = 0.0, nrm_super_prev = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double diag = lam.lambda2 - 2.0 * k * delta - double(k) * (k - 1);
    const double diag_scale = l2scale + 2.0 * k * std::abs(delta) + std::abs(double(k) * (k - 1));
    const double sub = k > 0 ? -2.0 * (n - k + 1) * s : 0.0;
    const double super = k < n ? -2.0 * (k + 1) * p.alpha4 : 0.0;
    const double scale = std::max({diag_scale, std::abs(sub), std::abs(super)});

    const double raw = diag * raw_km1 - sub * raw_super_prev * raw_km2;
    const double nrm = (diag / scale) * nrm_km1 - (sub / scale) * nrm_super_prev * nrm_km2;
    raw_km2 = raw_km1;
    raw_km1 = raw;
    nrm_km2 = nrm_km1;
    nrm_km1 = nrm;
    raw_super_prev = super;
    nrm_super_prev = super / scale;
  }
  return {raw_km1, nrm_km1};
}

inline double qes_determinant_residual(int n, const PotentialParams& p) {
  return qes_determinant(n, p).normalized;
}

/// Left side of the ground-state constraint 4 a2 a4^2 - a3^2 - 2 a3 a4 + 8 a4^3 sqrt(-eps0)
/// (equals 4 alpha4^2 lambda2 at eps0).
inline double ground_constraint_residual(const PotentialParams& p) {
  const double s = std::sqrt(-closed_form_energy(0, p));
  const double a3 = p.alpha3, a4 = p.alpha4;
  return 4.0 * p.alpha2 * a4 * a4 - a3 * a3 - 2.0 * a3 * a4 + 8.0 * a4 * a4 * a4 * s;
}

/// alpha2 that closes the ground-state constraint (linear in alpha2).
inline double solve_alpha2_ground(double alpha1, double alpha3, double alpha4) {
  if (alpha4 == 0.0) throw SingularError("alpha4 = 0");
  const PotentialParams p{alpha1, 0.0, alpha3, alpha4};
  const double s = std::sqrt(-closed_form_energy(0, p));
  return (alpha3 * alpha3 + 2.0 * alpha3 * alpha4 - 8.0 * alpha4 * alpha4 * alpha4 * s) /
         (4.0 * alpha4 * alpha4);
}

/// The three additive terms of the first-excited-state polynomial constraint.
struct FirstExcitedTerms {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double sum() const { return t1 + t2 + t3; }
  double normalized() const {
    const double m = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
    return m > 0.0 ? sum() / m : 0.0;
  }
};

inline FirstExcitedTerms first_excited_terms(const PotentialParams& p) {
  const double a1 = p.alpha1, a2 = p.alpha2, a3 = p.alpha3, a4 = p.alpha4;
  const double a4_2 = a4 * a4, a4_4 = a4_2 * a4_2, a4_8 = a4_4 * a4_4;
  const double xi = a3 + 4.0 * a4;
  FirstExcitedTerms t;
  t.t1 = 64.0 * a1 * a1 * a4_8;
  t.t2 = 16.0 * a4_4 * xi * (a3 * a3 + 4.0 * a3 * a4 + 8.0 * a4_2 - 4.0 * a2 * a4_2) * a1;
  t.t3 = xi * xi * (a3 * a3 + 2.0 * a3 * a4 - 4.0 * a2 * a4_2) *
         (a3 * a3 + 6.0 * a3 * a4 + 8.0 * a4_2 - 4.0 * a2 * a4_2);
  return t;
}

/// First-excited-state constraint, divided by its largest additive term.
inline double first_excited_constraint_residual(const PotentialParams& p) {
  p.require_admissible();
  return first_excited_terms(p).normalized();
}

/// Real alpha2 roots of lambda2 (lambda2 - 2 delta) = 4 alpha4 sqrt(-eps1), ascending.
/// lambda2 is alpha2 plus an alpha2-independent shift, so the roots are
/// lambda2 = delta -/+ sqrt(delta^2 + 4 alpha4 sqrt(-eps1)).
inline std::vector<double> solve_constraint_n1(double alpha1, double alpha3, double alpha4) {
  const PotentialParams p{alpha1, 0.0, alpha3, alpha4};
  const double eps = closed_form_energy(1, p);
  const double shift = lambda_coeffs(p, eps).lambda2;  // lambda2 at alpha2 = 0
  const double delta = p.delta();
  const double disc = delta * delta + 4.0 * alpha4 * std::sqrt(-eps);
  if (disc < 0.0) return {};
  const double r = std::sqrt(disc);
  // Stable pair: the small-magnitude root from the product lambda2+ lambda2- = -4 a4 s.
  const double big = delta + (delta >= 0.0 ? r : -r);
  const double small = big != 0.0 ? -4.0 * alpha4 * std::sqrt(-eps) / big : 0.0;
  std::vector<double> roots{big - shift, small - shift};
  std::sort(roots.begin(), roots.end());
  if (disc == 0.0) roots.pop_back();
  return roots;
}

/// Analytic bound state; requires the normalized determinant residual within tolerance.
inline WaveFunctionSpec build_wavefunction(int n, const PotentialParams& p,
                                           double tolerance = kClosureTolerance) {
  const DeterminantResidual det = qes_determinant(n, p);
  if (!(std::abs(det.normalized) <= tolerance))
    throw ConstraintViolation("QES constraint not satisfied", det.normalized);
  const double eps = closed_form_energy(n, p);
  WaveFunctionSpec spec;
  spec.power = p.delta();
  spec.exp_coeffs = {std::sqrt(-eps), p.alpha4, 0.0, 0.0};
  spec.poly_coeffs = recursion_polynomial(n, p, eps).coeffs;
  return spec;
}

}  // namespace coulomb4
