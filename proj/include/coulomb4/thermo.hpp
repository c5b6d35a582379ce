#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "core.hpp"
#include "erfi.hpp"

// Bound-state canonical partition function built on the QES spectrum
//   Z = sum_{n=0}^{nu} exp(-eps_n / T),  eps_n = -alpha1^2 alpha4^2 / (alpha3 + 2(n+1) alpha4)^2.
// The summands are continued to real n as f(x) = exp(K / (xi1 + 2 alpha4 x)^2) with
// K = alpha1^2 alpha4^2 / T and xi1 = alpha3 + 2 alpha4.

namespace coulomb4 {

struct PartitionRequest {
  PotentialParams params;
  double temperature = 1.0;
  int nu = 0;
  int em_order = 2;
};

struct PartitionResult {
  double z_direct = 0.0;
  double z_euler_maclaurin = 0.0;
  double integral_term = 0.0;
  double boundary_term = 0.0;
  std::vector<double> correction_terms;  // m = 1..k
  double remainder_estimate = 0.0;       // |first omitted correction|
};

inline constexpr double kMaxExponent = 700.0;

namespace detail {

struct Summand {
  double K, xi1, step;  // f(x) = exp(K / (xi1 + step x)^2)

  double u(double x) const { return xi1 + step * x; }
  double exponent(double x) const {
    const double w = 1.0 / u(x);
    return K * w * w;
  }
};

inline Summand make_summand(const PotentialParams& p, double T, int nu) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  if (nu < 0) throw DomainError("cutoff nu must be non-negative");
  if (!(p.alpha4 > 0.0)) throw DomainError("alpha4 must be positive");
  Summand s{p.alpha1 * p.alpha1 * p.alpha4 * p.alpha4 / T, p.alpha3 + 2.0 * p.alpha4, 2.0 * p.alpha4};
  const double u0 = s.u(0.0), u1 = s.u(nu);
  if (u0 == 0.0 || u1 == 0.0 || (u0 < 0.0) != (u1 < 0.0))
    throw SingularError("energy denominator alpha3 + 2(n+1) alpha4 vanishes inside [0, nu]");
  for (int n = 0; n <= nu; ++n)
    if (s.exponent(n) > kMaxExponent) throw OverflowError("Boltzmann exponent exceeds 700");
  return s;
}

// m-th derivative of g(u) = exp(K/u^2) is P_m(1/u) exp(K/u^2); returns P_m's coefficients in w = 1/u.
inline std::vector<double> derivative_poly(double K, int m) {
  std::vector<double> p{1.0};
  for (int j = 0; j < m; ++j) {
    // P' = -w^2 dP/dw - 2K w^3 P
    std::vector<double> next(p.size() + 3, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i > 0) next[i + 1] -= static_cast<double>(i) * p[i];
      next[i + 3] -= 2.0 * K * p[i];
    }
    p = std::move(next);
  }
  return p;
}

inline double summand_derivative(const Summand& s, int m, double x) {
  const auto poly = derivative_poly(s.K, m);
  const double w = 1.0 / s.u(x);
  double acc = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * w + *it;
  return std::pow(s.step, m) * acc * std::exp(s.K * w * w);
}

// B_2, B_4, ..., B_10 and (2m)!.
inline constexpr std::array<double, 5> kBernoulliEven{1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
inline constexpr std::array<double, 5> kFactorialEven{2.0, 24.0, 720.0, 40320.0, 3628800.0};

}  // namespace detail

/// Direct truncated sum with Neumaier-compensated accumulation.
inline double partition_direct(const PartitionRequest& req) {
  const auto s = detail::make_summand(req.params, req.temperature, req.nu);
  double sum = 0.0, comp = 0.0;
  for (int n = 0; n <= req.nu; ++n) {
    const double term = std::exp(s.exponent(n));
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

/// Closed-form integral of the continued summand over [0, nu]:
///   I = sqrt(pi) a1 (erfi(a1 a4/(xi1 sqrt T)) - erfi(a1 a4/(sqrt T (2 a4 nu + xi1)))) / (2 sqrt T)
///     + ((2 a4 nu + xi1) exp(a1^2 a4^2/(T (2 a4 nu + xi1)^2)) - xi1 exp(a1^2 a4^2/(T xi1^2))) / (2 a4).
inline double erfi_integral(const PotentialParams& p, double T, int nu) {
  const double xi1 = p.alpha3 + 2.0 * p.alpha4;
  if (xi1 == 0.0) throw SingularError("xi1 = alpha3 + 2 alpha4 vanishes");
  detail::make_summand(p, T, nu);
  const double sT = std::sqrt(T);
  const double a1a4 = p.alpha1 * p.alpha4;
  const double top = 2.0 * p.alpha4 * nu + xi1;
  const double erfi_part = std::sqrt(std::numbers::pi) * p.alpha1 *
                           (erfi(a1a4 / (xi1 * sT)) - erfi(a1a4 / (sT * top))) / (2.0 * sT);
  const double exp_part = (top * std::exp(a1a4 * a1a4 / (T * top * top)) -
                           xi1 * std::exp(a1a4 * a1a4 / (T * xi1 * xi1))) /
                          (2.0 * p.alpha4);
  return erfi_part + exp_part;
}

/// Euler-Maclaurin evaluation with analytic odd-order derivatives of the summand.
inline PartitionResult partition_euler_maclaurin(const PartitionRequest& req) {
  if (req.em_order < 1 || req.em_order > 4) throw DomainError("Euler-Maclaurin order must be in 1..4");
  const auto s = detail::make_summand(req.params, req.temperature, req.nu);
  PartitionResult out;
  out.z_direct = partition_direct(req);
  out.integral_term = erfi_integral(req.params, req.temperature, req.nu);
  out.boundary_term = 0.5 * (std::exp(s.exponent(req.nu)) + std::exp(s.exponent(0)));
  out.z_euler_maclaurin = out.integral_term + out.boundary_term;
  auto term = [&](int m) {
    const int order = 2 * m - 1;
    const double diff = detail::summand_derivative(s, order, req.nu) - detail::summand_derivative(s, order, 0.0);
    const auto i = static_cast<std::size_t>(m - 1);
    return detail::kBernoulliEven[i] / detail::kFactorialEven[i] * diff;
  };
  for (int m = 1; m <= req.em_order; ++m) {
    out.correction_terms.push_back(term(m));
    out.z_euler_maclaurin += out.correction_terms.back();
  }
  out.remainder_estimate = std::abs(term(req.em_order + 1));
  return out;
}

struct ThermoRow {
  double T = 0.0;
  double Z = 0.0;
  double F = 0.0;  // -T ln Z
  std::optional<double> U, C, S;
};

/// F, U, C, S on a temperature grid. Derivatives of ln Z are taken in the inverse temperature
/// b = 1/T with three-point non-uniform central differences (exact for quadratics in b):
/// U = -d ln Z / db, C = b^2 d^2 ln Z / db^2, S = (U - F)/T. Endpoint rows carry Z and F only.
inline std::vector<ThermoRow> thermo_quantities(const PotentialParams& p, const std::vector<double>& T_grid,
                                                int nu) {
  if (T_grid.size() < 3) throw DomainError("temperature grid needs at least three points");
  for (std::size_t i = 1; i < T_grid.size(); ++i)
    if (!(T_grid[i] > T_grid[i - 1])) throw DomainError("temperature grid must be strictly increasing");
  std::vector<ThermoRow> rows(T_grid.size());
  std::vector<double> lnz(T_grid.size()), b(T_grid.size());
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    const double T = T_grid[i];
    rows[i].T = T;
    rows[i].Z = partition_direct({p, T, nu, 1});
    lnz[i] = std::log(rows[i].Z);
    rows[i].F = -T * lnz[i];
    b[i] = 1.0 / T;
  }
  for (std::size_t i = 1; i + 1 < T_grid.size(); ++i) {
    const double h1 = b[i] - b[i - 1], h2 = b[i + 1] - b[i];
    const double d1 = -h2 / (h1 * (h1 + h2)) * lnz[i - 1] + (h2 - h1) / (h1 * h2) * lnz[i] +
                      h1 / (h2 * (h1 + h2)) * lnz[i + 1];
    const double d2 = 2.0 * (lnz[i - 1] / (h1 * (h1 + h2)) - lnz[i] / (h1 * h2) + lnz[i + 1] / (h2 * (h1 + h2)));
    const double U = -d1;
    rows[i].U = U;
    rows[i].C = b[i] * b[i] * d2;
    rows[i].S = (U - rows[i].F) / rows[i].T;
  }
  return rows;
}

}  // namespace coulomb4
