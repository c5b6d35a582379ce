#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ordinary_qes.hpp"

// Double-confluent Heun form of the ordinary problem in y = 2 sqrt(-eps) x:
//   y^2 phi'' + (-y^2 + rho y + eta) phi' - (omega y + lambda2) phi = 0.
// Series are expanded in the Heun variable y.

namespace coulomb4 {

struct DchParams {
  double rho = 0.0;
  double eta = 0.0;
  double omega = 0.0;
  double lambda2 = 0.0;
};

inline DchParams dch_parameters(const PotentialParams& p, double eps) {
  if (!(eps < 0.0)) throw DomainError("DCH parameters need eps < 0");
  if (!(p.alpha4 > 0.0)) throw DomainError("alpha4 must be positive");
  const double s = std::sqrt(-eps);
  const double q = p.alpha3 / p.alpha4;
  return {2.0 + q, 4.0 * p.alpha4 * s, 1.0 + p.alpha1 / (2.0 * s) + 0.5 * q,
          lambda_coeffs(p, eps).lambda2};
}

/// h_0 .. h_N with h_0 = 1, h_1 = lambda2/eta and
/// (k+2) eta h_{k+2} = (lambda2 - k(k+rho+1) - rho) h_{k+1} + (k + omega) h_k.
inline std::vector<double> dch_series(const DchParams& d, int N) {
  if (d.eta == 0.0) throw SingularError("eta = 0");
  if (N < 0) throw DomainError("series order must be non-negative");
  std::vector<double> h(static_cast<std::size_t>(N) + 1, 0.0);
  h[0] = 1.0;
  if (N >= 1) h[1] = d.lambda2 / d.eta;
  for (int k = 0; k + 2 <= N; ++k) {
    const auto i = static_cast<std::size_t>(k);
    h[i + 2] = ((d.lambda2 - k * (k + d.rho + 1.0) - d.rho) * h[i + 1] + (k + d.omega) * h[i]) /
               ((k + 2) * d.eta);
  }
  return h;
}

struct TerminationCheck {
  bool terminates = false;
  double residual = 0.0;  // max(|m + omega|, |h_{m+1}| / max_{k<=m} |h_k|)
};

inline TerminationCheck polynomial_termination_check(const DchParams& d, int m) {
  if (m < 0) throw DomainError("degree must be non-negative");
  const auto h = dch_series(d, m + 1);
  double hmax = 0.0;
  for (int k = 0; k <= m; ++k) hmax = std::max(hmax, std::abs(h[static_cast<std::size_t>(k)]));
  const double omega_gap = std::abs(m + d.omega);
  const double tail = std::abs(h.back()) / hmax;
  return {omega_gap <= 1e-10 && tail <= 1e-8, std::max(omega_gap, tail)};
}

/// Residual of the DCH equation for the truncated series sum_{k<=N} h_k y^k, relative to the
/// magnitudes of the individual terms. The scale also includes the first-order terms a relative
/// change of h over the length y would produce, so a constant solution is not judged against
/// terms that vanish identically.
inline double dch_series_residual(const DchParams& d, std::span<const double> h, double y) {
  if (!(y > 0.0)) throw DomainError("series residual needs y > 0");
  const PolyJet j = poly_jet(h, y);
  const double t1 = y * y * j.d2;
  const double t2 = (-y * y + d.rho * y + d.eta) * j.d1;
  const double t3 = -(d.omega * y + d.lambda2) * j.value;
  const double floor = (y * y + std::abs(d.rho) * y + std::abs(d.eta)) * std::abs(j.value) / y;
  const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + floor;
  return scale > 0.0 ? std::abs(t1 + t2 + t3) / scale : 0.0;
}

struct SeriesEvaluation {
  double value = 0.0;
  double residual = 0.0;
  bool converged = false;  // N and 2N truncations agree to 1e-10
};

/// Evaluates the regular series at y, comparing truncations at N and 2N. The expansion point
/// y = 0 is an irregular singularity, so non-terminating series are generally divergent and
/// report converged = false.
inline SeriesEvaluation dch_evaluate(const DchParams& d, double y, int N = 60) {
  const auto h2 = dch_series(d, 2 * N);
  const std::span<const double> all(h2);
  const double v1 = poly_jet(all.first(static_cast<std::size_t>(N) + 1), y).value;
  const double v2 = poly_jet(all, y).value;
  SeriesEvaluation out;
  out.value = v2;
  out.residual = dch_series_residual(d, all, y);
  out.converged = std::isfinite(v2) && std::abs(v2 - v1) <= 1e-10 * std::max(1.0, std::abs(v2));
  return out;
}

}  // namespace coulomb4
