#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "wavefunction.hpp"

// Brute-force checks independent of the analytic machinery: a finite-difference Dirichlet
// eigensolver for -psi'' + V psi = E psi on [x_lo, x_hi], the pointwise ODE residual of an
// analytic wavefunction, quadrature normalization and node counting.

namespace coulomb4 {

enum class Spacing { uniform, logarithmic };

struct GridSpec {
  double x_lo = 1e-3;
  double x_hi = 1e2;
  int points = 20000;  // nodes including both Dirichlet endpoints
  Spacing spacing = Spacing::logarithmic;

  void validate() const {
    if (!(x_lo > 0.0)) throw DomainError("grid x_lo must be positive");
    if (!(x_hi > x_lo)) throw DomainError("grid x_hi must exceed x_lo");
    if (points < 1000) throw DomainError("grid needs at least 1000 points");
  }

  std::vector<double> nodes() const {
    std::vector<double> x(static_cast<std::size_t>(points));
    if (spacing == Spacing::uniform) {
      const double h = (x_hi - x_lo) / (points - 1);
      for (int i = 0; i < points; ++i) x[static_cast<std::size_t>(i)] = x_lo + i * h;
    } else {
      const double t0 = std::log(x_lo), ht = (std::log(x_hi) - t0) / (points - 1);
      for (int i = 0; i < points; ++i) x[static_cast<std::size_t>(i)] = std::exp(t0 + i * ht);
    }
    x.front() = x_lo;
    x.back() = x_hi;
    return x;
  }
};

struct OracleResult {
  std::vector<double> eigenvalues;                // ascending
  std::vector<std::vector<double>> eigenvectors;  // psi sampled on grid nodes
  std::vector<int> node_counts;
  GridSpec grid;
  std::vector<double> x;
  std::vector<double> richardson_errors;  // |E_h - E_2h| / 3 per eigenvalue
  double richardson_error = 0.0;          // largest of the above
};

inline int count_nodes(std::span<const double> values) {
  if (values.size() < 3) throw DomainError("node counting needs at least three samples");
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  const double floor = 1e-12 * vmax;
  int nodes = 0;
  int last_sign = 0;
  for (double v : values) {
    if (std::abs(v) <= floor) continue;
    const int sgn = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && sgn != last_sign) ++nodes;
    last_sign = sgn;
  }
  return nodes;
}

namespace detail {

// Symmetric tridiagonal pencil A - lambda W with constant off-diagonal and diagonal W.
struct Pencil {
  std::vector<double> diag;
  std::vector<double> weight;
  double off = 0.0;
  std::vector<double> x;  // interior nodes

  std::size_t size() const { return diag.size(); }

  // Number of eigenvalues strictly below lambda (Sylvester inertia of A - lambda W).
  int count_below(double lambda) const {
    int count = 0;
    double d = 1.0;
    const double off2 = off * off;
    for (std::size_t i = 0; i < diag.size(); ++i) {
      const double a = diag[i] - lambda * weight[i];
      d = i == 0 ? a : a - off2 / d;
      if (d == 0.0) d = -std::numeric_limits<double>::min();
      if (d < 0.0) ++count;
    }
    return count;
  }

  double gershgorin_lower() const {
    double lo = std::numeric_limits<double>::infinity();
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
      double radius = 0.0;
      if (i > 0) radius += std::abs(off) / std::sqrt(weight[i] * weight[i - 1]);
      if (i + 1 < n) radius += std::abs(off) / std::sqrt(weight[i] * weight[i + 1]);
      lo = std::min(lo, diag[i] / weight[i] - radius);
    }
    return lo;
  }

  double eigenvalue(int j, double lower) const {
    double lo = lower, hi = lower + 1.0;
    for (double step = 1.0; count_below(hi) < j + 1; step *= 2.0) hi = lo + step;
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (count_below(mid) >= j + 1)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Inverse iteration on (A - lambda W) u = W u_prev with a pivoted tridiagonal LU.
  std::vector<double> eigenvector(double lambda) const {
    const std::size_t n = diag.size();
    std::vector<double> dl(n, off), d(n), du(n, off), du2(n, 0.0);
    std::vector<int> swapped(n, 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - lambda * weight[i];
    // LU factorization with partial pivoting (LAPACK dgttrf layout).
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = std::numeric_limits<double>::epsilon() * std::abs(off);
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (d[n - 1] == 0.0) d[n - 1] = std::numeric_limits<double>::epsilon() * std::abs(off);

    auto solve = [&](std::vector<double>& b) {
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (swapped[i]) {
          const double temp = b[i];
          b[i] = b[i + 1];
          b[i + 1] = temp - dl[i] * b[i + 1];
        } else {
          b[i + 1] -= dl[i] * b[i];
        }
      }
      b[n - 1] /= d[n - 1];
      if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
      for (std::size_t k = n - 2; k-- > 0;) b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / d[k];
    };

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(0.5, 1.5);
    std::vector<double> u(n);
    for (auto& v : u) v = uni(rng);
    for (int it = 0; it < 4; ++it) {
      for (std::size_t i = 0; i < n; ++i) u[i] *= weight[i];
      solve(u);
      double m = 0.0;
      for (double v : u) m = std::max(m, std::abs(v));
      for (auto& v : u) v /= m;
    }
    return u;
  }
};

inline Pencil build_pencil(const std::function<double(double)>& potential, const GridSpec& grid) {
  const std::vector<double> x = grid.nodes();
  Pencil p;
  const std::size_t n = x.size() - 2;
  p.diag.resize(n);
  p.weight.resize(n);
  p.x.assign(x.begin() + 1, x.end() - 1);
  if (grid.spacing == Spacing::uniform) {
    const double h = (grid.x_hi - grid.x_lo) / (grid.points - 1);
    p.off = -1.0 / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
      p.diag[i] = 2.0 / (h * h) + potential(p.x[i]);
      p.weight[i] = 1.0;
    }
  } else {
    // x = e^t, psi = e^{t/2} u:  -u'' + (1/4 + x^2 V) u = E x^2 u.
    const double ht = (std::log(grid.x_hi) - std::log(grid.x_lo)) / (grid.points - 1);
    p.off = -1.0 / (ht * ht);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = p.x[i];
      p.diag[i] = 2.0 / (ht * ht) + 0.25 + xi * xi * potential(xi);
      p.weight[i] = xi * xi;
    }
  }
  return p;
}

inline std::vector<double> lowest_eigenvalues(const Pencil& p, int k) {
  const double lower = p.gershgorin_lower();
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] = p.eigenvalue(j, lower);
  return out;
}

}  // namespace detail

/// Lowest k Dirichlet eigenvalues of -d^2/dx^2 + V on the grid, by Sturm-sequence bisection.
/// The Richardson estimate compares against the same problem on every other node.
/// Throws GridTooCoarse when any relative Richardson estimate exceeds richardson_tolerance.
inline OracleResult fd_eigen_solve(const std::function<double(double)>& potential, const GridSpec& grid,
                                   int k, double richardson_tolerance = std::numeric_limits<double>::infinity()) {
  grid.validate();
  if (k < 1) throw DomainError("need at least one eigenvalue");
  if (k > grid.points / 4) throw DomainError("more states requested than the grid resolves");

  const detail::Pencil fine = detail::build_pencil(potential, grid);
  OracleResult out;
  out.grid = grid;
  out.x = grid.nodes();
  out.eigenvalues = detail::lowest_eigenvalues(fine, k);

  GridSpec coarse_grid = grid;
  coarse_grid.points = (grid.points - 1) / 2 + 1;
  if ((grid.points - 1) % 2 != 0) coarse_grid.points = grid.points / 2;
  const auto coarse = detail::lowest_eigenvalues(detail::build_pencil(potential, coarse_grid), k);

  for (int j = 0; j < k; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double err = std::abs(out.eigenvalues[ju] - coarse[ju]) / 3.0;
    out.richardson_errors.push_back(err);
    out.richardson_error = std::max(out.richardson_error, err);
    const double scale = std::max(std::abs(out.eigenvalues[ju]), std::numeric_limits<double>::min());
    if (err / scale > richardson_tolerance)
      throw GridTooCoarse("Richardson estimate above tolerance", err / scale);

    const std::vector<double> u = fine.eigenvector(out.eigenvalues[ju]);
    std::vector<double> psi(out.x.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i)
      psi[i + 1] = grid.spacing == Spacing::uniform ? u[i] : std::sqrt(fine.x[i]) * u[i];
    // Sign convention: positive where the magnitude first becomes significant.
    double m = 0.0;
    for (double v : psi) m = std::max(m, std::abs(v));
    for (double v : psi) {
      if (std::abs(v) > 1e-3 * m) {
        if (v < 0.0)
          for (auto& w : psi) w = -w;
        break;
      }
    }
    out.node_counts.push_back(count_nodes(psi));
    out.eigenvectors.push_back(std::move(psi));
  }
  return out;
}

/// Largest relative residual |-psi'' + V_e psi| / (|V_e psi| + |psi''|) over interior nodes,
/// with psi'' from exact differentiation of the spec.
inline double ode_residual(const WaveFunctionSpec& spec, const std::function<double(double)>& effective_potential,
                           const GridSpec& grid) {
  if (std::all_of(spec.poly_coeffs.begin(), spec.poly_coeffs.end(), [](double c) { return c == 0.0; }))
    throw DomainError("wavefunction polynomial is identically zero");
  const std::vector<double> x = grid.nodes();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const ScaledJet j = scaled_second_derivative(spec, x[i]);
    const double vpsi = effective_potential(x[i]) * j.phi;
    const double r = std::abs(-j.second + vpsi) / (std::abs(vpsi) + std::abs(j.second) + 1e-300);
    worst = std::max(worst, r);
  }
  return worst;
}

namespace detail {

inline bool square_integrable(const WaveFunctionSpec& s) {
  const bool tail = s.a() > 0.0;
  const bool origin = s.d() > 0.0 || (s.d() == 0.0 && s.c() > 0.0) ||
                      (s.d() == 0.0 && s.c() == 0.0 && s.b() > 0.0) ||
                      (s.d() == 0.0 && s.c() == 0.0 && s.b() == 0.0 && s.power > -0.5);
  return tail && origin;
}

// Composite Simpson of |psi|^2 over [lo, hi] with an odd node count.
inline double simpson_density(const WaveFunctionSpec& s, double lo, double hi, int points, Spacing spacing) {
  if (points % 2 == 0) ++points;
  const int m = points - 1;
  double sum = 0.0;
  const double tlo = spacing == Spacing::uniform ? lo : std::log(lo);
  const double thi = spacing == Spacing::uniform ? hi : std::log(hi);
  const double h = (thi - tlo) / m;
  for (int i = 0; i <= m; ++i) {
    const double t = tlo + i * h;
    const double x = spacing == Spacing::uniform ? t : std::exp(t);
    const double psi = evaluate_wavefunction(s, x);
    const double f = psi * psi * (spacing == Spacing::uniform ? 1.0 : x);
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * f;
  }
  return sum * h / 3.0;
}

}  // namespace detail

struct Normalization {
  double constant = 0.0;       // 1 / sqrt(norm)
  double norm = 0.0;           // integral of |psi|^2 over [x_lo, x_hi]
  double tail_estimate = 0.0;  // relative weight added by extending to 2 x_hi
};

inline Normalization normalize(const WaveFunctionSpec& spec, const GridSpec& grid) {
  grid.validate();
  if (!detail::square_integrable(spec)) throw DomainError("wavefunction is not square-integrable");
  Normalization out;
  out.norm = detail::simpson_density(spec, grid.x_lo, grid.x_hi, grid.points, grid.spacing);
  if (!(out.norm > 0.0) || !std::isfinite(out.norm)) throw DomainError("wavefunction norm is not finite and positive");
  out.constant = 1.0 / std::sqrt(out.norm);
  out.tail_estimate =
      detail::simpson_density(spec, grid.x_hi, 2.0 * grid.x_hi, std::max(1001, grid.points / 4), Spacing::uniform) /
      out.norm;
  return out;
}

/// Real roots of the polynomial factor (ascending coefficients), via the companion matrix.
inline std::vector<double> real_poly_roots(std::span<const double> coeffs) {
  std::size_t deg = coeffs.size();
  while (deg > 0 && coeffs[deg - 1] == 0.0) --deg;
  if (deg <= 1) return {};
  const std::size_t n = deg - 1;
  if (n == 1) return {-coeffs[0] / coeffs[1]};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -coeffs[i] / coeffs[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<double> out;
  for (const auto& z : es.eigenvalues())
    if (std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z.real()))) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

/// Domain tied to the analytic asymptotics: x_lo where the exponent reaches -35 near the
/// origin, x_hi = 40/a beyond the outermost positive polynomial root.
inline GridSpec default_grid(const WaveFunctionSpec& spec, int points = 20000,
                             Spacing spacing = Spacing::logarithmic) {
  if (!(spec.a() > 0.0)) throw DomainError("default grid needs a > 0");
  auto exponent = [&](double x) {
    const double w = 1.0 / x;
    return spec.a() * x + w * (spec.b() + w * (spec.c() + w * spec.d()));
  };
  double x_lo = 1e-10;
  if (detail::square_integrable(spec) && (spec.b() > 0.0 || spec.c() > 0.0 || spec.d() > 0.0)) {
    double hi = 1.0;
    while (exponent(hi) >= 35.0 && hi > 1e-300) hi *= 0.5;
    double lo = hi;
    while (exponent(lo) < 35.0 && lo > 1e-300) lo *= 0.5;
    for (int it = 0; it < 200; ++it) {
      const double mid = std::sqrt(lo * hi);
      (exponent(mid) >= 35.0 ? lo : hi) = mid;
    }
    x_lo = lo;
  }
  double outer = 0.0;
  for (double r : real_poly_roots(spec.poly_coeffs)) outer = std::max(outer, r);
  GridSpec g;
  g.x_lo = x_lo;
  g.x_hi = 40.0 / spec.a() + outer;
  g.points = points;
  g.spacing = spacing;
  return g;
}

}  // namespace coulomb4
