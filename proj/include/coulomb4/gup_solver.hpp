#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "wavefunction.hpp"

// Bethe-ansatz solutions of (-d^2/dx^2 + V_e) psi = 0 with
//   psi^G = x^f exp(-a x - b/x - c/x^2 - d/x^3) prod_i (x - x_i).

namespace coulomb4 {

struct AnsatzParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double f = 0.0;
  /// Largest relative disagreement between the alpha-form and the gamma-form of b, c, d, f;
  /// NaN when gamma8 = 0 and the gamma-form is undefined.
  double dual_form_discrepancy = std::numeric_limits<double>::quiet_NaN();
};

/// The same five parameters read off the effective-potential coefficients.
inline AnsatzParams ansatz_from_gammas(const EffectiveCoefficients& gc) {
  const auto& g = gc.gamma;
  if (!(g[0] > 0.0)) throw DomainError("gamma0 = beta eps^2 - eps_G must be positive");
  if (!(g[8] > 0.0)) throw DomainError("gamma8 must be positive for the gamma-form");
  const double r8 = std::sqrt(g[8]);
  AnsatzParams out;
  out.a = std::sqrt(g[0]);
  out.b = -(g[7] * g[7] - 4.0 * g[6] * g[8]) / (8.0 * g[8] * r8);
  out.c = g[7] / (4.0 * r8);
  out.d = r8 / 3.0;
  out.f = 2.0 + (8.0 * g[5] * g[8] * g[8] - 4.0 * g[6] * g[7] * g[8] + g[7] * g[7] * g[7]) /
                    (16.0 * g[8] * g[8] * r8);
  return out;
}

inline AnsatzParams ansatz_parameters(const PotentialParams& p, const GupContext& g,
                                      const EnergyPair& e) {
  g.validate();
  const double a_sq = g.beta * e.eps_ordinary * e.eps_ordinary - e.eps_gup;
  if (!(a_sq > 0.0)) throw DomainError("beta eps^2 - eps_G must be positive");
  const double sb = std::sqrt(g.beta);
  AnsatzParams out;
  out.a = std::sqrt(a_sq);
  out.b = p.alpha2 * sb;
  out.c = 0.5 * p.alpha3 * sb;
  out.d = p.alpha4 * p.alpha4 * sb / 3.0;
  out.f = 2.0 + p.alpha1 * sb;

  const EffectiveCoefficients gc = effective_coefficients(p, g, e);
  if (gc.gamma[8] > 0.0) {
    const AnsatzParams alt = ansatz_from_gammas(gc);
    // The gamma-forms of b and f subtract nearly equal products; their rounding is judged
    // against the magnitude of those products rather than against the (possibly small) result.
    const auto& gm = gc.gamma;
    const double r8 = std::sqrt(gm[8]);
    const double b_scale = (gm[7] * gm[7] + 4.0 * std::abs(gm[6]) * gm[8]) / (8.0 * gm[8] * r8);
    const double f_scale = (8.0 * std::abs(gm[5]) * gm[8] * gm[8] + 4.0 * std::abs(gm[6] * gm[7]) * gm[8] +
                            std::abs(gm[7] * gm[7] * gm[7])) /
                           (16.0 * gm[8] * gm[8] * r8);
    auto rel = [](double x, double y, double scale) {
      const double m = std::max({std::abs(x), std::abs(y), scale});
      return m > 0.0 ? std::abs(x - y) / m : 0.0;
    };
    out.dual_form_discrepancy = std::max({rel(out.b, alt.b, b_scale), rel(out.c, alt.c, 0.0),
                                          rel(out.d, alt.d, 0.0), rel(out.f - 2.0, alt.f - 2.0, f_scale)});
  }
  return out;
}

/// Closed-form GUP energy
///   eps_G = -(alpha1^2/4) ((2 beta eps - 1)/(alpha1 sqrt(beta) + n + 2))^2 + beta eps^2.
inline double gup_energy(int n, double eps_ordinary, double alpha1, double beta) {
  if (n < 0) throw DomainError("quantum number must be non-negative");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  const double den = alpha1 * std::sqrt(beta) + n + 2.0;
  if (den == 0.0) throw SingularError("alpha1 sqrt(beta) + n + 2 = 0");
  if (den < 0.0) throw DomainError("alpha1 sqrt(beta) + n + 2 must be positive");
  const double q = 2.0 * beta * eps_ordinary - 1.0;
  return -(alpha1 * alpha1 * q * q) / (4.0 * den * den) + beta * eps_ordinary * eps_ordinary;
}

/// Energy condition alpha1 [1 + 2 sqrt(beta) A - 2 beta eps] + 2 (n + 2) A with
/// A = sqrt(beta eps^2 - eps_G); vanishes at the output of gup_energy.
inline double gup_energy_condition(int n, double eps_ordinary, double eps_gup, double alpha1,
                                   double beta) {
  const double A = std::sqrt(beta * eps_ordinary * eps_ordinary - eps_gup);
  return alpha1 * (1.0 + 2.0 * std::sqrt(beta) * A - 2.0 * beta * eps_ordinary) +
         2.0 * (n + 2.0) * A;
}

struct GupSolution {
  int n = 0;
  double alpha1 = 0.0;
  double beta = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double alpha4 = 0.0;
  double eps_ordinary = 0.0;
  double eps_gup = 0.0;
  std::vector<double> bethe_roots;
  double residual_norm = std::numeric_limits<double>::infinity();
  std::vector<std::string> diagnostics;

  PotentialParams params() const { return {alpha1, alpha2, alpha3, alpha4}; }
  GupContext context() const { return {beta}; }
  EnergyPair energies() const { return {eps_ordinary, eps_gup, n}; }
};

inline EffectiveCoefficients gup_effective_coefficients(const GupSolution& sol) {
  return effective_coefficients(sol.params(), sol.context(), sol.energies());
}

namespace detail {

struct RootSums {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, pairs = 0.0;
};

inline RootSums root_sums(const std::vector<double>& x) {
  RootSums r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.s1 += x[i];
    r.s2 += x[i] * x[i];
    r.s3 += x[i] * x[i] * x[i];
    for (std::size_t j = i + 1; j < x.size(); ++j) r.pairs += x[i] * x[j];
  }
  return r;
}

// Energies implied by (alpha1, alpha3, alpha4, beta) at level n; NaN on the energy pole.
inline void implied_energies(int n, double alpha1, double alpha3, double alpha4, double beta,
                             double& eps, double& eps_g) {
  const double den = alpha3 + 2.0 * (n + 1) * alpha4;
  eps = -alpha1 * alpha1 * alpha4 * alpha4 / (den * den);
  eps_g = gup_energy(n, eps, alpha1, beta);
}

}  // namespace detail

/// Left-hand sides of the four general conditions (energy relation and the alpha2, alpha3,
/// alpha4 constraints) for the state described by sol.
inline std::array<double, 4> general_condition_residuals(const GupSolution& sol) {
  const AnsatzParams ap = ansatz_parameters(sol.params(), sol.context(), sol.energies());
  const auto& g = gup_effective_coefficients(sol).gamma;
  const auto rs = detail::root_sums(sol.bethe_roots);
  const double a = ap.a, b = ap.b, c = ap.c, d = ap.d, f = ap.f;
  const double n = sol.n;
  return {
      2.0 * a * f + 2.0 * a * n + g[1],
      f * (f - 1.0) - 2.0 * a * b - g[2] - 2.0 * a * rs.s1 + 2.0 * f * n + (n - 1.0) * n,
      2.0 * b * f - 4.0 * a * c - 2.0 * b - g[3] - 2.0 * a * rs.s2 + 2.0 * (f + n - 1.0) * rs.s1 +
          2.0 * n * b,
      b * b - 6.0 * a * d + 4.0 * c * f - 6.0 * c - g[4] - 2.0 * a * rs.s3 +
          2.0 * (f + n - 1.0) * rs.s2 + 2.0 * rs.pairs + 2.0 * b * rs.s1 + 4.0 * n * c,
  };
}

/// Bethe ansatz equations
///   sum_{j != i} 1/(x_i - x_j) - [x_i^4 A - sqrt(beta)(a4^2 + a1 x_i^3 + a2 x_i^2 + a3 x_i) - 2 x_i^3] / x_i^4.
inline std::vector<double> bethe_residuals(const GupSolution& sol) {
  const auto& x = sol.bethe_roots;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) throw DomainError("Bethe root at the origin");
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[i] == x[j]) throw DomainError("coincident Bethe roots");
  }
  const double A = std::sqrt(sol.beta * sol.eps_ordinary * sol.eps_ordinary - sol.eps_gup);
  const double sb = std::sqrt(sol.beta);
  const double a4sq = sol.alpha4 * sol.alpha4;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double pair = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != i) pair += 1.0 / (x[i] - x[j]);
    const double xi = x[i], x2 = xi * xi, x3 = x2 * xi, x4 = x2 * x2;
    const double num = x4 * A - sb * (a4sq + sol.alpha1 * x3 + sol.alpha2 * x2 + sol.alpha3 * xi) -
                       2.0 * x3;
    out[i] = pair - num / x4;
  }
  return out;
}

/// Single-root Bethe equation in polynomial form:
///   A x1^4 - (2 + a1 sqrt(beta)) x1^3 - sqrt(beta) (a2 x1^2 + a3 x1 + a4^2).
inline double bethe_quartic_residual(const GupSolution& sol) {
  if (sol.bethe_roots.size() != 1) throw DomainError("quartic form applies to n = 1 only");
  const double A = std::sqrt(sol.beta * sol.eps_ordinary * sol.eps_ordinary - sol.eps_gup);
  const double sb = std::sqrt(sol.beta);
  const double x = sol.bethe_roots[0];
  return A * x * x * x * x - (2.0 + sol.alpha1 * sb) * x * x * x -
         sb * (sol.alpha2 * x * x + sol.alpha3 * x + sol.alpha4 * sol.alpha4);
}

struct SolverOptions {
  int fixed_point_steps = 200;
  int newton_steps = 100;
  double initial_damping = 0.5;
  double tolerance = 1e-9;
};

namespace detail {

// Ground-state constraint system in (alpha2, alpha3, alpha4):
//   alpha2 = (2 + 3 sb a1)/D,  alpha3 = 2 sb alpha2/D,  alpha4^2 = sb alpha3/D,
//   D = 2 sqrt(beta) A - 2 beta eps0 + 1.
struct GroundSystem {
  double alpha1, beta;

  bool energies(const Eigen::Vector3d& v, double& eps, double& eps_g, double& D) const {
    implied_energies(0, alpha1, v[1], v[2], beta, eps, eps_g);
    const double A = std::sqrt(beta * eps * eps - eps_g);
    D = 2.0 * std::sqrt(beta) * A - 2.0 * beta * eps + 1.0;
    return std::isfinite(D);
  }

  Eigen::Vector3d residual(const Eigen::Vector3d& v) const {
    double eps, eps_g, D;
    if (!energies(v, eps, eps_g, D)) return Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());
    const double sb = std::sqrt(beta);
    return {v[0] - (2.0 + 3.0 * sb * alpha1) / D, v[1] - 2.0 * sb * v[0] / D,
            v[2] * v[2] - sb * v[1] / D};
  }

  // Gauss-Seidel sweep of the constraint map.
  Eigen::Vector3d map(const Eigen::Vector3d& v) const {
    double eps, eps_g, D;
    if (!energies(v, eps, eps_g, D)) return Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());
    const double sb = std::sqrt(beta);
    const double a2 = (2.0 + 3.0 * sb * alpha1) / D;
    const double a3 = 2.0 * sb * a2 / D;
    const double a4sq = sb * a3 / D;
    return {a2, a3, a4sq > 0.0 ? std::sqrt(a4sq) : std::numeric_limits<double>::quiet_NaN()};
  }
};

// First-excited system in (alpha2, alpha3, alpha4, x1); the last component is the Bethe
// equation divided by x1^4.
struct ExcitedSystem {
  double alpha1, beta;

  Eigen::Vector4d residual(const Eigen::Vector4d& v) const {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double a2 = v[0], a3 = v[1], a4 = v[2], x1 = v[3];
    if (x1 == 0.0) return Eigen::Vector4d::Constant(nan);
    double eps, eps_g;
    implied_energies(1, alpha1, a3, a4, beta, eps, eps_g);
    const double A = std::sqrt(beta * eps * eps - eps_g);
    const double sb = std::sqrt(beta);
    const double den = -2.0 * sb * A + 2.0 * beta * eps - 1.0;
    const double r2 = a2 - (2.0 * x1 * A - 5.0 * alpha1 * sb - 6.0) / den;
    const double r3 = a3 - (2.0 * x1 * x1 * A - 2.0 * sb * (2.0 * a2 + alpha1 * x1) - 4.0 * x1) / den;
    const double r4 = a4 * a4 - (2.0 * x1 * x1 * x1 * A - sb * (3.0 * a3 + 2.0 * (a2 + alpha1 * x1) * x1) -
                                 4.0 * x1 * x1) / den;
    const double w = 1.0 / x1;
    const double rb = A - (2.0 + alpha1 * sb) * w - sb * w * w * (a2 + w * (a3 + w * a4 * a4));
    return {r2, r3, r4, rb};
  }

  // Constraint map for fixed x1 (used to place seeds on the constraint manifold).
  Eigen::Vector4d map(const Eigen::Vector4d& v) const {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double x1 = v[3];
    double eps, eps_g;
    implied_energies(1, alpha1, v[1], v[2], beta, eps, eps_g);
    const double A = std::sqrt(beta * eps * eps - eps_g);
    const double sb = std::sqrt(beta);
    const double den = -2.0 * sb * A + 2.0 * beta * eps - 1.0;
    const double a2 = (2.0 * x1 * A - 5.0 * alpha1 * sb - 6.0) / den;
    const double a3 = (2.0 * x1 * x1 * A - 2.0 * sb * (2.0 * a2 + alpha1 * x1) - 4.0 * x1) / den;
    const double a4sq =
        (2.0 * x1 * x1 * x1 * A - sb * (3.0 * a3 + 2.0 * (a2 + alpha1 * x1) * x1) - 4.0 * x1 * x1) / den;
    return {a2, a3, a4sq > 0.0 ? std::sqrt(a4sq) : nan, x1};
  }
};

template <class Vec>
double max_abs(const Vec& r) {
  return r.allFinite() ? r.cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
}

// Damped Newton with a forward-difference Jacobian and backtracking by halving.
template <class System, class Vec>
double damped_newton(const System& sys, Vec& v, const SolverOptions& opt) {
  constexpr int N = Vec::RowsAtCompileTime;
  using Mat = Eigen::Matrix<double, N, N>;
  Vec r = sys.residual(v);
  double norm = max_abs(r);
  double damping = opt.initial_damping;
  for (int it = 0; it < opt.newton_steps && norm > 1e-15; ++it) {
    Mat J;
    for (int j = 0; j < N; ++j) {
      Vec vp = v;
      const double h = 1e-7 * std::max(1.0, std::abs(v[j]));
      vp[j] += h;
      J.col(j) = (sys.residual(vp) - r) / h;
    }
    if (!J.allFinite()) break;
    const Vec step = J.fullPivLu().solve(-r);
    if (!step.allFinite()) break;
    bool accepted = false;
    for (double t = damping; t >= 1.0 / 1024.0; t *= 0.5) {
      const Vec trial = v + t * step;
      const Vec rt = sys.residual(trial);
      const double nt = max_abs(rt);
      if (nt < norm) {
        v = trial;
        r = rt;
        norm = nt;
        damping = std::min(1.0, 2.0 * t);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return norm;
}

}  // namespace detail

inline void require_ground_range(double alpha1, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("GUP solvers need beta in (0, 1]");
  const double lo = -2.0 / (3.0 * std::sqrt(beta));
  if (!(alpha1 > lo && alpha1 < 0.0))
    throw DomainError("ground state needs -2/(3 sqrt(beta)) < alpha1 < 0");
}

/// Self-consistent ground state for given (alpha1, beta): damped fixed-point iteration of the
/// constraint map seeded by its small-beta expansion, with a Newton fallback.
inline GupSolution solve_ground_gup(double alpha1, double beta, const SolverOptions& opt = {}) {
  require_ground_range(alpha1, beta);
  const detail::GroundSystem sys{alpha1, beta};
  const double sb = std::sqrt(beta);
  Eigen::Vector3d v;
  v[0] = 2.0 + 3.0 * sb * alpha1;
  v[1] = 2.0 * sb * v[0];
  v[2] = std::sqrt(sb * v[1]);

  double norm = detail::max_abs(sys.residual(v));
  double damping = opt.initial_damping;
  for (int it = 0; it < opt.fixed_point_steps && norm > 1e-15; ++it) {
    const Eigen::Vector3d target = sys.map(v);
    bool accepted = false;
    for (double t = damping; t >= 1.0 / 64.0; t *= 0.5) {
      const Eigen::Vector3d trial = v + t * (target - v);
      const double nt = detail::max_abs(sys.residual(trial));
      if (nt < norm) {
        v = trial;
        norm = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (norm > opt.tolerance) norm = detail::damped_newton(sys, v, opt);
  if (!(norm <= opt.tolerance))
    throw NonConvergence("ground-state GUP constraints did not converge", norm);

  GupSolution sol;
  sol.n = 0;
  sol.alpha1 = alpha1;
  sol.beta = beta;
  sol.alpha2 = v[0];
  sol.alpha3 = v[1];
  sol.alpha4 = std::abs(v[2]);
  detail::implied_energies(0, alpha1, sol.alpha3, sol.alpha4, beta, sol.eps_ordinary, sol.eps_gup);
  const auto gc = general_condition_residuals(sol);
  sol.residual_norm = std::max(norm, detail::max_abs(Eigen::Vector4d(gc[0], gc[1], gc[2], gc[3])));
  if (!(sol.alpha2 > 0.0)) sol.diagnostics.push_back("alpha2 is not positive");
  if (!(sol.alpha3 > 0.0)) sol.diagnostics.push_back("alpha3 is not positive");
  return sol;
}

struct ExcitedSearch {
  std::vector<GupSolution> solutions;
  int attempts = 0;
  std::vector<std::string> diagnostics;  // rejected roots (x1 <= 0, alpha4 <= 0)
};

namespace detail {

// Constraints r2, r3, r4 of the first-excited system with the Bethe root held fixed.
struct ExcitedSlice {
  ExcitedSystem sys;
  double x1;

  Eigen::Vector3d residual(const Eigen::Vector3d& a) const {
    return sys.residual(Eigen::Vector4d(a[0], a[1], a[2], x1)).head<3>();
  }
};

// Solve the slice at fixed x1 from a seed; returns the Bethe residual or NaN on failure.
inline double solve_slice(const ExcitedSystem& sys, double x1, Eigen::Vector3d& a, const SolverOptions& opt) {
  const ExcitedSlice slice{sys, x1};
  Eigen::Vector3d v = a;
  for (int k = 0; k < 60; ++k) {
    const Eigen::Vector4d m = sys.map(Eigen::Vector4d(v[0], v[1], v[2], x1));
    if (!m.allFinite()) break;
    const Eigen::Vector3d next = m.head<3>();
    const bool done = (next - v).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, v.cwiseAbs().maxCoeff());
    v = next;
    if (done) break;
  }
  if (!(max_abs(slice.residual(v)) <= 1e-11)) {
    v = a;
    SolverOptions o = opt;
    o.initial_damping = 1.0;
    if (!(damped_newton(slice, v, o) <= 1e-11)) return std::numeric_limits<double>::quiet_NaN();
  }
  a = v;
  return sys.residual(Eigen::Vector4d(v[0], v[1], v[2], x1))[3];
}

}  // namespace detail

/// Search for first-excited solutions (alpha2, alpha3, alpha4, x1). The Bethe root x1 is swept over
/// a logarithmic grid in [1e-2, 1e2]; at each x1 the remaining three constraints are solved
/// (warm-started along the sweep, with alpha-seeds from the ground state and its small-beta
/// expansion). Sign changes of the Bethe residual are polished by Newton on the full system.
inline ExcitedSearch search_first_excited_gup(double alpha1, double beta,
                                              const SolverOptions& opt = {}, int x1_points = 400) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("GUP solvers need beta in (0, 1]");
  if (!(alpha1 < 0.0)) throw DomainError("alpha1 must be negative");
  if (!(alpha1 * std::sqrt(beta) + 3.0 > 0.0)) throw DomainError("alpha1 sqrt(beta) + 3 must be positive");
  const detail::ExcitedSystem sys{alpha1, beta};
  const double sb = std::sqrt(beta);

  std::vector<Eigen::Vector3d> alpha_seeds;
  {
    Eigen::Vector3d s;
    s[0] = 2.0 + 3.0 * sb * alpha1;
    s[1] = 2.0 * sb * s[0];
    s[2] = std::sqrt(std::abs(sb * s[1]));
    alpha_seeds.push_back(s);
    try {
      const GupSolution g = solve_ground_gup(alpha1, beta, opt);
      alpha_seeds.emplace_back(g.alpha2, g.alpha3, g.alpha4);
    } catch (const Error&) {
    }
  }

  ExcitedSearch out;
  std::vector<Eigen::Vector4d> found;
  auto polish = [&](Eigen::Vector4d v) {
    ++out.attempts;
    SolverOptions o = opt;
    o.initial_damping = 1.0;
    const double norm = detail::damped_newton(sys, v, o);
    if (!(norm <= 1e-2 * opt.tolerance)) return;
    if (!(v[3] > 0.0) || !(v[2] > 0.0)) {
      out.diagnostics.push_back("rejected root x1=" + std::to_string(v[3]) + " alpha4=" + std::to_string(v[2]));
      return;
    }
    found.push_back(v);
  };

  // Shrink [xa, xb] around a sign change of the Bethe residual, or around the edge past which
  // the slice has no real alpha4; unsolvable midpoints count as the far side.
  auto refine = [&](double xa, Eigen::Vector3d aa, double ra, double xb) {
    for (int k = 0; k < 200 && std::abs(xb - xa) > 4e-16 * std::abs(xb); ++k) {
      const double mid = 0.5 * (xa + xb);
      Eigen::Vector3d am = aa;
      const double rm = detail::solve_slice(sys, mid, am, opt);
      if (std::isfinite(rm) && (rm < 0.0) == (ra < 0.0)) {
        xa = mid;
        aa = am;
        ra = rm;
      } else {
        xb = mid;
      }
    }
    polish(Eigen::Vector4d(aa[0], aa[1], aa[2], xa));
  };

  for (const auto& seed : alpha_seeds) {
    bool have_prev = false;
    double prev_x = 0.0, prev_r = 0.0;
    Eigen::Vector3d prev_a = seed;
    for (int i = 0; i < x1_points; ++i) {
      const double x1 = std::pow(10.0, -2.0 + 4.0 * i / (x1_points - 1));
      Eigen::Vector3d a = have_prev ? prev_a : seed;
      double r = detail::solve_slice(sys, x1, a, opt);
      if (!std::isfinite(r) && have_prev) {
        a = seed;
        r = detail::solve_slice(sys, x1, a, opt);
      }
      if (!std::isfinite(r)) {
        if (have_prev) refine(prev_x, prev_a, prev_r, x1);
        have_prev = false;
        continue;
      }
      if (have_prev && (r == 0.0 || (r < 0.0) != (prev_r < 0.0))) refine(prev_x, prev_a, prev_r, x1);
      have_prev = true;
      prev_x = x1;
      prev_r = r;
      prev_a = a;
    }
  }

  std::sort(found.begin(), found.end(), [](const Eigen::Vector4d& l, const Eigen::Vector4d& r) {
    return l[2] != r[2] ? l[2] < r[2] : l[3] < r[3];
  });
  std::vector<Eigen::Vector4d> unique;
  for (const auto& v : found) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const Eigen::Vector4d& u) {
      return (u - v).norm() <= 1e-6 * std::max(1.0, u.norm());
    });
    if (!dup) unique.push_back(v);
  }

  for (const auto& v : unique) {
    GupSolution sol;
    sol.n = 1;
    sol.alpha1 = alpha1;
    sol.beta = beta;
    sol.alpha2 = v[0];
    sol.alpha3 = v[1];
    sol.alpha4 = v[2];
    sol.bethe_roots = {v[3]};
    detail::implied_energies(1, alpha1, sol.alpha3, sol.alpha4, beta, sol.eps_ordinary, sol.eps_gup);
    const auto gc = general_condition_residuals(sol);
    const auto br = bethe_residuals(sol);
    sol.residual_norm = std::max({detail::max_abs(sys.residual(v)), std::abs(gc[0]), std::abs(gc[1]),
                                  std::abs(gc[2]), std::abs(gc[3]), std::abs(br[0])});
    if (sol.residual_norm <= opt.tolerance) out.solutions.push_back(std::move(sol));
  }
  return out;
}

inline std::vector<GupSolution> solve_first_excited_gup(double alpha1, double beta,
                                                        const SolverOptions& opt = {}) {
  ExcitedSearch s = search_first_excited_gup(alpha1, beta, opt);
  if (s.solutions.empty())
    throw NonConvergence("no first-excited GUP solution from any seed",
                         std::numeric_limits<double>::infinity(), s.attempts);
  return std::move(s.solutions);
}

inline GupSolution solve_gup(int n, double alpha1, double beta) {
  if (n == 0) return solve_ground_gup(alpha1, beta);
  if (n == 1) return solve_first_excited_gup(alpha1, beta).front();
  throw DomainError("GUP solutions are available for n = 0 and n = 1 only");
}

inline WaveFunctionSpec build_gup_wavefunction(const GupSolution& sol) {
  if (!(sol.residual_norm <= 1e-8))
    throw ConstraintViolation("GUP solution not converged", sol.residual_norm);
  const double sb = std::sqrt(sol.beta);
  WaveFunctionSpec spec;
  spec.power = 2.0 + sol.alpha1 * sb;
  spec.exp_coeffs = {std::sqrt(sol.beta * sol.eps_ordinary * sol.eps_ordinary - sol.eps_gup),
                     sol.alpha2 * sb, 0.5 * sol.alpha3 * sb, sol.alpha4 * sol.alpha4 * sb / 3.0};
  spec.poly_coeffs = poly_from_roots(sol.bethe_roots);
  return spec;
}

}  // namespace coulomb4
