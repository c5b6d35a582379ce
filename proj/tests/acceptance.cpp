#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <coulomb4/coulomb4.hpp>

using namespace coulomb4;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("criterion %d: %s %s [%.2f s]\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <class F>
void criterion(int id, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  report(id, pass, detail, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

PotentialParams closed(const Fixture& fx) {
  PotentialParams p = fx.params;
  if (fx.n == 0) {
    p.alpha2 = solve_alpha2_ground(p.alpha1, p.alpha3, p.alpha4);
  } else {
    const auto roots = solve_constraint_n1(p.alpha1, p.alpha3, p.alpha4);
    p.alpha2 = std::abs(roots.front() - fx.params.alpha2) <= std::abs(roots.back() - fx.params.alpha2) ? roots.front()
                                                                                                          : roots.back();
  }
  return p;
}

double expanded(const PotentialParams& p, double beta, double eps, double eps_g, double x) {
  const double v = potential_value(p, x);
  return (v - eps_g) + beta * (v - eps) * (v - eps);
}

}  // namespace

int main() {
  criterion(1, [](std::string& d) {
    bool ok = true;
    for (const auto& fx : kFixtures) {
      const double r = fx.n == 0 ? ground_constraint_residual(fx.params) : first_excited_terms(fx.params).normalized();
      const double tol = fx.n == 0 ? 5e-6 : 2e-2;
      const bool pass = std::abs(r) <= tol;
      ok = ok && pass;
      d += std::string(fx.name) + "=" + fmt("%.3e", r) + (pass ? " " : "(!) ");
    }
    const Fixture e1 = *find_fixture("E1");
    double lo = 1e300, hi = -1e300;
    for (int i = -1; i <= 1; ++i)
      for (int k = -1; k <= 1; ++k) {
        const double a2 = solve_constraint_n1(e1.params.alpha1, e1.params.alpha3 + i * kFixtureRounding,
                                              e1.params.alpha4 + k * kFixtureRounding)
                              .front();
        lo = std::min(lo, a2);
        hi = std::max(hi, a2);
      }
    const bool inside = lo - kFixtureRounding <= e1.params.alpha2 && e1.params.alpha2 <= hi + kFixtureRounding;
    d += "| E1 alpha2 rounding-box image [" + fmt("%.5f", lo) + ", " + fmt("%.5f", hi) + "] " +
         (inside ? "contains" : "excludes") + " published " + fmt("%.4f", e1.params.alpha2);
    return ok;
  });

  criterion(2, [](std::string& d) {
    bool ok = true;
    for (const auto& fx : kFixtures) {
      const PotentialParams p = closed(fx);
      const double e = closed_form_energy(fx.n, p);
      const auto spec = build_wavefunction(fx.n, p);
      const auto r = fd_eigen_solve([&](double x) { return potential_value(p, x); }, default_grid(spec, 20000), fx.n + 1);
      const auto i = static_cast<std::size_t>(fx.n);
      const double dev = std::abs(r.eigenvalues[i] - e);
      const double tol = std::max(5e-3 * std::abs(e), r.richardson_errors[i]);
      const bool pass = dev <= tol && r.node_counts[i] == fx.n;
      ok = ok && pass;
      d += std::string(fx.name) + " rel=" + fmt("%.2e", dev / std::abs(e)) + " nodes=" + std::to_string(r.node_counts[i]) +
           (pass ? " " : "(!) ");
    }
    return ok;
  });

  criterion(3, [](std::string& d) {
    double worst = 0.0;
    for (const auto& fx : kFixtures) {
      const PotentialParams p = closed(fx);
      const double e = closed_form_energy(fx.n, p);
      const auto spec = build_wavefunction(fx.n, p);
      worst = std::max(worst, ode_residual(spec, [&](double x) { return potential_value(p, x) - e; }, default_grid(spec)));
    }
    d = "max ODE residual " + fmt("%.2e", worst);
    return worst <= 1e-10;
  });

  criterion(4, [](std::string& d) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ua1(-3.0, -1e-3), ub(1e-6, 1.0), ue(-2.0, -1e-6);
    std::uniform_int_distribution<int> un(0, 3);
    double worst = 0.0;
    int cases = 0;
    while (cases < 1000) {
      const int n = un(rng);
      const double a1 = ua1(rng), b = ub(rng), e = ue(rng);
      if (!(a1 * std::sqrt(b) + n + 2 > 0.0)) continue;
      const double eg = gup_energy(n, e, a1, b);
      worst = std::max(worst, std::abs(gup_energy_condition(n, e, eg, a1, b)) / std::max(1.0, std::abs(a1)));
      ++cases;
    }
    bool exact = true;
    for (int n = 0; n <= 3; ++n)
      for (double a1 : {-1.0, -0.37, -2.5}) exact = exact && gup_energy(n, -0.3, a1, 0.0) == -a1 * a1 / (4.0 * (n + 2) * (n + 2));
    d = "max scaled residual " + fmt("%.2e", worst) + (exact ? ", beta=0 exact" : ", beta=0 mismatch");
    return worst <= 1e-11 && exact;
  });

  criterion(5, [](std::string& d) {
    bool ok = true;
    for (auto [a1, b] : {std::pair{-0.5, 1.0}, std::pair{-0.3, 0.5}}) {
      const GupSolution s = solve_ground_gup(a1, b);
      const bool pass = s.residual_norm <= 1e-9 && s.alpha2 > 0 && s.alpha3 > 0 && s.alpha4 > 0;
      ok = ok && pass;
      d += "ground(" + fmt("%g", a1) + "," + fmt("%g", b) + ") res=" + fmt("%.1e", s.residual_norm) + (pass ? " " : "(!) ");
    }
    const auto ex = solve_first_excited_gup(-0.3, 0.5);
    bool ex_ok = !ex.empty();
    for (const auto& s : ex) {
      const auto spec = build_gup_wavefunction(s);
      const bool one_node = spec.poly_coeffs.size() == 2 && s.bethe_roots.size() == 1 && s.bethe_roots[0] > 0.0;
      ex_ok = ex_ok && one_node && bethe_quartic_residual(s) <= 1e-10 && s.residual_norm <= 1e-9;
      d += "excited x1=" + fmt("%.6g", s.bethe_roots.at(0)) + " quartic=" + fmt("%.1e", bethe_quartic_residual(s)) + " ";
    }
    ok = ok && ex_ok;
    bool rejected = false;
    try {
      solve_ground_gup(-0.7, 1.0);
    } catch (const Error&) {
      rejected = true;
    }
    d += rejected ? "alpha1=-0.7 rejected" : "alpha1=-0.7 accepted(!)";
    return ok && rejected;
  });

  criterion(6, [](std::string& d) {
    std::vector<GupSolution> sols{solve_ground_gup(-0.5, 1.0), solve_ground_gup(-0.3, 0.5)};
    for (const auto& s : solve_first_excited_gup(-0.3, 0.5)) sols.push_back(s);
    double worst_ode = 0.0, worst_id = 0.0;
    for (const auto& s : sols) {
      const auto spec = build_gup_wavefunction(s);
      const auto gc = gup_effective_coefficients(s);
      const GridSpec grid = default_grid(spec);
      worst_ode = std::max(worst_ode, ode_residual(spec, [&](double x) { return effective_potential_value(gc, x); }, grid));
      for (double x : grid.nodes()) {
        const double rhs = expanded(s.params(), s.beta, s.eps_ordinary, s.eps_gup, x);
        worst_id = std::max(worst_id, std::abs(effective_potential_value(gc, x) - rhs) / std::max(1.0, std::abs(rhs)));
      }
    }
    d = std::to_string(sols.size()) + " solutions, ODE " + fmt("%.2e", worst_ode) + ", identity " + fmt("%.2e", worst_id);
    return worst_ode <= 1e-9 && worst_id <= 1e-10;
  });

  criterion(7, [](std::string& d) {
    double w_omega = 0.0, w_term = 0.0, w_prop = 0.0;
    for (const auto& fx : kFixtures) {
      const PotentialParams p = closed(fx);
      const double e = closed_form_energy(fx.n, p);
      const DchParams h = dch_parameters(p, e);
      w_omega = std::max(w_omega, std::abs(h.omega + fx.n));
      const auto series = dch_series(h, fx.n + 1);
      double hmax = 0.0;
      for (int k = 0; k <= fx.n; ++k) hmax = std::max(hmax, std::abs(series[static_cast<std::size_t>(k)]));
      w_term = std::max(w_term, std::abs(series[static_cast<std::size_t>(fx.n) + 1]) / hmax);
      const auto c = recursion_polynomial(fx.n, p, e).coeffs;
      for (int k = 0; k <= fx.n; ++k) {
        const double hk = series[static_cast<std::size_t>(k)] * std::pow(2.0 * std::sqrt(-e), k);
        const double ck = c[static_cast<std::size_t>(k)];
        w_prop = std::max(w_prop, std::abs(hk - ck) / std::max(std::abs(ck), 1.0));
      }
    }
    d = "omega " + fmt("%.1e", w_omega) + ", termination " + fmt("%.1e", w_term) + ", proportionality " + fmt("%.1e", w_prop);
    return w_omega <= 1e-12 && w_term <= 1e-8 && w_prop <= 1e-9;
  });

  criterion(8, [](std::string& d) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ua1(-1.0, -0.05), ua3(-0.05, 0.5), ua4(0.02, 1.0),
        ulogT(std::log(0.1), std::log(10.0));
    const int nus[] = {5, 10, 20};
    double worst_em = 0.0, worst_quad = 0.0;
    int cases = 0;
    while (cases < 50) {
      const PotentialParams p{ua1(rng), 0.0, ua3(rng), ua4(rng)};
      const double T = std::exp(ulogT(rng));
      const int nu = nus[cases % 3];
      PartitionResult r;
      try {
        r = partition_euler_maclaurin({p, T, nu, 2});
      } catch (const Error&) {
        continue;
      }
      worst_em = std::max(worst_em, std::abs(r.z_euler_maclaurin - r.z_direct) /
                                        std::max(2.0 * r.remainder_estimate, 1e-6 * r.z_direct));
      const double K = p.alpha1 * p.alpha1 * p.alpha4 * p.alpha4 / T;
      double q = 0.0;
      for (int j = 0; j < nu; ++j)
        q += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double x) {
              const double u = p.alpha3 + 2.0 * p.alpha4 + 2.0 * p.alpha4 * x;
              return std::exp(K / (u * u));
            },
            j, j + 1, 15, 1e-14);
      worst_quad = std::max(worst_quad, std::abs(r.integral_term - q) / q);
      ++cases;
    }
    double worst_erfi = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const long double z = -5.0L + 10.0L * i / 10000;
      long double term = z, sum = z;
      for (int k = 1; k < 400; ++k) {
        term *= z * z / k;
        sum += term / (2 * k + 1);
      }
      const long double ref = sum * 2.0L / std::sqrt(std::numbers::pi_v<long double>);
      if (ref != 0.0L)
        worst_erfi = std::max(worst_erfi, static_cast<double>(std::abs((erfi(static_cast<double>(z)) - ref) / ref)));
    }
    d = "EM/bound " + fmt("%.2e", worst_em) + ", erfi " + fmt("%.2e", worst_erfi) + ", integral " + fmt("%.2e", worst_quad);
    return worst_em <= 1.0 && worst_erfi <= 1e-12 && worst_quad <= 1e-8;
  });

  criterion(9, [](std::string& d) {
    const double exact = std::numbers::pi * std::numbers::pi;
    double prev = 0.0;
    bool ok = true;
    for (int m : {1000, 2000, 4000, 8000}) {
      GridSpec g;
      g.x_lo = 1.0;
      g.x_hi = 2.0;
      g.points = m + 1;
      g.spacing = Spacing::uniform;
      const double err = std::abs(fd_eigen_solve([](double) { return 0.0; }, g, 1).eigenvalues[0] - exact);
      if (prev > 0.0) {
        const double ratio = prev / err;
        ok = ok && std::abs(ratio - 4.0) <= 0.8;
        d += "ratio " + fmt("%.4f", ratio) + " ";
      }
      prev = err;
    }
    return ok;
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
