#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <coulomb4/coulomb4.hpp>

using namespace coulomb4;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec box(double L, int points) {
  GridSpec g;
  g.x_lo = 1.0;
  g.x_hi = 1.0 + L;
  g.points = points;
  g.spacing = Spacing::uniform;
  return g;
}

PotentialParams closed(const char* name) {
  const Fixture fx = *find_fixture(name);
  PotentialParams p = fx.params;
  p.alpha2 = fx.n == 0 ? solve_alpha2_ground(p.alpha1, p.alpha3, p.alpha4)
                       : solve_constraint_n1(p.alpha1, p.alpha3, p.alpha4).front();
  return p;
}

}  // namespace

TEST(Box, EigenvaluesAndNodes) {
  const auto r = fd_eigen_solve([](double) { return 0.0; }, box(2.0, 4001), 5);
  for (int k = 0; k < 5; ++k) {
    const double exact = std::pow((k + 1) * kPi / 2.0, 2);
    EXPECT_NEAR(r.eigenvalues[static_cast<std::size_t>(k)], exact, 1e-5 * exact);
    EXPECT_EQ(r.node_counts[static_cast<std::size_t>(k)], k);
  }
  for (std::size_t k = 1; k < r.eigenvalues.size(); ++k) EXPECT_GT(r.eigenvalues[k], r.eigenvalues[k - 1]);
}

TEST(Box, SecondOrderConvergence) {
  const double exact = kPi * kPi;
  double prev_err = 0.0;
  for (int m : {1000, 2000, 4000, 8000}) {
    const double e = fd_eigen_solve([](double) { return 0.0; }, box(1.0, m + 1), 1).eigenvalues[0];
    const double err = std::abs(e - exact);
    if (prev_err > 0.0) EXPECT_NEAR(prev_err / err, 4.0, 0.8) << m;
    prev_err = err;
  }
}

TEST(Box, RichardsonEstimateTracksError) {
  const auto r = fd_eigen_solve([](double) { return 0.0; }, box(1.0, 2001), 1);
  const double err = std::abs(r.eigenvalues[0] - kPi * kPi);
  EXPECT_NEAR(r.richardson_errors[0], err, 0.05 * err);
  EXPECT_THROW(fd_eigen_solve([](double) { return 0.0; }, box(1.0, 2001), 1, 1e-9), GridTooCoarse);
}

TEST(Grid, Validation) {
  GridSpec g = box(1.0, 999);
  EXPECT_THROW(g.validate(), DomainError);
  g = box(1.0, 2000);
  g.x_lo = 0.0;
  EXPECT_THROW(g.validate(), DomainError);
  g = box(1.0, 2000);
  g.x_hi = 0.5;
  EXPECT_THROW(g.validate(), DomainError);
  EXPECT_THROW(fd_eigen_solve([](double) { return 0.0; }, box(1.0, 2000), 600), DomainError);
  EXPECT_THROW(fd_eigen_solve([](double) { return 0.0; }, box(1.0, 2000), 0), DomainError);
}

TEST(Bare, GroundFixtureEigenvalue) {
  const PotentialParams p = closed("G1");
  const auto r = fd_eigen_solve([&](double x) { return potential_value(p, x); },
                                default_grid(build_wavefunction(0, p)), 1);
  EXPECT_NEAR(r.eigenvalues[0], -0.3468, 0.005 * 0.3468);
  EXPECT_NEAR(r.eigenvalues[0], closed_form_energy(0, p), 1e-5 * 0.3468);
  EXPECT_EQ(r.node_counts[0], 0);
}

TEST(Bare, FirstExcitedFixtureEigenvalue) {
  const PotentialParams p = closed("E1");
  const auto r = fd_eigen_solve([&](double x) { return potential_value(p, x); },
                                default_grid(build_wavefunction(1, p)), 2);
  EXPECT_NEAR(r.eigenvalues[1], -2.589e-3, 0.01 * 2.589e-3);
  EXPECT_EQ(r.node_counts[1], 1);
}

TEST(Bare, DomainAdequacy) {
  const PotentialParams p = closed("G2");
  const WaveFunctionSpec w = build_wavefunction(0, p);
  auto V = [&](double x) { return potential_value(p, x); };
  const GridSpec g = default_grid(w);
  const double e = fd_eigen_solve(V, g, 1).eigenvalues[0];
  GridSpec lo = g;
  lo.x_lo *= 0.5;
  GridSpec hi = g;
  hi.x_hi *= 2.0;
  EXPECT_LE(std::abs(fd_eigen_solve(V, lo, 1).eigenvalues[0] - e), 1e-3 * std::abs(e));
  EXPECT_LE(std::abs(fd_eigen_solve(V, hi, 1).eigenvalues[0] - e), 1e-3 * std::abs(e));
}

TEST(OdeResidual, ExactStatesAndPerturbedEnergy) {
  for (const char* name : {"G1", "G2", "G3", "E1", "E2", "E3"}) {
    const int n = find_fixture(name)->n;
    const PotentialParams p = closed(name);
    const double e = closed_form_energy(n, p);
    const WaveFunctionSpec w = build_wavefunction(n, p);
    const GridSpec g = default_grid(w);
    EXPECT_LE(ode_residual(w, [&](double x) { return potential_value(p, x) - e; }, g), 1e-10) << name;
    EXPECT_GE(ode_residual(w, [&](double x) { return potential_value(p, x) - (e + 1e-3); }, g), 1e-4) << name;
  }
}

TEST(OdeResidual, ZeroPolynomialRejected) {
  WaveFunctionSpec w;
  w.exp_coeffs = {1.0, 1.0, 0.0, 0.0};
  w.poly_coeffs = {0.0};
  EXPECT_THROW(ode_residual(w, [](double) { return 0.0; }, box(1.0, 1000)), DomainError);
}

TEST(Normalize, ExponentialHasUnitNorm) {
  WaveFunctionSpec w;
  w.power = 0.0;
  w.exp_coeffs = {0.5, 0.0, 0.0, 0.0};
  GridSpec g;
  g.x_lo = 1e-9;
  g.x_hi = 80.0;
  g.points = 20001;
  const Normalization n = normalize(w, g);
  EXPECT_NEAR(n.norm, 1.0, 1e-8);
  EXPECT_NEAR(n.constant, 1.0, 1e-8);
  EXPECT_LT(n.tail_estimate, 1e-30);
}

TEST(Normalize, GroundFixtureStableUnderRefinement) {
  const WaveFunctionSpec w = build_wavefunction(0, closed("G1"));
  GridSpec g = default_grid(w);
  const double a = normalize(w, g).norm;
  g.points = 2 * g.points - 1;
  const double b = normalize(w, g).norm;
  EXPECT_LE(std::abs(a - b), 1e-6 * a);
}

TEST(Normalize, RejectsNonIntegrable) {
  WaveFunctionSpec w;
  w.exp_coeffs = {0.0, 1.0, 0.0, 0.0};
  EXPECT_THROW(normalize(w, box(1.0, 1000)), DomainError);
  w.exp_coeffs = {1.0, 0.0, 0.0, 0.0};
  w.power = -1.0;
  EXPECT_THROW(normalize(w, box(1.0, 1000)), DomainError);
}

TEST(Nodes, Counting) {
  EXPECT_EQ(count_nodes(std::vector<double>{1, 2, 3}), 0);
  EXPECT_EQ(count_nodes(std::vector<double>{1, -1, 1}), 2);
  EXPECT_EQ(count_nodes(std::vector<double>{1, 1e-14, -1, 1e-14, -2}), 1);
  EXPECT_EQ(count_nodes(std::vector<double>{0, 1, 0, -1, 0}), 1);
}

TEST(PolyRoots, Companion) {
  const auto r = real_poly_roots(std::vector<double>{-6.0, 11.0, -6.0, 1.0});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], 1.0, 1e-12);
  EXPECT_NEAR(r[1], 2.0, 1e-12);
  EXPECT_NEAR(r[2], 3.0, 1e-12);
  EXPECT_TRUE(real_poly_roots(std::vector<double>{1.0, 0.0, 1.0}).empty());
  EXPECT_TRUE(real_poly_roots(std::vector<double>{1.0}).empty());
}

TEST(DefaultGrid, EndpointsFollowAsymptotics) {
  const WaveFunctionSpec w = build_wavefunction(1, closed("E3"));
  const GridSpec g = default_grid(w);
  const double exponent_lo = w.a() * g.x_lo + w.b() / g.x_lo;
  EXPECT_NEAR(exponent_lo, 35.0, 1e-6);
  const double root = -w.poly_coeffs[0] / w.poly_coeffs[1];
  EXPECT_NEAR(g.x_hi, 40.0 / w.a() + std::max(root, 0.0), 1e-9 * g.x_hi);
}
