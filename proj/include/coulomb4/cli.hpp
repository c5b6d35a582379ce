#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coulomb4.hpp"

// Command-line front end. `run` takes the arguments without the program name and writes the
// result to `out` (or to --out PATH); diagnostics go to `err`. Exit codes: 0 success, 1 usage
// error, 2 numerical non-convergence, 3 infeasible constraints.

namespace coulomb4::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNonConvergence = 2, kInfeasible = 3 };

struct Range {
  double start = 0.0, stop = 0.0;
  int steps = 0;

  double at(int i) const { return steps == 1 ? start : start + (stop - start) * i / (steps - 1); }
};

class UsageError : public Error {
public:
  using Error::Error;
};

class Infeasible : public Error {
public:
  using Error::Error;
};

inline Range parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("range must be start,stop,steps: " + text);
  Range r;
  try {
    std::size_t used = 0;
    r.start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw UsageError("bad range start: " + text);
    r.stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw UsageError("bad range stop: " + text);
    r.steps = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw UsageError("bad range steps: " + text);
  } catch (const std::logic_error&) {
    throw UsageError("malformed range: " + text);
  }
  if (r.steps < 2) throw UsageError("range needs at least two steps: " + text);
  if (!std::isfinite(r.start) || !std::isfinite(r.stop)) throw UsageError("range bounds must be finite");
  return r;
}

/// Shortest form is not required; 17 significant digits always re-parse to the same double.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::json jnum(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const WaveFunctionSpec& s) {
  nlohmann::json j;
  j["power"] = jnum(s.power);
  j["exp_coeffs"] = {jnum(s.a()), jnum(s.b()), jnum(s.c()), jnum(s.d())};
  nlohmann::json poly = nlohmann::json::array();
  for (double c : s.poly_coeffs) poly.push_back(jnum(c));
  j["poly_coeffs"] = poly;
  if (s.norm_constant) j["norm_constant"] = jnum(*s.norm_constant);
  return j;
}

inline nlohmann::json to_json(const PotentialParams& p) {
  return {{"alpha1", jnum(p.alpha1)}, {"alpha2", jnum(p.alpha2)}, {"alpha3", jnum(p.alpha3)}, {"alpha4", jnum(p.alpha4)}};
}

struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<std::string> trailer;

  void write_csv(std::ostream& os) const {
    for (const auto& c : comments) os << "# " << c << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << (r[i] ? num(*r[i]) : "");
      os << '\n';
    }
    for (const auto& c : trailer) os << "# " << c << '\n';
  }

  nlohmann::json rows_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json o = nlohmann::json::object();
      for (std::size_t i = 0; i < r.size(); ++i) o[header[i]] = r[i] ? jnum(*r[i]) : nlohmann::json(nullptr);
      arr.push_back(o);
    }
    return arr;
  }
};

struct Document {
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  nlohmann::json residuals = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::array();

  std::string dump() const {
    nlohmann::json j;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["residuals"] = residuals;
    j["diagnostics"] = diagnostics;
    return j.dump(2) + "\n";
  }
};

// ---------------------------------------------------------------------------------------------
// Shared helpers

inline void require_feasible(const PotentialParams& p) {
  if (!p.admissible())
    throw Infeasible("parameters are not admissible (need alpha1 < 0, alpha4 > 0, 1 + alpha3/(2 alpha4) > 0)");
}

/// n = 1 has two alpha2 roots; the bound state continued from the published sets is the lower one.
inline double pick_n1_root(const std::vector<double>& roots, std::optional<double> hint) {
  if (roots.empty()) throw Infeasible("no real alpha2 closes the n = 1 constraint");
  if (!hint) return roots.front();
  return *std::min_element(roots.begin(), roots.end(),
                           [&](double a, double b) { return std::abs(a - *hint) < std::abs(b - *hint); });
}

inline PotentialParams close_params(int n, PotentialParams p, std::optional<double> hint = std::nullopt) {
  require_feasible(p);
  if (n == 0)
    p.alpha2 = solve_alpha2_ground(p.alpha1, p.alpha3, p.alpha4);
  else if (n == 1)
    p.alpha2 = pick_n1_root(solve_constraint_n1(p.alpha1, p.alpha3, p.alpha4), hint);
  else
    throw UsageError("n must be 0 or 1");
  return p;
}

struct OracleCheck {
  double eigenvalue = 0.0;
  double relative_deviation = 0.0;
  double richardson = 0.0;
  int nodes = -1;
};

inline OracleCheck oracle_check(int n, const PotentialParams& p, const WaveFunctionSpec& spec, double energy) {
  const auto res = fd_eigen_solve([&](double x) { return potential_value(p, x); }, default_grid(spec), n + 1);
  const auto i = static_cast<std::size_t>(n);
  return {res.eigenvalues[i], std::abs(res.eigenvalues[i] - energy) / std::abs(energy), res.richardson_errors[i],
          res.node_counts[i]};
}

// ---------------------------------------------------------------------------------------------
// solve-ordinary

struct OrdinaryArgs {
  int n = 0;
  double alpha1 = 0.0, alpha3 = 0.0, alpha4 = 0.0;
  bool oracle = true;
};

inline int cmd_solve_ordinary(const OrdinaryArgs& a, const std::string& format, std::ostream& os) {
  if (a.n != 0 && a.n != 1) throw UsageError("n must be 0 or 1");
  const PotentialParams base{a.alpha1, 0.0, a.alpha3, a.alpha4};
  require_feasible(base);
  std::vector<double> roots;
  if (a.n == 0)
    roots.push_back(solve_alpha2_ground(a.alpha1, a.alpha3, a.alpha4));
  else
    roots = solve_constraint_n1(a.alpha1, a.alpha3, a.alpha4);
  if (roots.empty()) throw Infeasible("no real alpha2 closes the n = 1 constraint");

  const double energy = closed_form_energy(a.n, base);
  Document doc;
  doc.inputs = {{"n", a.n}, {"alpha1", a.alpha1}, {"alpha3", a.alpha3}, {"alpha4", a.alpha4}};
  doc.outputs["energy"] = jnum(energy);
  doc.outputs["alpha2_roots"] = nlohmann::json::array();
  doc.outputs["solutions"] = nlohmann::json::array();
  doc.residuals["constraint"] = nlohmann::json::array();

  Table t;
  t.header = {"n", "alpha1", "alpha2", "alpha3", "alpha4", "energy", "residual", "oracle_eigenvalue",
              "relative_deviation", "nodes"};
  for (double a2 : roots) {
    const PotentialParams p{a.alpha1, a2, a.alpha3, a.alpha4};
    const double residual = qes_determinant(a.n, p).normalized;
    nlohmann::json sol{{"alpha2", jnum(a2)}, {"constraint_residual", jnum(residual)}};
    std::optional<double> eig, dev, nodes;
    try {
      const WaveFunctionSpec spec = build_wavefunction(a.n, p);
      sol["wavefunction"] = to_json(spec);
      if (a.oracle) {
        const OracleCheck oc = oracle_check(a.n, p, spec, energy);
        sol["oracle_eigenvalue"] = jnum(oc.eigenvalue);
        sol["relative_deviation"] = jnum(oc.relative_deviation);
        sol["richardson_estimate"] = jnum(oc.richardson);
        sol["oracle_nodes"] = oc.nodes;
        eig = oc.eigenvalue;
        dev = oc.relative_deviation;
        nodes = oc.nodes;
      }
    } catch (const Error& e) {
      doc.diagnostics.push_back("alpha2=" + num(a2) + ": " + e.what());
    }
    doc.outputs["alpha2_roots"].push_back(jnum(a2));
    doc.outputs["solutions"].push_back(sol);
    doc.residuals["constraint"].push_back(jnum(residual));
    t.rows.push_back({double(a.n), a.alpha1, a2, a.alpha3, a.alpha4, energy, residual, eig, dev, nodes});
  }
  if (format == "json")
    os << doc.dump();
  else
    t.write_csv(os);
  return kOk;
}

// ---------------------------------------------------------------------------------------------
// solve-gup

struct GupArgs {
  int n = 0;
  double alpha1 = 0.0, beta = 0.0;
};

inline int cmd_solve_gup(const GupArgs& a, const std::string& format, std::ostream& os) {
  if (a.n != 0 && a.n != 1) throw UsageError("n must be 0 or 1");
  std::vector<GupSolution> sols;
  if (a.n == 0)
    sols.push_back(solve_ground_gup(a.alpha1, a.beta));
  else
    sols = solve_first_excited_gup(a.alpha1, a.beta);

  Document doc;
  doc.inputs = {{"n", a.n}, {"alpha1", a.alpha1}, {"beta", a.beta}};
  doc.outputs["solutions"] = nlohmann::json::array();
  doc.residuals["residual_norm"] = nlohmann::json::array();
  doc.residuals["ode"] = nlohmann::json::array();
  Table t;
  t.header = {"n", "alpha1", "beta", "alpha2", "alpha3", "alpha4", "x1", "eps_ordinary", "eps_gup", "residual_norm",
              "ode_residual"};
  for (const auto& s : sols) {
    const WaveFunctionSpec spec = build_gup_wavefunction(s);
    const auto gc = gup_effective_coefficients(s);
    const double ode = ode_residual(spec, [&](double x) { return effective_potential_value(gc, x); }, default_grid(spec));
    nlohmann::json js{{"alpha2", jnum(s.alpha2)},           {"alpha3", jnum(s.alpha3)},
                      {"alpha4", jnum(s.alpha4)},           {"eps_ordinary", jnum(s.eps_ordinary)},
                      {"eps_gup", jnum(s.eps_gup)},         {"bethe_roots", nlohmann::json::array()},
                      {"wavefunction", to_json(spec)}};
    for (double x : s.bethe_roots) js["bethe_roots"].push_back(jnum(x));
    doc.outputs["solutions"].push_back(js);
    doc.residuals["residual_norm"].push_back(jnum(s.residual_norm));
    doc.residuals["ode"].push_back(jnum(ode));
    for (const auto& d : s.diagnostics) doc.diagnostics.push_back(d);
    t.rows.push_back({double(a.n), a.alpha1, a.beta, s.alpha2, s.alpha3, s.alpha4,
                      s.bethe_roots.empty() ? std::nullopt : std::optional<double>(s.bethe_roots.front()),
                      s.eps_ordinary, s.eps_gup, s.residual_norm, ode});
  }
  if (format == "json")
    os << doc.dump();
  else
    t.write_csv(os);
  return kOk;
}

// ---------------------------------------------------------------------------------------------
// scan

struct ScanArgs {
  int n = 0;
  double alpha1 = 0.0;
  std::string alpha3_range, alpha4_range;
  int threads = 0;
};

inline int cmd_scan(const ScanArgs& a, const std::string& format, std::ostream& os) {
  if (a.n != 0 && a.n != 1) throw UsageError("n must be 0 or 1");
  const Range r3 = parse_range(a.alpha3_range);
  const Range r4 = parse_range(a.alpha4_range);
  const std::size_t total = static_cast<std::size_t>(r3.steps) * static_cast<std::size_t>(r4.steps);

  std::vector<std::optional<std::array<double, 5>>> cells(total);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const double a3 = r3.at(static_cast<int>(idx / static_cast<std::size_t>(r4.steps)));
      const double a4 = r4.at(static_cast<int>(idx % static_cast<std::size_t>(r4.steps)));
      try {
        const PotentialParams p = close_params(a.n, {a.alpha1, 0.0, a3, a4});
        const double e = closed_form_energy(a.n, p);
        const double res = qes_determinant(a.n, p).normalized;
        if (std::isfinite(p.alpha2) && std::isfinite(e) && std::isfinite(res)) cells[idx] = {{a3, a4, p.alpha2, e, res}};
      } catch (const Error&) {
      }
    }
  };
  unsigned workers = a.threads > 0 ? static_cast<unsigned>(a.threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, total / 256)));
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk, e = std::min(total, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  Table t;
  t.comments = {"scan n=" + std::to_string(a.n) + " alpha1=" + num(a.alpha1), "alpha3 range " + a.alpha3_range,
                "alpha4 range " + a.alpha4_range};
  t.header = {"alpha3", "alpha4", "alpha2", "energy", "residual"};
  std::size_t omitted = 0;
  double worst = 0.0;
  for (const auto& c : cells) {
    if (!c) {
      ++omitted;
      continue;
    }
    t.rows.push_back({(*c)[0], (*c)[1], (*c)[2], (*c)[3], (*c)[4]});
    worst = std::max(worst, std::abs((*c)[4]));
  }
  t.trailer = {"omitted: " + std::to_string(omitted)};
  if (format == "json") {
    Document doc;
    doc.inputs = {{"n", a.n}, {"alpha1", a.alpha1}, {"alpha3_range", a.alpha3_range}, {"alpha4_range", a.alpha4_range}};
    doc.outputs["rows"] = t.rows_json();
    doc.outputs["omitted"] = omitted;
    doc.residuals["max_abs_residual"] = worst;
    os << doc.dump();
  } else {
    t.write_csv(os);
  }
  return kOk;
}

// ---------------------------------------------------------------------------------------------
// profile

struct ProfileArgs {
  int n = 0;
  std::string fixture;
  double alpha1 = 0.0, alpha3 = 0.0, alpha4 = 0.0;
  std::optional<double> beta;
  std::string x_range;
};

inline int cmd_profile(const ProfileArgs& a, const std::string& format, std::ostream& os) {
  int n = a.n;
  PotentialParams p{a.alpha1, 0.0, a.alpha3, a.alpha4};
  std::optional<double> hint;
  std::string label = "params";
  if (!a.fixture.empty()) {
    std::string name = a.fixture;
    if (name.rfind("FIX-", 0) == 0) name = name.substr(4);
    const auto fx = find_fixture(name);
    if (!fx) throw UsageError("unknown fixture " + a.fixture);
    n = fx->n;
    p = fx->params;
    hint = p.alpha2;
    label = "fixture " + std::string(fx->name);
  }
  if (n != 0 && n != 1) throw UsageError("n must be 0 or 1");

  WaveFunctionSpec spec;
  double energy = 0.0;
  EffectiveCoefficients gc{};
  const bool gup = a.beta.has_value();
  if (gup) {
    const GupSolution s = n == 0 ? solve_ground_gup(p.alpha1, *a.beta) : solve_first_excited_gup(p.alpha1, *a.beta).front();
    p = s.params();
    spec = build_gup_wavefunction(s);
    energy = s.eps_gup;
    gc = gup_effective_coefficients(s);
  } else {
    try {
      p = close_params(n, p, hint);
      spec = build_wavefunction(n, p);
    } catch (const ConstraintViolation& e) {
      throw Infeasible(e.what());
    } catch (const SingularError& e) {
      throw Infeasible(e.what());
    }
    energy = closed_form_energy(n, p);
  }
  const GridSpec grid = default_grid(spec);
  const Normalization norm = normalize(spec, grid);
  const Range xr = a.x_range.empty() ? Range{grid.x_lo, std::min(grid.x_hi, 2000.0), 2001} : parse_range(a.x_range);
  if (!(xr.start > 0.0 && xr.stop > 0.0)) throw UsageError("x range must be positive");

  Table t;
  t.comments = {label + " n=" + std::to_string(n) + (gup ? " beta=" + num(*a.beta) : std::string()),
                "alpha1=" + num(p.alpha1) + " alpha2=" + num(p.alpha2) + " alpha3=" + num(p.alpha3) +
                    " alpha4=" + num(p.alpha4),
                "norm tail estimate " + num(norm.tail_estimate)};
  t.header = {"x", "V", "psi_sq_normalized", "energy"};
  for (int i = 0; i < xr.steps; ++i) {
    const double x = xr.at(i);
    const double psi = norm.constant * evaluate_wavefunction(spec, x);
    t.rows.push_back({x, potential_value(p, x), psi * psi, energy});
  }
  if (format == "json") {
    Document doc;
    doc.inputs = {{"n", n}, {"params", to_json(p)}, {"x_range", a.x_range}};
    if (gup) doc.inputs["beta"] = *a.beta;
    if (!a.fixture.empty()) doc.inputs["fixture"] = a.fixture;
    doc.outputs["energy"] = jnum(energy);
    doc.outputs["wavefunction"] = to_json(spec);
    doc.outputs["rows"] = t.rows_json();
    doc.residuals["norm_tail_estimate"] = jnum(norm.tail_estimate);
    doc.residuals["ode"] = jnum(ode_residual(
        spec,
        [&](double x) { return gup ? effective_potential_value(gc, x) : potential_value(p, x) - energy; }, grid));
    os << doc.dump();
  } else {
    t.write_csv(os);
  }
  return kOk;
}

// ---------------------------------------------------------------------------------------------
// partition

struct PartitionArgs {
  std::string fixture;
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0, alpha4 = 0.0;
  std::optional<double> T;
  std::string T_range;
  int nu = -1;
  int k = 2;
};

inline int cmd_partition(const PartitionArgs& a, const std::string& format, std::ostream& os) {
  PotentialParams p{a.alpha1, a.alpha2, a.alpha3, a.alpha4};
  if (!a.fixture.empty()) {
    std::string name = a.fixture;
    if (name.rfind("FIX-", 0) == 0) name = name.substr(4);
    const auto fx = find_fixture(name);
    if (!fx) throw UsageError("unknown fixture " + a.fixture);
    p = fx->params;
  }
  if (a.nu < 0) throw UsageError("--nu is required and must be non-negative");
  if (a.T.has_value() == !a.T_range.empty()) throw UsageError("give exactly one of --T and --T-range");
  if (a.k < 1 || a.k > 4) throw UsageError("--k must be in 1..4");

  std::vector<double> temps;
  if (a.T) {
    temps.push_back(*a.T);
  } else {
    const Range r = parse_range(a.T_range);
    for (int i = 0; i < r.steps; ++i) temps.push_back(r.at(i));
  }
  for (double T : temps)
    if (!(T > 0.0)) throw UsageError("temperatures must be positive");

  Table t;
  t.comments = {"alpha1=" + num(p.alpha1) + " alpha2=" + num(p.alpha2) + " alpha3=" + num(p.alpha3) +
                    " alpha4=" + num(p.alpha4),
                "nu=" + std::to_string(a.nu) + " k=" + std::to_string(a.k)};
  t.header = {"T", "Z_direct", "Z_EM", "remainder_estimate"};
  std::vector<PartitionResult> results;
  for (double T : temps) {
    const PartitionResult r = partition_euler_maclaurin({p, T, a.nu, a.k});
    results.push_back(r);
    t.rows.push_back({T, r.z_direct, r.z_euler_maclaurin, r.remainder_estimate});
  }
  if (temps.size() >= 3) {
    const auto th = thermo_quantities(p, temps, a.nu);
    t.header.insert(t.header.end(), {"F", "U", "C", "S"});
    for (std::size_t i = 0; i < th.size(); ++i) {
      auto& row = t.rows[i];
      row.push_back(th[i].F);
      row.push_back(th[i].U);
      row.push_back(th[i].C);
      row.push_back(th[i].S);
    }
  }
  if (format == "json") {
    Document doc;
    doc.inputs = {{"params", to_json(p)}, {"nu", a.nu}, {"k", a.k}, {"temperatures", temps}};
    doc.outputs["rows"] = t.rows_json();
    nlohmann::json rem = nlohmann::json::array();
    for (const auto& r : results) rem.push_back(jnum(std::abs(r.z_euler_maclaurin - r.z_direct)));
    doc.residuals["em_minus_direct"] = rem;
    os << doc.dump();
  } else {
    t.write_csv(os);
  }
  return kOk;
}

// ---------------------------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

namespace detail {

inline Check le(std::string name, double value, double tol) {
  return {std::move(name), std::isfinite(value) && std::abs(value) <= tol, value, tol};
}

inline void verify_ordinary(std::vector<Check>& out) {
  for (const auto& fx : kFixtures) {
    const std::string tag = "ordinary " + std::string(fx.name);
    if (fx.n == 0) out.push_back(le(tag + " published constraint", ground_constraint_residual(fx.params), 5e-6));
    const PotentialParams p = close_params(fx.n, fx.params, fx.params.alpha2);
    out.push_back(le(tag + " closure", qes_determinant(fx.n, p).normalized, 1e-10));
    const double e = closed_form_energy(fx.n, p);
    const WaveFunctionSpec spec = build_wavefunction(fx.n, p);
    const OracleCheck oc = oracle_check(fx.n, p, spec, e);
    out.push_back(le(tag + " oracle eigenvalue", oc.relative_deviation, std::max(5e-3, oc.richardson / std::abs(e))));
    out.push_back(le(tag + " oracle nodes", oc.nodes - fx.n, 0.0));
    out.push_back(le(tag + " ode residual",
                     ode_residual(spec, [&](double x) { return potential_value(p, x) - e; }, default_grid(spec)), 1e-10));
  }
}

inline void verify_gup_solution(const GupSolution& s, const std::string& tag, std::vector<Check>& out) {
  out.push_back(le(tag + " residual", s.residual_norm, 1e-9));
  out.push_back(le(tag + " alpha positivity", (s.alpha2 > 0 && s.alpha3 > 0 && s.alpha4 > 0) ? 0.0 : 1.0, 0.0));
  const WaveFunctionSpec spec = build_gup_wavefunction(s);
  const auto gc = gup_effective_coefficients(s);
  out.push_back(le(tag + " ode residual",
                   ode_residual(spec, [&](double x) { return effective_potential_value(gc, x); }, default_grid(spec)),
                   1e-9));
  if (s.n == 1) out.push_back(le(tag + " bethe quartic", bethe_quartic_residual(s), 1e-10));
}

inline void verify_gup(std::vector<Check>& out) {
  for (auto [a1, b] : {std::pair{-0.5, 1.0}, std::pair{-0.3, 0.5}})
    verify_gup_solution(solve_ground_gup(a1, b), "gup ground alpha1=" + num(a1) + " beta=" + num(b), out);
  const auto ex = solve_first_excited_gup(-0.3, 0.5);
  for (std::size_t i = 0; i < ex.size(); ++i)
    verify_gup_solution(ex[i], "gup excited #" + std::to_string(i) + " alpha1=-0.3 beta=0.5", out);
  for (auto [a1, b] : {std::pair{-0.5, 1.0}, std::pair{-0.3, 0.5}}) {
    double worst = 0.0;
    for (int n = 0; n <= 3; ++n) {
      const double eo = -a1 * a1 / (4.0 * (n + 2) * (n + 2)) * 1.3;
      const double eg = gup_energy(n, eo, a1, b);
      worst = std::max(worst, std::abs(gup_energy_condition(n, eo, eg, a1, b)));
    }
    out.push_back(le("gup energy condition alpha1=" + num(a1), worst, 1e-11 * std::max(1.0, std::abs(a1))));
  }
}

inline void verify_heun(std::vector<Check>& out) {
  for (const auto& fx : kFixtures) {
    const PotentialParams p = close_params(fx.n, fx.params, fx.params.alpha2);
    const DchParams d = dch_parameters(p, closed_form_energy(fx.n, p));
    const std::string tag = "heun " + std::string(fx.name);
    out.push_back(le(tag + " omega", d.omega + fx.n, 1e-12));
    const TerminationCheck tc = polynomial_termination_check(d, fx.n);
    out.push_back(le(tag + " termination", tc.residual, 1e-8));
  }
}

inline void verify_thermo(std::vector<Check>& out) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ua1(-1.0, -0.05), ua3(-0.05, 0.5), ua4(0.02, 1.0), ulogT(std::log(0.1), std::log(10.0));
  const int nus[] = {5, 10, 20};
  double worst = 0.0;
  int cases = 0;
  while (cases < 50) {
    const PotentialParams p{ua1(rng), 0.0, ua3(rng), ua4(rng)};
    const double T = std::exp(ulogT(rng));
    const int nu = nus[cases % 3];
    try {
      const PartitionResult r = partition_euler_maclaurin({p, T, nu, 2});
      const double bound = std::max(2.0 * r.remainder_estimate, 1e-6 * r.z_direct);
      worst = std::max(worst, std::abs(r.z_euler_maclaurin - r.z_direct) / bound);
      ++cases;
    } catch (const Error&) {
    }
  }
  out.push_back(le("thermo EM vs direct (ratio to bound)", worst, 1.0));
  double sym = 0.0;
  for (double z = -5.0; z <= 5.0; z += 0.01) sym = std::max(sym, std::abs(erfi(z) + erfi(-z)));
  out.push_back(le("thermo erfi odd symmetry", sym, 0.0));
}

}  // namespace detail

inline int cmd_verify(const std::string& scope, const std::string& format, std::ostream& os) {
  static const std::vector<std::string> scopes{"ordinary", "gup", "heun", "thermo", "all"};
  if (std::find(scopes.begin(), scopes.end(), scope) == scopes.end()) throw UsageError("unknown scope " + scope);
  std::vector<Check> checks;
  const bool all = scope == "all";
  if (all || scope == "ordinary") detail::verify_ordinary(checks);
  if (all || scope == "gup") detail::verify_gup(checks);
  if (all || scope == "heun") detail::verify_heun(checks);
  if (all || scope == "thermo") detail::verify_thermo(checks);
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  if (format == "json") {
    Document doc;
    doc.inputs = {{"scope", scope}};
    doc.outputs["passed"] = ok;
    doc.outputs["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      doc.outputs["checks"].push_back({{"name", c.name}, {"passed", c.passed}});
      doc.residuals[c.name] = {{"value", jnum(c.value)}, {"tolerance", c.tolerance}};
    }
    os << doc.dump();
  } else {
    os << "# verify scope=" << scope << "\ncheck,passed,value,tolerance\n";
    for (const auto& c : checks)
      os << c.name << ',' << (c.passed ? "PASS" : "FAIL") << ',' << num(c.value) << ',' << num(c.tolerance) << '\n';
  }
  return ok ? kOk : kInfeasible;
}

// ---------------------------------------------------------------------------------------------
// Argument handling

/// Flat JSON config mirroring the flags, e.g. {"command": "scan", "alpha1": -0.1, "n": 0}.
inline std::vector<std::string> config_arguments(const std::string& path, std::string& command) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a flat JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      command = value.get<std::string>();
      continue;
    }
    std::string flag = "--";
    for (char c : key) flag += c == '_' ? '-' : c;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag + "=" + value.get<std::string>());
    } else if (value.is_number_integer()) {
      args.push_back(flag + "=" + std::to_string(value.get<long long>()));
    } else if (value.is_number()) {
      args.push_back(flag + "=" + num(value.get<double>()));
    } else {
      throw UsageError("config value for " + key + " must be a scalar");
    }
  }
  return args;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  // Config values are spliced in ahead of the command-line flags; every option keeps its last value.
  std::string config_path, config_command;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  static const std::vector<std::string> commands{"solve-ordinary", "solve-gup", "scan", "profile", "verify", "partition"};
  try {
    if (!config_path.empty()) {
      const auto extra = config_arguments(config_path, config_command);
      auto pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
        return std::find(commands.begin(), commands.end(), a) != commands.end();
      });
      if (pos == args.end()) {
        if (config_command.empty()) throw UsageError("no command given");
        args.insert(args.begin(), config_command);
        pos = args.begin();
      }
      args.insert(pos + 1, extra.begin(), extra.end());
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App app{"Coulomb-4 quasi-exact spectra, GUP corrections and partition functions", "coulomb4"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "csv", out_path, cfg;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_option("--config", cfg, "Flat JSON file of flag values");

  OrdinaryArgs oa;
  auto* so = app.add_subcommand("solve-ordinary", "Solve the QES constraint and energy for n = 0 or 1");
  so->add_option("--n", oa.n)->required();
  so->add_option("--alpha1", oa.alpha1)->required();
  so->add_option("--alpha3", oa.alpha3)->required();
  so->add_option("--alpha4", oa.alpha4)->required();
  so->add_flag("!--no-oracle", oa.oracle, "Skip the finite-difference cross-check");

  GupArgs ga;
  auto* sg = app.add_subcommand("solve-gup", "Self-consistent GUP solution for n = 0 or 1");
  sg->add_option("--n", ga.n)->required();
  sg->add_option("--alpha1", ga.alpha1)->required();
  sg->add_option("--beta", ga.beta)->required();

  ScanArgs sa;
  auto* sc = app.add_subcommand("scan", "Constraint surface over an (alpha3, alpha4) grid");
  sc->add_option("--n", sa.n)->required();
  sc->add_option("--alpha1", sa.alpha1)->required();
  sc->add_option("--alpha3-range", sa.alpha3_range, "start,stop,steps")->required();
  sc->add_option("--alpha4-range", sa.alpha4_range, "start,stop,steps")->required();
  sc->add_option("--threads", sa.threads);

  ProfileArgs pa;
  double pbeta = 0.0;
  auto* sp = app.add_subcommand("profile", "Potential and normalized density over x");
  sp->add_option("--n", pa.n);
  sp->add_option("--fixture", pa.fixture);
  sp->add_option("--alpha1", pa.alpha1);
  sp->add_option("--alpha3", pa.alpha3);
  sp->add_option("--alpha4", pa.alpha4);
  auto* beta_opt = sp->add_option("--beta", pbeta);
  sp->add_option("--x-range", pa.x_range, "start,stop,steps");

  std::string scope = "all";
  auto* sv = app.add_subcommand("verify", "Run the invariant checks");
  sv->add_option("--scope", scope);

  PartitionArgs ta;
  double T = 0.0;
  auto* st = app.add_subcommand("partition", "Bound-state partition function");
  st->add_option("--fixture", ta.fixture);
  st->add_option("--alpha1", ta.alpha1);
  st->add_option("--alpha2", ta.alpha2);
  st->add_option("--alpha3", ta.alpha3);
  st->add_option("--alpha4", ta.alpha4);
  auto* T_opt = st->add_option("--T", T);
  st->add_option("--T-range", ta.T_range, "start,stop,steps");
  st->add_option("--nu", ta.nu)->required();
  st->add_option("--k", ta.k);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  if (*beta_opt) pa.beta = pbeta;
  if (*T_opt) ta.T = T;

  std::ostringstream buffer;
  int code = kOk;
  try {
    if (*so)
      code = cmd_solve_ordinary(oa, format, buffer);
    else if (*sg)
      code = cmd_solve_gup(ga, format, buffer);
    else if (*sc)
      code = cmd_scan(sa, format, buffer);
    else if (*sp)
      code = cmd_profile(pa, format, buffer);
    else if (*sv)
      code = cmd_verify(scope, format, buffer);
    else if (*st)
      code = cmd_partition(ta, format, buffer);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const GridTooCoarse& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  }

  if (out_path.empty()) {
    out << buffer.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << out_path << '\n';
      return kUsage;
    }
    f << buffer.str();
  }
  return code;
}

}  // namespace coulomb4::cli
