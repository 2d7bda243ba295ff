// End-to-end acceptance checks.  Each criterion prints one PASS/FAIL line;
// the exit code is the number of failures.  Tolerances are pinned here so a
// regression anywhere in the library trips exactly one line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hmvp/polynomial.hpp"
#include "hmvp/solver.hpp"

using namespace hmvp;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

void criterion(int index, const std::string& label, const std::function<bool()>& body) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string note;
  try {
    ok = body();
  } catch (const std::exception& e) {
    note = std::string("  (exception: ") + e.what() + ")";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("criterion %d %-44s %s  [%.1fs]%s\n", index, (label + ":").c_str(),
              ok ? "PASS" : "FAIL", secs, note.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// --- 1: closed-form M(n) against the quadrature diagonal moments ----------

bool check_M_constants() {
  if (std::abs(M_constant(1) - kPi / 12.0) > 1e-15) return false;
  if (std::abs(M_constant(2) - 1.0 / (2.0 * kPi)) > 1e-15) return false;
  if (std::abs(M_constant(3) - 3.0 * kPi / 80.0) > 1e-15) return false;
  for (int n : {1, 2, 3}) {
    const MomentReport rep = moment_check(n, 0.7, build_rule(n, 0.7));
    if (std::abs(rep.M_estimate - M_constant(n)) / M_constant(n) > 1e-6) return false;
  }
  return true;
}

// --- 2: weight mass and ball volume --------------------------------------

bool check_mass_and_volume() {
  for (double eps : {0.25, 0.5, 1.0}) {
    const double exact = kPi * std::pow(eps, 4);
    if (std::abs(psi_mass(build_rule(1, eps)) - exact) / exact > 1e-10) return false;
  }
  // Unweighted volume against rejection sampling in the bounding box.
  const double vol = ball_volume(build_rule(1, 1.0));
  std::mt19937_64 gen(20240817);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t samples = 10'000'000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x1 = u(gen), x2 = u(gen), x3 = u(gen);
    const double h2 = x1 * x1 + x2 * x2;
    if (h2 * h2 + x3 * x3 <= 1.0) ++hits;
  }
  const double mc = 8.0 * static_cast<double>(hits) / static_cast<double>(samples);
  return std::abs(vol - mc) / vol < 0.01;
}

// --- 3: vanishing first, twisted-vertical and cross moments --------------

bool check_vanishing_moments() {
  for (int n : {1, 2, 3}) {
    const MomentReport rep = moment_check(n, 0.9, build_rule(n, 0.9));
    if (rep.odd_moments > 1e-12) return false;
    if (rep.vertical_moment > 1e-12) return false;
    if (rep.cross_moments > 1e-12) return false;
  }
  return true;
}

// --- 4: harmonic fields are reproduced by the weighted mean --------------

bool check_harmonic_reproduction() {
  const HPoint center(0.3, -0.2, 0.4);
  for (const char* id : {"x1", "x2", "vert", "harmonic-xy"}) {
    const ScalarField f = builtin_field(id);
    for (double eps : {0.1, 0.5, 1.0}) {
      const QuadratureRule rule = build_rule(1, eps);
      const double avg =
          weighted_ball_average([&](const HPoint& y) { return f(0.0, y); }, center, rule);
      if (std::abs(avg - f(0.0, center)) > 1e-8) return false;
    }
  }
  return true;
}

// --- 5: the windowed-mean counterexample ---------------------------------

bool check_counterexample() {
  const CounterexampleReport rep = counterexample_report({0.4, 0.2, 0.1, 0.05});
  if (rep.pde_residual_max > 1e-8) return false;
  if (rep.psi_mass_rel_err_max > 1e-10) return false;
  if (rep.spatial_mean_rel_err_max > 1e-9) return false;
  if (std::abs(rep.fitted_order - 4.0) > 0.1) return false;
  for (std::size_t i = 0; i < rep.eps_ladder.size(); ++i) {
    if (rep.mean_minus_value[i] == 0.0) return false;
    if (rep.eps_ladder[i] <= 0.1 + 1e-12 &&
        std::abs(rep.mean_minus_value[i] - rep.predicted[i]) > 0.01 * std::abs(rep.predicted[i]))
      return false;
  }
  return true;
}

// --- 6: expansion order across fields and exponents ----------------------

bool check_expansion_orders() {
  struct Probe {
    const char* id;
    double t;
    HPoint x;
  };
  const std::vector<Probe> probes = {
      {"heat-quartic", 1.0, HPoint(0.3, 0.2, 0.1)},
      {"linear-mix", 0.5, HPoint(0.2, 0.1, 0.4)},
      {"quad-aniso", 0.1, HPoint(0.3, -0.2, 0.1)},
      {"cubic-mix", 0.4, HPoint(0.4, 0.3, 0.1)},
      {"x1sq", 0.0, HPoint(0.5, 0.3, 0.0)},
      {"harmonic-xy", 0.0, HPoint(0.4, 0.3, 0.0)},
      {"quartic-radial", 0.0, HPoint(0.3, -0.2, 0.1)},
  };
  const std::vector<double> ladder = {0.4, 0.2, 0.1, 0.05};
  const PExponent ps[] = {PExponent::finite(2.0), PExponent::finite(3.0), PExponent::finite(4.0),
                          PExponent::infinity()};
  bool ok = true;
  for (const Probe& probe : probes) {
    const ScalarField u = builtin_field(probe.id);
    for (const PExponent& p : ps) {
      const ExpansionReport rep = expansion_study(u, probe.t, probe.x, p, ladder);
      if (!(rep.exact || rep.fitted_order > 2.2)) {
        const std::string pname = p.is_infinite() ? "inf" : std::to_string(p.value());
        std::printf("  [6] %s p=%s: order %.3f\n", probe.id, pname.c_str(), rep.fitted_order);
        ok = false;
      }
    }
  }
  return ok;
}

// --- 7: minimizer directions converge to the steepest-descent direction --

bool check_extremal_directions() {
  const std::vector<double> ladder = {0.4, 0.2, 0.1, 0.05};
  const std::vector<std::string> exprs = {"x1 + 0.5x2^2", "x1 + x2 + x1^2",
                                          "2x1 - x2 + x1*x2"};
  for (const std::string& expr : exprs) {
    const ScalarField f = Polynomial::parse(expr, 1).field(expr);
    const HorizontalJet j = jet(f, 0.0, HPoint::origin(1));
    const Eigen::Vector2d target = -j.grad0.normalized();
    const auto dirs = extremal_direction_estimate(f, 0.0, HPoint::origin(1), ladder);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [eps, dir] : dirs) {
      const double cosang = std::clamp(dir.dot(target), -1.0, 1.0);
      const double angle = std::acos(cosang);
      if (angle > prev + 1e-12) {
        std::printf("  [7] %s: angle grew to %.3e at eps %.2f\n", expr.c_str(), angle, eps);
        return false;
      }
      prev = angle;
      if (eps == ladder.back() && angle > 0.05) {
        std::printf("  [7] %s: final angle %.3e rad\n", expr.c_str(), angle);
        return false;
      }
    }
  }
  return true;
}

// --- 8: the time-slab solver ---------------------------------------------

SpaceTimeGrid acceptance_grid(double eps) {
  GridConfig gc;
  gc.domain_radius = 0.6;
  gc.epsilon = eps;
  gc.T = 0.08;
  return build_grid(gc);
}

DiscreteField run_solver(const SpaceTimeGrid& grid, const SolverConfig& sc,
                         const ScalarField& data) {
  return solve(
      grid, sc, [&](const HPoint& x) { return data(0.0, x); },
      [&](double t, const HPoint& x) { return data(t, x); });
}

bool check_solver() {
  const SpaceTimeGrid grid = acceptance_grid(0.2);

  // Constants are exact fixed points for every exponent.
  ScalarField c;
  c.n = 1;
  c.evaluator = [](double, const HPoint&) { return 1.5; };
  for (PExponent p : {PExponent::finite(2.0), PExponent::finite(4.0), PExponent::infinity()}) {
    SolverConfig sc;
    sc.params = MvpParams::make(1, p, grid.cfg.epsilon);
    const DiscreteField f = run_solver(grid, sc, c);
    for (const auto& slab : f.values)
      if (std::abs(slab.maxCoeff() - 1.5) + std::abs(slab.minCoeff() - 1.5) > 1e-9) return false;
  }

  // Discrete maximum principle on ten random polynomial data sets, using the
  // monotone multilinear interpolation.
  std::mt19937_64 gen(1234567);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const PExponent ps[] = {PExponent::finite(2.0), PExponent::finite(4.0),
                          PExponent::infinity()};
  for (int rep = 0; rep < 10; ++rep) {
    std::ostringstream os;
    os << coeff(gen) << " + " << coeff(gen) << "x1 + " << coeff(gen) << "x2 + " << coeff(gen)
       << "x3 + " << coeff(gen) << "x1^2 + " << coeff(gen) << "x2^2 + " << coeff(gen)
       << "x1*x2 + " << coeff(gen) << "t";
    std::string s = os.str(), norm;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '+' && i + 2 < s.size() && s[i + 2] == '-') {
        norm += '-';
        i += 2;
      } else
        norm += s[i];
    }
    const ScalarField data = Polynomial::parse(norm, 1).field("random");
    SolverConfig sc;
    sc.params = MvpParams::make(1, ps[rep % 3], grid.cfg.epsilon);
    sc.interpolation = Interpolation::Multilinear;
    const DiscreteField f = run_solver(grid, sc, data);

    double lo = f.values[0].minCoeff(), hi = f.values[0].maxCoeff();
    for (std::size_t k = 1; k < f.values.size(); ++k)
      for (std::size_t q = 0; q < grid.node_count(); ++q)
        if (f.provenance[k][q] != static_cast<std::uint8_t>(Provenance::Computed)) {
          lo = std::min(lo, f.values[k][q]);
          hi = std::max(hi, f.values[k][q]);
        }
    for (std::size_t k = 1; k < f.values.size(); ++k)
      for (std::size_t q = 0; q < grid.node_count(); ++q)
        if (f.provenance[k][q] == static_cast<std::uint8_t>(Provenance::Computed) &&
            (f.values[k][q] < lo - 1e-8 || f.values[k][q] > hi + 1e-8)) {
          std::printf("  [8] max principle violated on run %d\n", rep);
          return false;
        }
  }

  // Convergence against a closed-form solution of w_t = M(1) D_H w.
  const double M1 = M_constant(1);
  std::ostringstream expr;
  expr.precision(17);
  expr << 12.0 * M1 * M1 << "t^2 + " << 12.0 * M1 << "x1^2*t + x1^4";
  const ScalarField ref = Polynomial::parse(expr.str(), 1).field("reference");
  double errs[2];
  int idx = 0;
  for (double eps : {0.2, 0.1}) {
    const SpaceTimeGrid g = acceptance_grid(eps);
    SolverConfig sc;
    sc.params = MvpParams::make(1, PExponent::finite(2.0), eps);
    errs[idx++] = error_report(run_solver(g, sc, ref), ref).back().max_error;
  }
  if (!(errs[1] < errs[0])) {
    std::printf("  [8] errors did not shrink: %.3e -> %.3e\n", errs[0], errs[1]);
    return false;
  }
  return true;
}

// --- 9: blend structure and the (alpha, beta) system ---------------------

bool check_blend_structure() {
  for (double pv : {1.5, 2.0, 3.0, 10.0, 100.0})
    for (int n : {1, 2, 3}) {
      const auto [alpha, beta] = alpha_beta(PExponent::finite(pv), n);
      if (std::abs(alpha + beta - 1.0) > 1e-15) return false;
      if (std::abs(beta * M_constant(n) * (pv - 2.0) - alpha) > 1e-15 * (1.0 + std::abs(alpha)))
        return false;
    }
  const ScalarField u = builtin_field("cubic-mix");
  const HPoint x(0.3, -0.2, 0.1);
  MvpOperators at2(MvpParams::make(1, PExponent::finite(2.0), 0.25));
  MvpOperators atinf(MvpParams::make(1, PExponent::infinity(), 0.25));
  if (at2.mvp_blend(u, 0.4, x) != at2.spacetime_weighted_mean(u, 0.4, x)) return false;
  if (atinf.mvp_blend(u, 0.4, x) != atinf.spacetime_midrange(u, 0.4, x)) return false;
  return true;
}

}  // namespace

int main() {
  criterion(1, "closed-form constants M(n)", check_M_constants);
  criterion(2, "weight mass and ball volume", check_mass_and_volume);
  criterion(3, "vanishing ball moments", check_vanishing_moments);
  criterion(4, "harmonic mean-value reproduction", check_harmonic_reproduction);
  criterion(5, "windowed-mean counterexample", check_counterexample);
  criterion(6, "expansion orders (7 fields x 4 exponents)", check_expansion_orders);
  criterion(7, "steepest-descent direction estimates", check_extremal_directions);
  criterion(8, "time-slab solver", check_solver);
  criterion(9, "blend identities and (alpha, beta)", check_blend_structure);
  return failures;
}
