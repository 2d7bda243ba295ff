#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hmvp/polynomial.hpp"
#include "hmvp/quadrature.hpp"

using namespace hmvp;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  std::vector<double> nodes, weights;
  gauss_legendre(6, -1.0, 2.0, nodes, weights);
  double s0 = 0, s7 = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s0 += weights[i];
    s7 += weights[i] * std::pow(nodes[i], 7);
  }
  CHECK(s0 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(s7 == doctest::Approx((std::pow(2.0, 8) - 1.0) / 8.0).epsilon(1e-13));
}

TEST_CASE("rule construction validates its input") {
  CHECK_THROWS_AS(build_rule(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_rule(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_rule(1, 1.0, {24, 24}), std::invalid_argument);
  CHECK_THROWS_AS(build_rule(1, 1.0, {1, 24, 24}), std::invalid_argument);
}

TEST_CASE("psi-weighted mass of the ball is pi eps^4 on H^1") {
  for (double eps : {0.25, 0.5, 1.0}) {
    const QuadratureRule rule = build_rule(1, eps);
    const double exact = kPi * std::pow(eps, 4);
    CHECK(std::abs(psi_mass(rule) - exact) / exact <= 1e-10);
  }
}

TEST_CASE("rule applied to y1 with psi weight vanishes") {
  const QuadratureRule rule = build_rule(1, 1.0);
  const double v = integrate(rule, 1, [](const double* y, double psi, double* out) {
    out[0] = psi * y[0];
  })[0];
  CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("unweighted volume matches Monte Carlo rejection sampling") {
  const double eps = 1.0;
  const QuadratureRule rule = build_rule(1, eps);
  const double vol = ball_volume(rule);

  std::mt19937_64 gen(777);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t samples = 2'000'000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x1 = u(gen) * eps, x2 = u(gen) * eps, x3 = u(gen) * eps * eps;
    const double h2 = x1 * x1 + x2 * x2;
    if (h2 * h2 + x3 * x3 <= std::pow(eps, 4)) ++hits;
  }
  const double mc = 8.0 * std::pow(eps, 4) * static_cast<double>(hits) / samples;
  CHECK(std::abs(vol - mc) / vol < 0.01);
}

TEST_CASE("doubling every resolution count leaves the mass unchanged") {
  const QuadratureRule coarse = build_rule(1, 0.5);
  std::vector<int> fine_res = coarse.resolution;
  for (int& c : fine_res) c *= 2;
  const QuadratureRule fine = build_rule(1, 0.5, fine_res);
  CHECK(psi_mass(coarse) == doctest::Approx(psi_mass(fine)).epsilon(1e-10));
  CHECK(ball_volume(coarse) == doctest::Approx(ball_volume(fine)).epsilon(1e-10));
}

TEST_CASE("weighted averages preserve constants and fix harmonic fields") {
  const QuadratureRule rule = build_rule(1, 0.7);
  const HPoint center(0.3, -0.2, 0.4);
  CHECK(weighted_ball_average([](const HPoint&) { return 4.25; }, center, rule) ==
        doctest::Approx(4.25).epsilon(1e-14));

  // H-harmonic polynomials are reproduced exactly at the center.
  for (const char* id : {"x1", "x2", "vert", "harmonic-xy"}) {
    const ScalarField f = builtin_field(id);
    for (double eps : {0.1, 0.5, 1.0}) {
      const QuadratureRule r = build_rule(1, eps);
      const double avg =
          weighted_ball_average([&](const HPoint& y) { return f(0.0, y); }, center, r);
      CHECK(std::abs(avg - f(0.0, center)) <= 1e-8);
    }
  }
}

TEST_CASE("quartic moment of y1 over the unit-eps ball") {
  for (double eps : {0.5, 1.0}) {
    const QuadratureRule rule = build_rule(1, eps);
    const double avg = weighted_ball_average(
        [](const HPoint& y) { return std::pow(y.coords[0], 4); }, HPoint::origin(1), rule);
    CHECK(avg == doctest::Approx(std::pow(eps, 4) / 8.0).epsilon(1e-10));
  }
}

TEST_CASE("left-translation covariance of the weighted average") {
  const QuadratureRule rule = build_rule(1, 0.4);
  const ScalarField f = builtin_field("cubic-mix");
  const HPoint center(0.25, 0.5, -0.3);
  const double direct =
      weighted_ball_average([&](const HPoint& y) { return f(0.1, y); }, center, rule);
  const double translated = weighted_ball_average(
      [&](const HPoint& y) { return f(0.1, group_mul(center, y)); }, HPoint::origin(1), rule);
  CHECK(direct == doctest::Approx(translated).epsilon(1e-13));
}

TEST_CASE("closed-form M(n) against the quadrature moments") {
  CHECK(M_constant(1) == doctest::Approx(kPi / 12.0).epsilon(1e-15));
  CHECK(M_constant(2) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  CHECK(M_constant(3) == doctest::Approx(3.0 * kPi / 80.0).epsilon(1e-15));
  CHECK_THROWS_AS(M_constant(0), std::invalid_argument);

  for (int n : {1, 2, 3}) {
    const double eps = 0.8;
    const QuadratureRule rule = build_rule(n, eps);
    const MomentReport rep = moment_check(n, eps, rule);
    CHECK(std::abs(rep.M_estimate - M_constant(n)) / M_constant(n) <= 1e-6);
    CHECK(rep.odd_moments <= 1e-12);
    CHECK(rep.vertical_moment <= 1e-12);
    CHECK(rep.cross_moments <= 1e-12);
    // Equal across coordinates up to the resolution of the default rules.
    for (double d : rep.diagonal_moments)
      CHECK(d == doctest::Approx(rep.diagonal_moments[0]).epsilon(2e-5));
  }
  CHECK_THROWS_AS(moment_check(1, 0.5, build_rule(1, 1.0)), std::invalid_argument);
}

TEST_CASE("ball extremum: constants, linear and vertical fields") {
  const HPoint origin = HPoint::origin(1);
  const double eps = 0.3;

  auto c = ball_extremum([](const HPoint&) { return 2.5; }, origin, eps, ExtremumMode::Max);
  CHECK(c.second == doctest::Approx(2.5));

  auto mx = ball_extremum([](const HPoint& y) { return y.coords[0]; }, origin, eps,
                          ExtremumMode::Max);
  CHECK(mx.second == doctest::Approx(eps).epsilon(1e-7));
  CHECK(gauge(mx.first) == doctest::Approx(eps).epsilon(1e-6));

  // The vertical coordinate peaks at the ball's north pole (0, 0, eps^2).
  auto mv = ball_extremum([](const HPoint& y) { return y.coords[2]; }, origin, eps,
                          ExtremumMode::Max);
  CHECK(mv.second == doctest::Approx(eps * eps).epsilon(1e-7));
  CHECK(mv.first.horizontal().norm() < 1e-3);
}

TEST_CASE("extremum modes are exact mirrors") {
  const ScalarField f = builtin_field("cubic-mix");
  const HPoint center(0.2, -0.1, 0.3);
  auto slice = [&](const HPoint& y) { return f(0.4, y); };
  auto neg = [&](const HPoint& y) { return -f(0.4, y); };
  const auto lo = ball_extremum(slice, center, 0.25, ExtremumMode::Min);
  const auto hi = ball_extremum(neg, center, 0.25, ExtremumMode::Max);
  CHECK(lo.second == -hi.second);  // bit-exact duality
  CHECK(lo.first.coords == hi.first.coords);

  // Deterministic: repeated searches return the identical point.
  const auto again = ball_extremum(slice, center, 0.25, ExtremumMode::Min);
  CHECK(again.first.coords == lo.first.coords);
}

TEST_CASE("minimizing directions approach the negative normalized gradient") {
  const std::vector<double> ladder = {0.4, 0.2, 0.1, 0.05};

  const auto d1 = extremal_direction_estimate(builtin_field("x1"), 0.0, HPoint::origin(1), ladder);
  for (const auto& [eps, dir] : d1) {
    CHECK(dir[0] == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(std::abs(dir[1]) < 1e-3);
  }

  const ScalarField diag = Polynomial::parse("x1 + x2", 1).field("diag");
  const auto d2 = extremal_direction_estimate(diag, 0.0, HPoint::origin(1), {0.1});
  CHECK(d2[0].second[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(d2[0].second[1] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-3));

  CHECK_THROWS_AS(
      extremal_direction_estimate(builtin_field("vert"), 0.0, HPoint::origin(1), ladder),
      degenerate_gradient_error);
}
