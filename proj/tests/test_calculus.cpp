#include <doctest.h>

#include <cmath>

#include "hmvp/calculus.hpp"
#include "hmvp/polynomial.hpp"

using namespace hmvp;

namespace {

// A field that only exposes its evaluator, forcing the finite-difference
// path even when an exact jet exists.
ScalarField evaluator_only(const ScalarField& f) {
  ScalarField g = f;
  g.analytic_jet = nullptr;
  return g;
}

}  // namespace

TEST_CASE("frame vectors") {
  const HPoint origin = HPoint::origin(1);
  CHECK(frame_vector(1, origin) == Eigen::Vector3d(1, 0, 0));
  CHECK(frame_vector(2, origin) == Eigen::Vector3d(0, 1, 0));
  CHECK(frame_vector(3, origin) == Eigen::Vector3d(0, 0, 1));
  CHECK(frame_vector(1, HPoint(0, 3, 0)) == Eigen::Vector3d(1, 0, 6));
  CHECK(frame_vector(2, HPoint(5, 0, 0)) == Eigen::Vector3d(0, 1, -10));
  CHECK_THROWS_AS(frame_vector(4, origin), std::invalid_argument);
  CHECK_THROWS_AS(frame_vector(0, origin), std::invalid_argument);
}

TEST_CASE("jet of linear coordinate fields") {
  const ScalarField f = builtin_field("x1");
  const HorizontalJet j = jet(f, 0.0, HPoint(0.3, -0.7, 0.2));
  CHECK(j.grad0[0] == doctest::Approx(1.0));
  CHECK(j.grad0[1] == doctest::Approx(0.0));
  CHECK(j.vert == doctest::Approx(0.0));
  CHECK(j.hess.norm() == doctest::Approx(0.0));
}

TEST_CASE("jet of the vertical coordinate") {
  const ScalarField f = builtin_field("vert");
  const double a = 0.4, b = -1.1;
  for (const ScalarField& g : {f, evaluator_only(f)}) {
    const HorizontalJet j = jet(g, 0.0, HPoint(a, b, 0.6));
    CHECK(j.grad0[0] == doctest::Approx(2 * b).epsilon(1e-6));
    CHECK(j.grad0[1] == doctest::Approx(-2 * a).epsilon(1e-6));
    CHECK(j.vert == doctest::Approx(1.0).epsilon(1e-8));
    // X1X2 x3 = -2 and X2X1 x3 = 2 cancel under symmetrization.
    CHECK(j.hess.norm() == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("jet of the quartic caloric field at (1, 0)") {
  const ScalarField f = builtin_field("heat-quartic");
  const HorizontalJet j = jet(f, 1.0, HPoint::origin(1));
  CHECK(j.dt == doctest::Approx(24.0));
  CHECK(j.grad0.norm() == doctest::Approx(0.0));
  CHECK(j.hess(0, 0) == doctest::Approx(24.0));
  CHECK(j.hess(1, 1) == doctest::Approx(0.0));
  CHECK(j.hess(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("horizontal Hessian is exactly symmetric by construction") {
  const ScalarField f = evaluator_only(builtin_field("cubic-mix"));
  const HorizontalJet j = jet(f, 0.3, HPoint(0.5, -0.2, 0.1));
  CHECK((j.hess - j.hess.transpose()).norm() == 0.0);
}

TEST_CASE("finite differences converge at second order") {
  const std::vector<std::string> ids = {"heat-quartic", "cubic-mix", "quartic-radial"};
  for (const auto& id : ids) {
    const ScalarField exact = builtin_field(id);
    const ScalarField fd = evaluator_only(exact);
    const HPoint x(0.4, 0.3, -0.2);
    const double t = 0.7;
    const HorizontalJet je = jet(exact, t, x);

    std::vector<double> hs = {1e-2, 5e-3, 2.5e-3}, errs;
    for (double h : hs) {
      const HorizontalJet jf = jet(fd, t, x, h);
      double err = std::abs(jf.dt - je.dt) + (jf.grad0 - je.grad0).norm() +
                   std::abs(jf.vert - je.vert) + (jf.hess - je.hess).norm();
      errs.push_back(err);
    }
    // log-log slope between the first and last ladder point
    const double slope = std::log(errs.front() / errs.back()) / std::log(hs.front() / hs.back());
    INFO(id, " slope ", slope);
    CHECK(slope >= 1.9);
  }
}

TEST_CASE("commutator identity [X1, X2] f = -4 T f") {
  const ScalarField f = builtin_field("heat-quartic");
  // X2 f and X1 f from exact jets; outer derivative by central differences.
  auto Xif = [&](int i, const HPoint& x) { return jet(f, 0.5, x).grad0[i - 1]; };
  const HPoint x(0.3, -0.4, 0.2);
  const double h = 1e-5;
  auto directional = [&](int outer, int inner) {
    // X_outer applied to (X_inner f) via its Euclidean form.
    const Eigen::VectorXd c = frame_vector(outer, x);
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (c[k] == 0.0) continue;
      HPoint xp = x, xm = x;
      xp.coords[k] += h;
      xm.coords[k] -= h;
      acc += c[k] * (Xif(inner, xp) - Xif(inner, xm)) / (2.0 * h);
    }
    return acc;
  };
  const double commutator = directional(1, 2) - directional(2, 1);
  const double Tf = jet(f, 0.5, x).vert;
  CHECK(commutator == doctest::Approx(-4.0 * Tf).epsilon(1e-6));
}

TEST_CASE("delta_H values") {
  const Polynomial sq = Polynomial::parse("x1^2 + x2^2", 1);
  CHECK(delta_H(jet(sq.field("hsq"), 0, HPoint(0.2, 0.4, -0.1))) == doctest::Approx(4.0));
  CHECK(delta_H(jet(builtin_field("harmonic-xy"), 0, HPoint(1.2, -0.4, 0.3))) ==
        doctest::Approx(0.0));
  HorizontalJet j;
  j.grad0 = Eigen::Vector2d(1, 0);
  j.hess = Eigen::Matrix2d::Zero();
  CHECK(delta_H(j) == 0.0);
}

TEST_CASE("delta_H_inf values and degeneracy") {
  HorizontalJet j;
  j.grad0 = Eigen::Vector2d(0.3, -0.4);
  j.hess = Eigen::Matrix2d::Identity();
  CHECK(delta_H_inf(j) == doctest::Approx(1.0));

  const ScalarField f = builtin_field("x1sq");
  CHECK(delta_H_inf(jet(f, 0, HPoint(0.5, 0.3, 0))) == doctest::Approx(2.0));

  j.grad0.setZero();
  CHECK_THROWS_AS(delta_H_inf(j), degenerate_gradient_error);
}

TEST_CASE("delta_H_inf is invariant under gradient rescaling and 1-homogeneous") {
  HorizontalJet j;
  j.grad0 = Eigen::Vector2d(0.2, 0.7);
  Eigen::Matrix2d h;
  h << 1.5, -0.3, -0.3, 0.8;
  j.hess = h;
  const double base = delta_H_inf(j);
  HorizontalJet scaled_grad = j;
  scaled_grad.grad0 *= 17.0;
  CHECK(delta_H_inf(scaled_grad) == doctest::Approx(base).epsilon(1e-15));

  HorizontalJet scaled_field = j;  // jet of c*u scales grad and hess together
  scaled_field.grad0 *= 3.0;
  scaled_field.hess *= 3.0;
  CHECK(delta_H_inf(scaled_field) == doctest::Approx(3.0 * base).epsilon(1e-14));
}

TEST_CASE("normalized p-laplacian") {
  const ScalarField f = builtin_field("x1sq");
  const HorizontalJet j = jet(f, 0, HPoint(0.5, 0.3, 0));
  CHECK(p_laplacian_normalized(j, PExponent::finite(4.0)) == doctest::Approx(6.0));
  CHECK(p_laplacian_normalized(j, PExponent::infinity()) == doctest::Approx(2.0));

  // p = 2 never touches the gradient.
  HorizontalJet degenerate;
  degenerate.grad0 = Eigen::Vector2d::Zero();
  degenerate.hess = Eigen::Matrix2d::Identity();
  CHECK(p_laplacian_normalized(degenerate, PExponent::finite(2.0)) == doctest::Approx(2.0));
  CHECK_THROWS_AS(p_laplacian_normalized(degenerate, PExponent::finite(3.0)),
                  degenerate_gradient_error);
}

TEST_CASE("p exponent type") {
  CHECK_THROWS_AS(PExponent::finite(1.0), std::invalid_argument);
  CHECK_THROWS_AS(PExponent::finite(0.5), std::invalid_argument);
  CHECK(PExponent::infinity().is_infinite());
  CHECK_THROWS_AS(PExponent::infinity().value(), std::logic_error);
  CHECK(PExponent::finite(3.0).value() == 3.0);
  CHECK(PExponent::finite(3.0) == PExponent::finite(3.0));
}
