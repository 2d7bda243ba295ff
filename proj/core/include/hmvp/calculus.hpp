#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "hmvp/heisenberg.hpp"

namespace hmvp {

/// Thrown when an operator that divides by |∇₀u| meets a (numerically)
/// vanishing horizontal gradient.  The caller decides the fallback.
struct degenerate_gradient_error : std::runtime_error {
  degenerate_gradient_error() : std::runtime_error("horizontal gradient is numerically zero") {}
};

/// Value, time derivative, horizontal gradient, vertical derivative Tu and
/// symmetrized horizontal Hessian of a scalar field at a space-time point.
struct HorizontalJet {
  double value = 0.0;
  double dt = 0.0;
  Eigen::VectorXd grad0;  // 2n entries
  double vert = 0.0;      // Tu
  Eigen::MatrixXd hess;   // 2n x 2n, symmetric
};

/// The exponent p of the p-Laplacian, with p = ∞ as a distinguished state
/// rather than a floating-point sentinel.
class PExponent {
 public:
  static PExponent finite(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("PExponent: need p > 1");
    return PExponent(p, false);
  }
  static PExponent infinity() { return PExponent(0.0, true); }

  bool is_infinite() const { return infinite_; }
  double value() const {
    if (infinite_) throw std::logic_error("PExponent: value() on p = infinity");
    return p_;
  }
  bool operator==(const PExponent&) const = default;

 private:
  PExponent(double p, bool inf) : p_(p), infinite_(inf) {}
  double p_;
  bool infinite_;
};

/// A scalar field u(t,x) on (an open subset of) R x H^n.  The evaluator must
/// be safe for concurrent invocation.  When analytic_jet is present it is
/// used instead of finite differences.
struct ScalarField {
  std::function<double(double, const HPoint&)> evaluator;
  std::function<HorizontalJet(double, const HPoint&)> analytic_jet;  // optional
  int n = 1;
  std::string label;

  double operator()(double t, const HPoint& x) const { return evaluator(t, x); }
  bool has_analytic_jet() const { return static_cast<bool>(analytic_jet); }
};

/// Coefficient vector of the frame field, i in 1..2n+1 (2n+1 selects T).
Eigen::VectorXd frame_vector(int i, const HPoint& x);

/// Default finite-difference step 1e-4 (1 + gauge(x)).
double default_fd_step(const HPoint& x);

/// Jet of a field at (t,x): the analytic jet when available, otherwise
/// centered second-order differences along the Euclidean axes composed with
/// the frame coefficients.  The horizontal Hessian is exactly symmetric.
HorizontalJet jet(const ScalarField& field, double t, const HPoint& x, double h);
HorizontalJet jet(const ScalarField& field, double t, const HPoint& x);

/// Assembles a jet from Euclidean derivatives: gradient (2n+1), Hessian
/// ((2n+1)^2, symmetric).  Shared by the FD path and analytic polynomials.
HorizontalJet assemble_jet(int n, const HPoint& x, double value, double dt,
                           const Eigen::VectorXd& euclid_grad,
                           const Eigen::MatrixXd& euclid_hess);

/// Threshold below which ∇₀u counts as zero: 1e-9 (1 + |hess|).
double gradient_threshold(const HorizontalJet& j);

/// Δ_H u = trace of the symmetrized horizontal Hessian.
double delta_H(const HorizontalJet& j);

/// Normalized sub-infinity Laplacian <hess g, g> with g = grad0/|grad0|.
/// Throws degenerate_gradient_error when the gradient is numerically zero.
double delta_H_inf(const HorizontalJet& j);

/// (p-2) Δ_H^∞ u + Δ_H u for finite p; Δ_H^∞ u for p = ∞.
double p_laplacian_normalized(const HorizontalJet& j, const PExponent& p);

}  // namespace hmvp
