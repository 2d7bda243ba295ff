#pragma once

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <vector>

namespace hmvp {

/// A point of the Heisenberg group H^n, stored as 2n+1 real coordinates in
/// the order (x_1..x_n, x_{n+1}..x_{2n}, x_{2n+1}).  The first 2n entries are
/// the horizontal coordinates x-bar, the last one is the vertical coordinate.
struct HPoint {
  Eigen::VectorXd coords;
  int n = 1;

  HPoint() : coords(Eigen::VectorXd::Zero(3)) {}
  HPoint(int group_index, Eigen::VectorXd c) : coords(std::move(c)), n(group_index) {
    if (n < 1 || coords.size() != 2 * n + 1)
      throw std::invalid_argument("HPoint: coords must have length 2n+1");
  }
  /// Convenience constructor for H^1.
  HPoint(double x1, double x2, double x3) : coords(3), n(1) { coords << x1, x2, x3; }

  static HPoint origin(int group_index) {
    return HPoint(group_index, Eigen::VectorXd::Zero(2 * group_index + 1));
  }

  int dim() const { return 2 * n + 1; }
  double vertical() const { return coords[2 * n]; }
  auto horizontal() const { return coords.head(2 * n); }
};

// ---------------------------------------------------------------------------
// Raw-buffer kernels.  These avoid allocations in quadrature/solver loops;
// the HPoint overloads below are thin wrappers.
// ---------------------------------------------------------------------------

/// out = a ∘ b.  First 2n coordinates add; the vertical coordinate picks up
/// the twist 2 Σ (b_i a_{n+i} - a_i b_{n+i}).  Aliasing with out is allowed.
void group_mul_into(int n, const double* a, const double* b, double* out);

double gauge_raw(int n, const double* x);
double psi_raw(int n, const double* x);

// ---------------------------------------------------------------------------
// Group operations
// ---------------------------------------------------------------------------

HPoint group_mul(const HPoint& a, const HPoint& b);
HPoint group_inv(const HPoint& a);
HPoint dilate(double lambda, const HPoint& a);

/// Koranyi gauge (|x-bar|^4 + x_{2n+1}^2)^{1/4}.
double gauge(const HPoint& a);

/// Left-invariant quasi-distance gauge(a^{-1} ∘ b).
double left_distance(const HPoint& a, const HPoint& b);

/// psi(x) = |x-bar|^2 / gauge(x)^2, with psi(0) := 0.  Always in [0,1].
double psi(const HPoint& a);

// ---------------------------------------------------------------------------
// Polar coordinates
// ---------------------------------------------------------------------------

/// Polar coordinates (rho, phi, theta_1..theta_{2n-1}) of a gauge ball.
/// phi lies in [0,pi] (the closure is admitted so that closed-ball extremum
/// searches can reach the poles), theta_1..theta_{2n-2} in [0,pi],
/// theta_{2n-1} in [0,2pi).
struct PolarCoord {
  double rho = 0.0;
  double phi = 0.0;
  std::vector<double> thetas;  // 2n-1 angles

  PolarCoord() = default;
  PolarCoord(double rho_, double phi_, std::vector<double> thetas_)
      : rho(rho_), phi(phi_), thetas(std::move(thetas_)) {}
};

/// Cartesian point of the polar chart; gauge(polar_to_point(p)) == p.rho.
HPoint polar_to_point(const PolarCoord& p, int n);

/// Writes the chart point into out[0..2n]; thetas has length 2n-1.
void polar_to_point_into(int n, double rho, double phi, const double* thetas, double* out);

/// Volume density rho^{2n+1} (sin phi)^{n-1} sin^{2n-2}θ_1 ··· sin θ_{2n-2}.
double polar_jacobian(const PolarCoord& p, int n);

/// Homogeneous dimension Q = 2n + 2.
inline int homogeneous_dimension(int n) { return 2 * n + 2; }

}  // namespace hmvp
