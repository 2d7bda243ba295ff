#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "hmvp/calculus.hpp"
#include "hmvp/heisenberg.hpp"

namespace hmvp {

/// Tensor-product rule over a gauge ball of radius epsilon in polar
/// coordinates: Gauss-Legendre in rho, phi and theta_1..theta_{2n-2},
/// uniform periodic nodes in theta_{2n-1}.  Nodes are enumerated lazily from
/// the per-axis tables, so large rules cost no memory.
struct QuadratureRule {
  int n = 1;
  double epsilon = 1.0;
  std::vector<int> resolution;                 // [n_rho, n_phi, n_theta_1, ...]
  std::vector<std::vector<double>> axis_nodes;   // same axis order
  std::vector<std::vector<double>> axis_weights;

  std::size_t node_count() const;
};

/// Per-axis node counts used when none are given.  Chosen so the diagonal
/// moments of the lemma below are exact to ~1e-9 relative or better.
std::vector<int> default_resolution(int n);

QuadratureRule build_rule(int n, double epsilon, const std::vector<int>& resolution);
QuadratureRule build_rule(int n, double epsilon);

/// Gauss-Legendre nodes/weights on [a,b].  Exposed for the time quadrature.
void gauss_legendre(int count, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Integrates m functionals at once over the ball (offsets from the origin).
/// fn(offset_coords, psi_at_offset, out) writes m integrand values; the
/// volume element is applied by the driver.  The reduction order is fixed,
/// so results are reproducible regardless of worker count.
Eigen::VectorXd integrate(const QuadratureRule& rule, int m,
                          const std::function<void(const double*, double, double*)>& fn);

/// ∫_{B_eps} psi dx and the unweighted Lebesgue volume.
double psi_mass(const QuadratureRule& rule);
double ball_volume(const QuadratureRule& rule);

/// psi-weighted average of f over B_eps(center): the weight is evaluated at
/// the untranslated offset, f at the left-translated point center∘offset.
double weighted_ball_average(const std::function<double(const HPoint&)>& f, const HPoint& center,
                             const QuadratureRule& rule);

/// Closed-form constant M(n): the psi-weighted average of y_i^2 over a unit
/// ball divided by eps^2, with parity-dependent double-factorial form.
double M_constant(int n);

/// The moment identities at center 0, nondimensionalized: first moments /
/// (mass·eps), twisted vertical moment and cross moments / (mass·eps^2).
struct MomentReport {
  int n = 1;
  double epsilon = 1.0;
  double odd_moments = 0.0;       // max_i |avg y_i| / eps
  double vertical_moment = 0.0;   // |avg y_{2n+1}| / eps^2
  double cross_moments = 0.0;     // max_{i!=j} |avg y_i y_j| / eps^2
  std::vector<double> diagonal_moments;  // avg y_i^2, 2n values
  double M_estimate = 0.0;        // mean diagonal / eps^2
};

MomentReport moment_check(int n, double epsilon, const QuadratureRule& rule);

/// Extremum search over the closed ball: coarse polar scan, then compass
/// refinement in polar parameters.  Ties break to the first-found node in
/// scan order.  The minimum is computed as -max(-f), so the two modes are
/// exact mirrors.
struct SearchConfig {
  int rho_samples = 14;
  int phi_samples = 14;
  int theta_samples = 14;
  double tol = 1e-9;       // relative step-size stop
  int max_iters = 400;
};

enum class ExtremumMode { Max, Min };

std::pair<HPoint, double> ball_extremum(const std::function<double(const HPoint&)>& f,
                                        const HPoint& center, double epsilon, ExtremumMode mode,
                                        const SearchConfig& search = {});

/// For each eps in the ladder: the unit horizontal direction from center to
/// the minimizer of the spatial slice f(t,·) over the closed eps-ball.  As
/// eps shrinks this approaches -grad0 f/|grad0 f| at the center.
std::vector<std::pair<double, Eigen::VectorXd>> extremal_direction_estimate(
    const ScalarField& f, double t, const HPoint& center, const std::vector<double>& eps_ladder,
    const SearchConfig& search = {});

}  // namespace hmvp
