#pragma once

#include <optional>
#include <vector>

#include "hmvp/quadrature.hpp"

namespace hmvp {

/// alpha = M(n)(p-2) / (1 + M(n)(p-2)), beta = 1 - alpha; (1,0) at p = inf.
/// alpha < 0 for 1 < p < 2, which the blend evaluates as written.
std::pair<double, double> alpha_beta(const PExponent& p, int n);

struct MvpParams {
  int n = 1;
  PExponent p = PExponent::finite(2.0);
  double epsilon = 0.1;
  double M = 0.0;
  double alpha = 0.0;
  double beta = 1.0;
  // Length of the backward time window in units of epsilon^2.  Scale 1 pairs
  // with u_t = M(n) Delta_H u at p=2; scale M(n) with u_t = Delta_H u.
  double time_window_scale = 1.0;

  static MvpParams make(int n, const PExponent& p, double epsilon,
                        double time_window_scale = 1.0);
};

/// The three space-time mean-value operators at a fixed (n, p, epsilon).
/// The spatial rule and time nodes are built once and reused; evaluation is
/// const and thread-safe.
class MvpOperators {
 public:
  explicit MvpOperators(const MvpParams& params, int time_nodes = 16,
                        std::optional<std::vector<int>> resolution = std::nullopt,
                        SearchConfig search = {});

  const MvpParams& params() const { return params_; }

  /// Time average over [t - scale eps^2, t] of the psi-weighted ball mean.
  double spacetime_weighted_mean(const ScalarField& u, double t, const HPoint& x) const;

  /// Time average of (max + min)/2 over the closed ball.
  double spacetime_midrange(const ScalarField& u, double t, const HPoint& x) const;

  /// alpha * midrange + beta * weighted mean.  Returns the pure operator
  /// (bit-identical) when alpha or beta vanishes.
  double mvp_blend(const ScalarField& u, double t, const HPoint& x) const;

  /// mvp_blend - u - (eps^2/2)[alpha D_inf u + beta M D_H u - scale u_t];
  /// o(eps^2) for smooth u.  The D_inf term is only evaluated when alpha != 0.
  double expansion_residual(const ScalarField& u, double t, const HPoint& x) const;

  /// The subtracted second-order term by itself.
  double predicted_term(const ScalarField& u, double t, const HPoint& x) const;

 private:
  MvpParams params_;
  QuadratureRule rule_;
  SearchConfig search_;
  std::vector<double> time_nodes_, time_weights_;  // on [0,1], mapped per call
};

struct ExpansionReport {
  std::vector<double> eps_ladder;   // strictly decreasing
  std::vector<double> residuals;
  std::vector<double> predicted_terms;
  std::vector<double> values;       // operator values at each eps
  double fitted_order = 0.0;        // +inf sentinel when residuals vanish
  bool exact = false;
};

/// Least-squares slope of log|residual| against log eps.  Residuals below
/// zero_tol in magnitude count as exact; an all-exact ladder gets order +inf.
ExpansionReport order_fit(const std::vector<double>& eps_ladder,
                          const std::vector<double>& residuals, double zero_tol = 1e-12);

/// Runs expansion_residual over the ladder and fits the order.
ExpansionReport expansion_study(const ScalarField& u, double t, const HPoint& x,
                                const PExponent& p, const std::vector<double>& eps_ladder,
                                double time_window_scale = 1.0, int time_nodes = 16);

/// The quartic caloric field 12t^2 + 12x1^2 t + x1^4 satisfies u_t = D_H u
/// identically, yet its windowed space-time mean at (1,0) misses the point
/// value by a definite eps^4 amount.  This report measures every piece.
struct CounterexampleReport {
  std::vector<double> eps_ladder;
  double pde_residual_max = 0.0;          // max |u_t - D_H u| over sample points
  double psi_mass_rel_err_max = 0.0;      // vs pi eps^4
  double spatial_mean_rel_err_max = 0.0;  // vs 12 s^2 + pi eps^2 s + eps^4/8
  std::vector<double> mean_minus_value;   // time-averaged mean at (1,0) minus 12
  std::vector<double> predicted;          // (1/8 - pi^2/72) eps^4
  double fitted_order = 0.0;
};

CounterexampleReport counterexample_report(const std::vector<double>& eps_ladder);

}  // namespace hmvp
