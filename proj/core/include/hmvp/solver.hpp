#pragma once

#include <cstdint>
#include <memory>

#include "hmvp/operators.hpp"

namespace hmvp {

struct invalid_grid_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct convergence_error : std::runtime_error {
  convergence_error(int slab_, double last_change_, int iters_)
      : std::runtime_error("inner fixed-point iteration did not converge at slab " +
                           std::to_string(slab_) + " (last change " +
                           std::to_string(last_change_) + " after " + std::to_string(iters_) +
                           " sweeps)"),
        slab(slab_),
        last_change(last_change_),
        iters(iters_) {}
  int slab;
  double last_change;
  int iters;
};

struct GridConfig {
  int n = 1;                    // only H^1 is supported by the solver
  double domain_radius = 1.0;   // gauge ball Omega = { gauge < R }
  double epsilon = 0.1;
  double T = 0.2;
  double delta_t = -1.0;        // <= 0 means epsilon^2
  double horizontal_factor = 0.6;  // hxy = factor * eps
  double vertical_factor = 1.2;    // hz  = factor * eps^2
};

/// Anisotropic lattice over the box [-(R+eps), R+eps]^2 x [-(R+eps)^2,
/// (R+eps)^2] plus a two-cell pad (the pad keeps the cubic interpolation
/// stencil of every ball read inside the lattice), with uniform time slabs.
/// Interior nodes are those with gauge < R; every other lattice node carries
/// lateral data.
struct SpaceTimeGrid {
  GridConfig cfg;
  double hxy = 0.0, hz = 0.0;
  int mx = 0, mz = 0;           // index ranges [-mx,mx]^2 x [-mz,mz]
  std::vector<double> times;    // t_k = k delta_t, k = 0..K
  std::vector<std::uint8_t> interior;  // per flat node index

  int cx() const { return 2 * mx + 1; }
  int cz() const { return 2 * mz + 1; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(cx()) * cx() * cz();
  }
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i + mx) * cx() + (j + mx)) * cz() + (k + mz);
  }
  HPoint point(int i, int j, int k) const { return HPoint(i * hxy, j * hxy, k * hz); }
  void unflat(std::size_t f, int& i, int& j, int& k) const {
    k = static_cast<int>(f % cz()) - mz;
    f /= cz();
    j = static_cast<int>(f % cx()) - mx;
    i = static_cast<int>(f / cx()) - mx;
  }
};

SpaceTimeGrid build_grid(const GridConfig& cfg);

enum class Interpolation { Multilinear, Cubic };

struct SolverConfig {
  MvpParams params;             // epsilon must equal the grid's
  double fp_tolerance = 1e-10;
  int max_inner_iters = 500;
  Interpolation interpolation = Interpolation::Cubic;
  std::vector<int> mean_resolution;  // empty -> {6, 8, 8}
  int window_slices = 0;             // 0 -> round(eps^2 / delta_t)
};

enum class Provenance : std::uint8_t { Initial = 0, Lateral = 1, Computed = 2 };

struct SlabConvergence {
  int iterations = 0;
  double final_change = 0.0;
};

struct DiscreteField {
  std::shared_ptr<const SpaceTimeGrid> grid;
  std::vector<Eigen::VectorXd> values;                  // per slab, full lattice
  std::vector<std::vector<std::uint8_t>> provenance;    // per slab, Provenance
  std::vector<SlabConvergence> history;                 // per solved slab
};

/// Marches time slabs; each interior value is the fixed point of the
/// mean-value blend over its backward window, solved by Jacobi sweeps.  The
/// window reaches the slab being solved with aggregate weight <= 1/2, so the
/// sweeps contract.  Times before t=0 clamp to the initial data.
DiscreteField solve(const SpaceTimeGrid& grid, const SolverConfig& config,
                    const std::function<double(const HPoint&)>& initial,
                    const std::function<double(double, const HPoint&)>& lateral);

struct SlabError {
  double t = 0.0;
  double max_error = 0.0;
  double l2_error = 0.0;  // root mean square over interior nodes
};

std::vector<SlabError> error_report(const DiscreteField& field, const ScalarField& reference);

/// CSV rows (k, t, x1, x2, x3, value, provenance) for every node and slab.
void export_csv(const std::string& path, const DiscreteField& field);

}  // namespace hmvp
