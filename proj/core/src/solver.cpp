#include "hmvp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hmvp/io.hpp"
#include "hmvp/parallel.hpp"

namespace hmvp {

SpaceTimeGrid build_grid(const GridConfig& cfg) {
  if (cfg.n != 1) throw invalid_grid_error("solver grid supports n=1 only");
  if (!(cfg.domain_radius > 0) || !(cfg.epsilon > 0) || !(cfg.T > 0))
    throw invalid_grid_error("domain_radius, epsilon and T must be positive");
  SpaceTimeGrid g;
  g.cfg = cfg;
  if (g.cfg.delta_t <= 0) g.cfg.delta_t = cfg.epsilon * cfg.epsilon;
  if (g.cfg.delta_t > cfg.epsilon * cfg.epsilon * (1.0 + 1e-12))
    throw invalid_grid_error("delta_t must not exceed epsilon^2 (window needs one slab)");
  g.hxy = cfg.horizontal_factor * cfg.epsilon;
  g.hz = cfg.vertical_factor * cfg.epsilon * cfg.epsilon;
  const double R = cfg.domain_radius, eps = cfg.epsilon;
  // Two extra cells keep every cubic read inside the lattice: reads reach
  // |x1|,|x2| <= R+eps and |x3| <= (R+eps)^2, the stencil adds two cells.
  g.mx = static_cast<int>(std::ceil((R + eps) / g.hxy)) + 2;
  g.mz = static_cast<int>(std::ceil((R + eps) * (R + eps) / g.hz)) + 2;

  const int K = static_cast<int>(std::ceil(cfg.T / g.cfg.delta_t - 1e-9));
  g.times.resize(K + 1);
  for (int k = 0; k <= K; ++k) g.times[k] = k * g.cfg.delta_t;

  g.interior.assign(g.node_count(), 0);
  for (int i = -g.mx; i <= g.mx; ++i)
    for (int j = -g.mx; j <= g.mx; ++j)
      for (int k = -g.mz; k <= g.mz; ++k) {
        const double x1 = i * g.hxy, x2 = j * g.hxy, x3 = k * g.hz;
        const double h2 = x1 * x1 + x2 * x2;
        if (h2 * h2 + x3 * x3 < R * R * R * R) g.interior[g.flat(i, j, k)] = 1;
      }
  return g;
}

namespace {

// 1-D interpolation weights at fractional lattice position pos; writes the
// first lattice index and up to four weights.
int interp_weights(double pos, Interpolation mode, int& base, double w[4]) {
  const double fl = std::floor(pos);
  const double u = pos - fl;
  const int b = static_cast<int>(fl);
  if (mode == Interpolation::Multilinear) {
    base = b;
    w[0] = 1.0 - u;
    w[1] = u;
    return 2;
  }
  base = b - 1;
  w[0] = -u * (u - 1.0) * (u - 2.0) / 6.0;
  w[1] = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  w[2] = -(u + 1.0) * u * (u - 2.0) / 2.0;
  w[3] = (u + 1.0) * u * (u - 1.0) / 6.0;
  return 4;
}

struct Stencil {
  std::vector<std::ptrdiff_t> deltas;  // flat-index offsets
  std::vector<double> coeffs;          // sum to 1 exactly after normalization
};

// The ball-mean stencil of a node depends on its horizontal column only:
// horizontal offsets are translation invariant and the vertical twist
// 2(y1 x2 - x1 y2) depends on (x1, x2) alone, while on-lattice x3 shifts by
// whole cells.  The same holds for ball membership, so both tables are
// built per column.
class ColumnTables {
 public:
  ColumnTables(const SpaceTimeGrid& g, const SolverConfig& cfg, bool need_mean,
               bool need_extrema)
      : g_(g) {
    const int cx = g.cx();
    column_index_.assign(static_cast<std::size_t>(cx) * cx, -1);

    std::vector<std::pair<int, int>> columns;
    for (int i = -g.mx; i <= g.mx; ++i)
      for (int j = -g.mx; j <= g.mx; ++j) {
        bool any = false;
        for (int k = -g.mz; k <= g.mz && !any; ++k) any = g.interior[g.flat(i, j, k)] != 0;
        if (any) {
          column_index_[(i + g.mx) * cx + (j + g.mx)] = static_cast<int>(columns.size());
          columns.emplace_back(i, j);
        }
      }

    if (need_mean) build_mean(columns, cfg);
    if (need_extrema) build_extrema(columns);
  }

  int column_of(int i, int j) const {
    return column_index_[(i + g_.mx) * static_cast<std::size_t>(g_.cx()) + (j + g_.mx)];
  }
  const Stencil& mean(int column) const { return mean_[column]; }
  const std::vector<std::ptrdiff_t>& neighbors(int column) const { return neighbors_[column]; }

 private:
  void build_mean(const std::vector<std::pair<int, int>>& columns, const SolverConfig& cfg) {
    std::vector<int> res = cfg.mean_resolution.empty() ? std::vector<int>{6, 8, 8}
                                                       : cfg.mean_resolution;
    const QuadratureRule rule = build_rule(1, g_.cfg.epsilon, res);

    struct QNode {
      double y1, y2, y3, wpsi;
    };
    std::vector<QNode> qnodes;
    for (std::size_t a = 0; a < rule.axis_nodes[0].size(); ++a)
      for (std::size_t b = 0; b < rule.axis_nodes[1].size(); ++b)
        for (std::size_t c = 0; c < rule.axis_nodes[2].size(); ++c) {
          const double rho = rule.axis_nodes[0][a], phi = rule.axis_nodes[1][b];
          const double theta = rule.axis_nodes[2][c];
          double y[3];
          polar_to_point_into(1, rho, phi, &theta, y);
          const double w = rule.axis_weights[0][a] * rule.axis_weights[1][b] *
                           rule.axis_weights[2][c] * std::sin(phi);
          qnodes.push_back({y[0], y[1], y[2], w});
        }

    mean_.resize(columns.size());
    const std::ptrdiff_t czs = g_.cz(), cxs = g_.cx();
    parallel_chunks(columns.size(), [&](std::size_t lo, std::size_t hi, std::size_t) {
      std::unordered_map<std::int64_t, double> acc;
      for (std::size_t c = lo; c < hi; ++c) {
        acc.clear();
        const double x1 = columns[c].first * g_.hxy, x2 = columns[c].second * g_.hxy;
        for (const QNode& q : qnodes) {
          const double vz = (q.y3 + 2.0 * (q.y1 * x2 - x1 * q.y2)) / g_.hz;
          int bi, bj, bk;
          double wi[4], wj[4], wk[4];
          const int ci = interp_weights(q.y1 / g_.hxy, cfg.interpolation, bi, wi);
          const int cj = interp_weights(q.y2 / g_.hxy, cfg.interpolation, bj, wj);
          const int ck = interp_weights(vz, cfg.interpolation, bk, wk);
          for (int a = 0; a < ci; ++a)
            for (int b = 0; b < cj; ++b)
              for (int d = 0; d < ck; ++d) {
                const std::int64_t key = ((std::int64_t)(bi + a + 512) << 40) |
                                         ((std::int64_t)(bj + b + 512) << 20) |
                                         (std::int64_t)(bk + d + 512);
                acc[key] += q.wpsi * wi[a] * wj[b] * wk[d];
              }
        }
        Stencil& s = mean_[c];
        s.deltas.reserve(acc.size());
        s.coeffs.reserve(acc.size());
        double sum = 0.0;
        for (const auto& [key, v] : acc) sum += v;
        // Sorted for a reproducible application order.
        std::vector<std::pair<std::int64_t, double>> entries(acc.begin(), acc.end());
        std::sort(entries.begin(), entries.end());
        for (const auto& [key, v] : entries) {
          const int di = static_cast<int>((key >> 40) & 0xFFFFF) - 512;
          const int dj = static_cast<int>((key >> 20) & 0xFFFFF) - 512;
          const int dk = static_cast<int>(key & 0xFFFFF) - 512;
          s.deltas.push_back((static_cast<std::ptrdiff_t>(di) * cxs + dj) * czs + dk);
          s.coeffs.push_back(v / sum);  // exact partition of unity
        }
      }
    });
  }

  void build_extrema(const std::vector<std::pair<int, int>>& columns) {
    neighbors_.resize(columns.size());
    const double eps = g_.cfg.epsilon;
    const double e4 = std::pow(eps, 4);
    const std::ptrdiff_t czs = g_.cz(), cxs = g_.cx();
    const int span = static_cast<int>(std::floor(eps / g_.hxy)) + 1;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double x1 = columns[c].first * g_.hxy, x2 = columns[c].second * g_.hxy;
      auto& list = neighbors_[c];
      for (int di = -span; di <= span; ++di)
        for (int dj = -span; dj <= span; ++dj) {
          const double d1 = di * g_.hxy, d2 = dj * g_.hxy;
          const double h4 = (d1 * d1 + d2 * d2) * (d1 * d1 + d2 * d2);
          if (h4 > e4) continue;
          const double s = std::sqrt(e4 - h4);
          // gauge offset w3 = dk hz - 2 (x2 d1 - x1 d2); |w3| <= s
          const double center = 2.0 * (x2 * d1 - x1 * d2);
          const int klo = static_cast<int>(std::ceil((center - s) / g_.hz - 1e-12));
          const int khi = static_cast<int>(std::floor((center + s) / g_.hz + 1e-12));
          for (int dk = klo; dk <= khi; ++dk)
            list.push_back((static_cast<std::ptrdiff_t>(di) * cxs + dj) * czs + dk);
        }
    }
  }

  const SpaceTimeGrid& g_;
  std::vector<int> column_index_;
  std::vector<Stencil> mean_;
  std::vector<std::vector<std::ptrdiff_t>> neighbors_;
};

struct WindowPiece {
  double weight;  // trapezoid weight, sums to 1 over the window
  int slab;       // base slab l (time-clamped); -1 marks the current iterate
  double theta;   // interpolation toward slab+1 (or the iterate when slab+1==k)
};

}  // namespace

DiscreteField solve(const SpaceTimeGrid& grid, const SolverConfig& config,
                    const std::function<double(const HPoint&)>& initial,
                    const std::function<double(double, const HPoint&)>& lateral) {
  const double eps = grid.cfg.epsilon;
  if (config.params.n != 1 || grid.cfg.n != 1)
    throw invalid_grid_error("solve: only n=1 is supported");
  if (std::abs(config.params.epsilon - eps) > 1e-12 * (1.0 + eps))
    throw invalid_grid_error("solve: params.epsilon must match the grid");

  const double alpha = config.params.alpha, beta = config.params.beta;
  const bool need_mean = beta != 0.0;
  const bool need_extrema = alpha != 0.0;
  const double dt = grid.cfg.delta_t;
  const double window = eps * eps;

  ColumnTables tables(grid, config, need_mean, need_extrema);

  // Interior node bookkeeping.
  struct Node {
    std::size_t flat;
    int column;
  };
  std::vector<Node> nodes;
  for (int i = -grid.mx; i <= grid.mx; ++i)
    for (int j = -grid.mx; j <= grid.mx; ++j)
      for (int k = -grid.mz; k <= grid.mz; ++k) {
        const std::size_t f = grid.flat(i, j, k);
        if (grid.interior[f]) nodes.push_back({f, tables.column_of(i, j)});
      }
  const std::size_t ni = nodes.size();

  const int K = static_cast<int>(grid.times.size()) - 1;
  DiscreteField field;
  field.grid = std::make_shared<SpaceTimeGrid>(grid);
  field.values.assign(K + 1, Eigen::VectorXd::Zero(grid.node_count()));
  field.provenance.assign(K + 1,
                          std::vector<std::uint8_t>(grid.node_count(),
                                                    static_cast<std::uint8_t>(Provenance::Lateral)));

  // Slab 0: initial data everywhere.
  {
    Eigen::VectorXd& v0 = field.values[0];
    for (int i = -grid.mx; i <= grid.mx; ++i)
      for (int j = -grid.mx; j <= grid.mx; ++j)
        for (int k = -grid.mz; k <= grid.mz; ++k) {
          const std::size_t f = grid.flat(i, j, k);
          v0[f] = initial(grid.point(i, j, k));
          field.provenance[0][f] = static_cast<std::uint8_t>(Provenance::Initial);
        }
  }

  auto apply_mean = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    parallel_chunks(ni, [&](std::size_t lo, std::size_t hi, std::size_t) {
      for (std::size_t q = lo; q < hi; ++q) {
        const Stencil& s = tables.mean(nodes[q].column);
        const double* base = v.data() + nodes[q].flat;
        double acc = 0.0;
        for (std::size_t e = 0; e < s.deltas.size(); ++e) acc += s.coeffs[e] * base[s.deltas[e]];
        out[q] = acc;
      }
    });
  };

  std::vector<Eigen::VectorXd> mean_dots(K + 1);  // S u_l per slab, interior rows
  if (need_mean) {
    mean_dots[0].resize(ni);
    apply_mean(field.values[0], mean_dots[0]);
  }

  const int m = config.window_slices > 0
                    ? config.window_slices
                    : std::max(1, static_cast<int>(std::llround(window / dt)));

  for (int k = 1; k <= K; ++k) {
    const double tk = grid.times[k];

    // Trapezoid discretization of the backward window [tk - eps^2, tk];
    // earlier times interpolate linearly between finished slabs and clamp
    // to the initial data below t=0.
    std::vector<WindowPiece> pieces;
    for (int q = 0; q <= m; ++q) {
      const double w = ((q == 0 || q == m) ? 0.5 : 1.0) / m;
      const double s = tk - window + window * q / m;
      if (q == m) {
        pieces.push_back({w, -1, 0.0});
        continue;
      }
      if (s <= 0.0) {
        pieces.push_back({w, 0, 0.0});
        continue;
      }
      int l = static_cast<int>(std::floor(s / dt + 1e-9));
      l = std::min(l, k - 1);
      double theta = s / dt - l;
      if (theta < 1e-12) theta = 0.0;
      pieces.push_back({w, l, theta});
    }

    // Fresh lateral data plus a warm start for the interior.
    Eigen::VectorXd v = field.values[k - 1];
    for (int i = -grid.mx; i <= grid.mx; ++i)
      for (int j = -grid.mx; j <= grid.mx; ++j)
        for (int kk = -grid.mz; kk <= grid.mz; ++kk) {
          const std::size_t f = grid.flat(i, j, kk);
          if (!grid.interior[f]) v[f] = lateral(tk, grid.point(i, j, kk));
        }
    if (k >= 2)
      for (const Node& nd : nodes)
        v[nd.flat] = 2.0 * field.values[k - 1][nd.flat] - field.values[k - 2][nd.flat];

    // Mean contribution from finished slabs is iteration-invariant.
    Eigen::VectorXd mean_known;
    double mean_iterate_coeff = 0.0;
    if (need_mean) {
      mean_known = Eigen::VectorXd::Zero(ni);
      for (const WindowPiece& p : pieces) {
        if (p.slab == -1) {
          mean_iterate_coeff += p.weight;
        } else if (p.slab + 1 == k && p.theta > 0.0) {
          mean_known += p.weight * (1.0 - p.theta) * mean_dots[p.slab];
          mean_iterate_coeff += p.weight * p.theta;
        } else if (p.theta > 0.0) {
          mean_known += p.weight * ((1.0 - p.theta) * mean_dots[p.slab] +
                                    p.theta * mean_dots[p.slab + 1]);
        } else {
          mean_known += p.weight * mean_dots[p.slab];
        }
      }
    }

    Eigen::VectorXd sv(ni), newv(ni);
    std::vector<Eigen::VectorXd> slices;  // per piece full node vectors (extrema path)
    int iter = 0;
    double change = std::numeric_limits<double>::infinity();
    for (iter = 1; iter <= config.max_inner_iters; ++iter) {
      if (need_mean) apply_mean(v, sv);

      if (need_extrema) {
        slices.assign(pieces.size(), Eigen::VectorXd());
        for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
          const WindowPiece& p = pieces[pi];
          if (p.slab == -1)
            slices[pi] = v;
          else if (p.theta > 0.0) {
            const Eigen::VectorXd& next = (p.slab + 1 == k) ? v : field.values[p.slab + 1];
            slices[pi] = (1.0 - p.theta) * field.values[p.slab] + p.theta * next;
          } else
            slices[pi] = field.values[p.slab];
        }
      }

      parallel_chunks(ni, [&](std::size_t lo, std::size_t hi, std::size_t) {
        for (std::size_t q = lo; q < hi; ++q) {
          double value = 0.0;
          if (need_mean) value += beta * (mean_known[q] + mean_iterate_coeff * sv[q]);
          if (need_extrema) {
            const auto& neigh = tables.neighbors(nodes[q].column);
            double mr = 0.0;
            for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
              const double* base = slices[pi].data() + nodes[q].flat;
              double hi_v = -std::numeric_limits<double>::infinity();
              double lo_v = std::numeric_limits<double>::infinity();
              for (std::ptrdiff_t d : neigh) {
                const double val = base[d];
                hi_v = std::max(hi_v, val);
                lo_v = std::min(lo_v, val);
              }
              mr += pieces[pi].weight * 0.5 * (hi_v + lo_v);
            }
            value += alpha * mr;
          }
          newv[q] = value;
        }
      });

      change = 0.0;
      for (std::size_t q = 0; q < ni; ++q)
        change = std::max(change, std::abs(newv[q] - v[nodes[q].flat]));
      for (std::size_t q = 0; q < ni; ++q) v[nodes[q].flat] = newv[q];
      if (change < config.fp_tolerance) break;
    }
    if (change >= config.fp_tolerance) throw convergence_error(k, change, config.max_inner_iters);

    field.values[k] = v;
    for (const Node& nd : nodes)
      field.provenance[k][nd.flat] = static_cast<std::uint8_t>(Provenance::Computed);
    field.history.push_back({iter, change});
    if (need_mean) {
      mean_dots[k].resize(ni);
      apply_mean(field.values[k], mean_dots[k]);
    }
  }
  return field;
}

std::vector<SlabError> error_report(const DiscreteField& field, const ScalarField& reference) {
  const SpaceTimeGrid& g = *field.grid;
  std::vector<SlabError> out;
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    SlabError e;
    e.t = g.times[k];
    double sq = 0.0;
    std::size_t count = 0;
    for (int i = -g.mx; i <= g.mx; ++i)
      for (int j = -g.mx; j <= g.mx; ++j)
        for (int kk = -g.mz; kk <= g.mz; ++kk) {
          const std::size_t f = g.flat(i, j, kk);
          if (!g.interior[f]) continue;
          const double err = std::abs(field.values[k][f] - reference(e.t, g.point(i, j, kk)));
          e.max_error = std::max(e.max_error, err);
          sq += err * err;
          ++count;
        }
    e.l2_error = count ? std::sqrt(sq / count) : 0.0;
    out.push_back(e);
  }
  return out;
}

void export_csv(const std::string& path, const DiscreteField& field) {
  const SpaceTimeGrid& g = *field.grid;
  CsvWriter csv(path);
  csv.row({"k", "t", "x1", "x2", "x3", "value", "provenance"});
  static const char* names[] = {"initial", "lateral", "computed"};
  for (std::size_t k = 0; k < field.values.size(); ++k)
    for (int i = -g.mx; i <= g.mx; ++i)
      for (int j = -g.mx; j <= g.mx; ++j)
        for (int kk = -g.mz; kk <= g.mz; ++kk) {
          const std::size_t f = g.flat(i, j, kk);
          const HPoint x = g.point(i, j, kk);
          csv.row({std::to_string(k), format_number(g.times[k]), format_number(x.coords[0]),
                   format_number(x.coords[1]), format_number(x.coords[2]),
                   format_number(field.values[k][f]), names[field.provenance[k][f]]});
        }
}

}  // namespace hmvp
