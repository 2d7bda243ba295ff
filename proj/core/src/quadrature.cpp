#include "hmvp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hmvp/parallel.hpp"

namespace hmvp {

namespace {
constexpr double kPi = std::numbers::pi;

double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i >= 2; i -= 2) r *= i;
  return r;
}
}  // namespace

void gauss_legendre(int count, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (count < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  nodes.resize(count);
  weights.resize(count);
  const int m = (count + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_count.
    double z = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = count * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    nodes[i] = xm - xl * z;
    nodes[count - 1 - i] = xm + xl * z;
    weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    weights[count - 1 - i] = weights[i];
  }
}

std::size_t QuadratureRule::node_count() const {
  std::size_t total = 1;
  for (const auto& axis : axis_nodes) total *= axis.size();
  return total;
}

std::vector<int> default_resolution(int n) {
  switch (n) {
    case 1:
      return {24, 24, 24};
    case 2:
      return {8, 14, 12, 12, 10};
    case 3:
      return {6, 12, 10, 10, 10, 10, 8};
    default: {
      std::vector<int> r = {6, 12};
      for (int j = 0; j < 2 * n - 2; ++j) r.push_back(8);
      r.push_back(8);
      return r;
    }
  }
}

QuadratureRule build_rule(int n, double epsilon, const std::vector<int>& resolution) {
  if (n < 1) throw std::invalid_argument("build_rule: group index must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_rule: radius must be positive");
  const int axes = 2 + (2 * n - 1);
  if (static_cast<int>(resolution.size()) != axes)
    throw std::invalid_argument("build_rule: resolution needs 2n+1 counts (rho, phi, thetas)");
  for (int c : resolution)
    if (c < 2) throw std::invalid_argument("build_rule: every resolution count must be >= 2");

  QuadratureRule rule;
  rule.n = n;
  rule.epsilon = epsilon;
  rule.resolution = resolution;
  rule.axis_nodes.resize(axes);
  rule.axis_weights.resize(axes);

  // The volume element factorizes, so each axis table absorbs its own
  // Jacobian factor; a node weight is then just the product over axes.
  gauss_legendre(resolution[0], 0.0, epsilon, rule.axis_nodes[0], rule.axis_weights[0]);
  for (int i = 0; i < resolution[0]; ++i)
    rule.axis_weights[0][i] *= std::pow(rule.axis_nodes[0][i], 2 * n + 1);

  gauss_legendre(resolution[1], 0.0, kPi, rule.axis_nodes[1], rule.axis_weights[1]);
  for (int i = 0; i < resolution[1]; ++i)
    rule.axis_weights[1][i] *= std::pow(std::sin(rule.axis_nodes[1][i]), n - 1);

  for (int j = 0; j < 2 * n - 2; ++j) {
    const int axis = 2 + j;
    gauss_legendre(resolution[axis], 0.0, kPi, rule.axis_nodes[axis], rule.axis_weights[axis]);
    for (int i = 0; i < resolution[axis]; ++i)
      rule.axis_weights[axis][i] *= std::pow(std::sin(rule.axis_nodes[axis][i]), 2 * n - 2 - j);
  }

  // Periodic axis: uniform nodes are spectrally accurate on [0, 2pi).
  const int last = axes - 1;
  const int m = resolution[last];
  rule.axis_nodes[last].resize(m);
  rule.axis_weights[last].assign(m, 2.0 * kPi / m);
  for (int i = 0; i < m; ++i) rule.axis_nodes[last][i] = 2.0 * kPi * i / m;

  return rule;
}

QuadratureRule build_rule(int n, double epsilon) {
  return build_rule(n, epsilon, default_resolution(n));
}

Eigen::VectorXd integrate(const QuadratureRule& rule, int m,
                          const std::function<void(const double*, double, double*)>& fn) {
  const int n = rule.n;
  const int axes = static_cast<int>(rule.axis_nodes.size());
  const std::size_t total = rule.node_count();
  const std::size_t chunks = chunk_count(total);
  std::vector<Eigen::VectorXd> partials(chunks, Eigen::VectorXd::Zero(m));

  parallel_chunks(total, [&](std::size_t lo, std::size_t hi, std::size_t chunk) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
    std::vector<double> vals(m);
    double coords[7];   // 2n+1 <= 7 for n <= 3; larger n allocates below
    std::vector<double> big;
    double* out = coords;
    if (2 * n + 1 > 7) {
      big.resize(2 * n + 1);
      out = big.data();
    }
    std::vector<double> thetas(2 * n - 1);
    for (std::size_t idx = lo; idx < hi; ++idx) {
      // Mixed-radix decode, last axis fastest.
      std::size_t rest = idx;
      double w = 1.0;
      double rho = 0.0, phi = 0.0;
      for (int a = axes - 1; a >= 0; --a) {
        const std::size_t sz = rule.axis_nodes[a].size();
        const std::size_t k = rest % sz;
        rest /= sz;
        const double node = rule.axis_nodes[a][k];
        w *= rule.axis_weights[a][k];
        if (a == 0)
          rho = node;
        else if (a == 1)
          phi = node;
        else
          thetas[a - 2] = node;
      }
      polar_to_point_into(n, rho, phi, thetas.data(), out);
      fn(out, std::sin(phi), vals.data());
      for (int c = 0; c < m; ++c) acc[c] += w * vals[c];
    }
    partials[chunk] = acc;
  });

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
  for (const auto& p : partials) sum += p;
  return sum;
}

double psi_mass(const QuadratureRule& rule) {
  return integrate(rule, 1, [](const double*, double psi, double* out) { out[0] = psi; })[0];
}

double ball_volume(const QuadratureRule& rule) {
  return integrate(rule, 1, [](const double*, double, double* out) { out[0] = 1.0; })[0];
}

double weighted_ball_average(const std::function<double(const HPoint&)>& f, const HPoint& center,
                             const QuadratureRule& rule) {
  if (center.n != rule.n) throw std::invalid_argument("weighted_ball_average: group mismatch");
  const int n = rule.n;
  Eigen::Vector2d r = integrate(rule, 2, [&](const double* offset, double psi, double* out) {
    HPoint y = HPoint::origin(n);
    group_mul_into(n, center.coords.data(), offset, y.coords.data());
    out[0] = psi * f(y);
    out[1] = psi;
  });
  return r[0] / r[1];
}

double M_constant(int n) {
  if (n < 1) throw std::invalid_argument("M_constant: group index must be >= 1");
  const double shape = double_factorial(n) * double_factorial(n) /
                       (double_factorial(n + 1) * double_factorial(n - 1));
  const double parity = (n % 2 == 1) ? kPi / 2.0 : 2.0 / kPi;
  return (2.0 * n + 2.0) / (2.0 * n + 4.0) * shape * parity / (2.0 * n);
}

MomentReport moment_check(int n, double epsilon, const QuadratureRule& rule) {
  if (rule.n != n || rule.epsilon != epsilon)
    throw std::invalid_argument("moment_check: rule does not match (n, epsilon)");
  const int d = 2 * n;
  // Layout: [mass, y_1..y_2n, y_{2n+1}, y_i y_j pairs, y_1^2..y_2n^2]
  const int pairs = d * (d - 1) / 2;
  const int m = 1 + d + 1 + pairs + d;
  Eigen::VectorXd r = integrate(rule, m, [&](const double* y, double psi, double* out) {
    int c = 0;
    out[c++] = psi;
    for (int i = 0; i < d; ++i) out[c++] = psi * y[i];
    out[c++] = psi * y[d];
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) out[c++] = psi * y[i] * y[j];
    for (int i = 0; i < d; ++i) out[c++] = psi * y[i] * y[i];
  });

  const double mass = r[0];
  MomentReport rep;
  rep.n = n;
  rep.epsilon = epsilon;
  int c = 1;
  for (int i = 0; i < d; ++i) rep.odd_moments = std::max(rep.odd_moments, std::abs(r[c++] / mass));
  rep.odd_moments /= epsilon;
  rep.vertical_moment = std::abs(r[c++] / mass) / (epsilon * epsilon);
  for (int k = 0; k < pairs; ++k)
    rep.cross_moments = std::max(rep.cross_moments, std::abs(r[c++] / mass));
  rep.cross_moments /= epsilon * epsilon;
  rep.diagonal_moments.resize(d);
  double diag_sum = 0.0;
  for (int i = 0; i < d; ++i) {
    rep.diagonal_moments[i] = r[c++] / mass;
    diag_sum += rep.diagonal_moments[i];
  }
  rep.M_estimate = diag_sum / d / (epsilon * epsilon);
  return rep;
}

namespace {

struct PolarParam {
  double rho;
  double phi;
  std::vector<double> thetas;  // 2n-1
};

double eval_at(const std::function<double(const HPoint&)>& f, const HPoint& center,
               const PolarParam& q, int n) {
  HPoint offset = HPoint::origin(n);
  polar_to_point_into(n, q.rho, q.phi, q.thetas.data(), offset.coords.data());
  HPoint y = HPoint::origin(n);
  group_mul_into(n, center.coords.data(), offset.coords.data(), y.coords.data());
  return f(y);
}

std::pair<HPoint, double> ball_max(const std::function<double(const HPoint&)>& f,
                                   const HPoint& center, double epsilon,
                                   const SearchConfig& search) {
  const int n = center.n;
  const int na = 2 * n - 1;

  // Coarse scan over the closed ball (rho and phi include their endpoints).
  PolarParam best;
  best.thetas.assign(na, 0.0);
  double best_val = -std::numeric_limits<double>::infinity();
  PolarParam q;
  q.thetas.assign(na, 0.0);
  std::vector<int> counts;
  counts.push_back(search.rho_samples);
  counts.push_back(search.phi_samples);
  for (int j = 0; j < na; ++j) counts.push_back(search.theta_samples);
  std::vector<int> idx(counts.size(), 0);
  for (;;) {
    q.rho = epsilon * idx[0] / (counts[0] - 1);
    q.phi = kPi * idx[1] / (counts[1] - 1);
    for (int j = 0; j < na - 1; ++j) q.thetas[j] = kPi * idx[2 + j] / (counts[2 + j] - 1);
    q.thetas[na - 1] = 2.0 * kPi * idx[1 + na] / counts[1 + na];  // periodic, no endpoint
    const double v = eval_at(f, center, q, n);
    if (v > best_val) {
      best_val = v;
      best = q;
    }
    int a = static_cast<int>(counts.size()) - 1;
    while (a >= 0 && ++idx[a] == counts[a]) idx[a--] = 0;
    if (a < 0) break;
  }

  // Compass refinement in polar parameters with clamped/wrapped coordinates.
  std::vector<double> step;
  step.push_back(epsilon / (counts[0] - 1));
  step.push_back(kPi / (counts[1] - 1));
  for (int j = 0; j < na - 1; ++j) step.push_back(kPi / (counts[2 + j] - 1));
  step.push_back(kPi / counts[1 + na]);

  auto coord_ref = [&](PolarParam& p, int a) -> double& {
    if (a == 0) return p.rho;
    if (a == 1) return p.phi;
    return p.thetas[a - 2];
  };
  auto clamp_coord = [&](double v, int a) {
    if (a == 0) return std::clamp(v, 0.0, epsilon);
    if (a == 1) return std::clamp(v, 0.0, kPi);
    if (a - 2 < na - 1) return std::clamp(v, 0.0, kPi);
    double w = std::fmod(v, 2.0 * kPi);
    if (w < 0) w += 2.0 * kPi;
    return w;
  };

  const int dims = 2 + na;
  for (int it = 0; it < search.max_iters; ++it) {
    bool improved = false;
    for (int a = 0; a < dims; ++a) {
      for (int sgn : {+1, -1}) {
        PolarParam trial = best;
        coord_ref(trial, a) = clamp_coord(coord_ref(trial, a) + sgn * step[a], a);
        const double v = eval_at(f, center, trial, n);
        if (v > best_val) {
          best_val = v;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) {
      double max_rel = 0.0;
      for (int a = 0; a < dims; ++a) {
        step[a] *= 0.5;
        max_rel = std::max(max_rel, a == 0 ? step[a] / epsilon : step[a]);
      }
      if (max_rel < search.tol) break;
    }
  }

  HPoint offset = HPoint::origin(n);
  polar_to_point_into(n, best.rho, best.phi, best.thetas.data(), offset.coords.data());
  return {group_mul(center, offset), best_val};
}

}  // namespace

std::pair<HPoint, double> ball_extremum(const std::function<double(const HPoint&)>& f,
                                        const HPoint& center, double epsilon, ExtremumMode mode,
                                        const SearchConfig& search) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ball_extremum: radius must be positive");
  if (mode == ExtremumMode::Max) return ball_max(f, center, epsilon, search);
  auto neg = [&](const HPoint& x) { return -f(x); };
  auto [pt, val] = ball_max(neg, center, epsilon, search);
  return {pt, -val};
}

std::vector<std::pair<double, Eigen::VectorXd>> extremal_direction_estimate(
    const ScalarField& f, double t, const HPoint& center, const std::vector<double>& eps_ladder,
    const SearchConfig& search) {
  HorizontalJet j0 = jet(f, t, center);
  if (j0.grad0.norm() <= gradient_threshold(j0)) throw degenerate_gradient_error();

  std::vector<std::pair<double, Eigen::VectorXd>> out;
  out.reserve(eps_ladder.size());
  auto slice = [&](const HPoint& x) { return f(t, x); };
  for (double eps : eps_ladder) {
    auto [xmin, vmin] = ball_extremum(slice, center, eps, ExtremumMode::Min, search);
    (void)vmin;
    const HPoint offset = group_mul(group_inv(center), xmin);
    Eigen::VectorXd dir = offset.horizontal() / eps;
    const double norm = dir.norm();
    if (norm > 0) dir /= norm;
    out.emplace_back(eps, dir);
  }
  return out;
}

}  // namespace hmvp
