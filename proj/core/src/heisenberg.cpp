#include "hmvp/heisenberg.hpp"

#include <cmath>

namespace hmvp {

void group_mul_into(int n, const double* a, const double* b, double* out) {
  double twist = 0.0;
  for (int i = 0; i < n; ++i) twist += b[i] * a[n + i] - a[i] * b[n + i];
  const double vert = b[2 * n] + a[2 * n] + 2.0 * twist;
  for (int i = 0; i < 2 * n; ++i) out[i] = a[i] + b[i];
  out[2 * n] = vert;
}

double gauge_raw(int n, const double* x) {
  double h2 = 0.0;
  for (int i = 0; i < 2 * n; ++i) h2 += x[i] * x[i];
  return std::pow(h2 * h2 + x[2 * n] * x[2 * n], 0.25);
}

double psi_raw(int n, const double* x) {
  double h2 = 0.0;
  for (int i = 0; i < 2 * n; ++i) h2 += x[i] * x[i];
  const double q = h2 * h2 + x[2 * n] * x[2 * n];
  if (q == 0.0) return 0.0;  // direction-dependent limit; the origin is a null set
  return h2 / std::sqrt(q);
}

HPoint group_mul(const HPoint& a, const HPoint& b) {
  if (a.n != b.n) throw std::invalid_argument("group_mul: group index mismatch");
  HPoint out = HPoint::origin(a.n);
  group_mul_into(a.n, a.coords.data(), b.coords.data(), out.coords.data());
  return out;
}

HPoint group_inv(const HPoint& a) { return HPoint(a.n, -a.coords); }

HPoint dilate(double lambda, const HPoint& a) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
  HPoint out = a;
  out.coords.head(2 * a.n) *= lambda;
  out.coords[2 * a.n] *= lambda * lambda;
  return out;
}

double gauge(const HPoint& a) { return gauge_raw(a.n, a.coords.data()); }

double left_distance(const HPoint& a, const HPoint& b) {
  if (a.n != b.n) throw std::invalid_argument("left_distance: group index mismatch");
  const int n = a.n;
  Eigen::VectorXd tmp(2 * n + 1);
  const Eigen::VectorXd ainv = -a.coords;
  group_mul_into(n, ainv.data(), b.coords.data(), tmp.data());
  return gauge_raw(n, tmp.data());
}

double psi(const HPoint& a) { return psi_raw(a.n, a.coords.data()); }

void polar_to_point_into(int n, double rho, double phi, const double* thetas, double* out) {
  const double rs = rho * std::sqrt(std::sin(phi));
  // v_k = rs sinθ_1···sinθ_{k-1} cosθ_k carries coordinate coord_for_k(k);
  // the all-sines product is x_1.  Coordinate order by descending k:
  // x_{n+1}, x_2, x_{n+2}, x_3, ..., x_n, x_{2n}.
  double prod = rs;
  for (int k = 1; k <= 2 * n - 1; ++k) {
    const int j = (2 * n - 1) - k;  // position in the descending list
    int coord;
    if (j == 0)
      coord = n + 1;
    else if (j % 2 == 1)
      coord = 1 + (j + 1) / 2;
    else
      coord = n + 1 + j / 2;
    out[coord - 1] = prod * std::cos(thetas[k - 1]);
    prod *= std::sin(thetas[k - 1]);
  }
  out[0] = prod;
  out[2 * n] = rho * rho * std::cos(phi);
}

HPoint polar_to_point(const PolarCoord& p, int n) {
  if (static_cast<int>(p.thetas.size()) != 2 * n - 1)
    throw std::invalid_argument("polar_to_point: need 2n-1 angles");
  HPoint out = HPoint::origin(n);
  polar_to_point_into(n, p.rho, p.phi, p.thetas.data(), out.coords.data());
  return out;
}

double polar_jacobian(const PolarCoord& p, int n) {
  if (static_cast<int>(p.thetas.size()) != 2 * n - 1)
    throw std::invalid_argument("polar_jacobian: need 2n-1 angles");
  double jac = std::pow(p.rho, 2 * n + 1) * std::pow(std::sin(p.phi), n - 1);
  for (int j = 0; j < 2 * n - 2; ++j)
    jac *= std::pow(std::sin(p.thetas[j]), 2 * n - 2 - j);
  return jac;
}

}  // namespace hmvp
