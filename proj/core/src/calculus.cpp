#include "hmvp/calculus.hpp"

#include <cmath>

namespace hmvp {

Eigen::VectorXd frame_vector(int i, const HPoint& x) {
  const int n = x.n;
  if (i < 1 || i > 2 * n + 1) throw std::invalid_argument("frame_vector: index out of range");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n + 1);
  if (i == 2 * n + 1) {
    c[2 * n] = 1.0;  // T
  } else if (i <= n) {
    c[i - 1] = 1.0;
    c[2 * n] = 2.0 * x.coords[n + i - 1];
  } else {
    c[i - 1] = 1.0;
    c[2 * n] = -2.0 * x.coords[i - n - 1];
  }
  return c;
}

double default_fd_step(const HPoint& x) { return 1e-4 * (1.0 + gauge(x)); }

HorizontalJet assemble_jet(int n, const HPoint& x, double value, double dt,
                           const Eigen::VectorXd& euclid_grad,
                           const Eigen::MatrixXd& euclid_hess) {
  // Frame coefficient matrix C (2n rows, 2n+1 columns).  The first-order
  // correction terms from differentiating the coefficients cancel exactly
  // under symmetrization, so hess = C D^2 C^T.
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * n, 2 * n + 1);
  for (int i = 0; i < n; ++i) {
    C(i, i) = 1.0;
    C(i, 2 * n) = 2.0 * x.coords[n + i];
    C(n + i, n + i) = 1.0;
    C(n + i, 2 * n) = -2.0 * x.coords[i];
  }
  HorizontalJet j;
  j.value = value;
  j.dt = dt;
  j.grad0 = C * euclid_grad;
  j.vert = euclid_grad[2 * n];
  Eigen::MatrixXd H = C * euclid_hess * C.transpose();
  j.hess = 0.5 * (H + H.transpose());
  return j;
}

HorizontalJet jet(const ScalarField& field, double t, const HPoint& x, double h) {
  if (field.has_analytic_jet()) return field.analytic_jet(t, x);
  if (!(h > 0.0)) throw std::invalid_argument("jet: step must be positive");
  const int n = field.n;
  const int d = 2 * n + 1;

  auto f = [&](const Eigen::VectorXd& c) { return field.evaluator(t, HPoint(n, c)); };
  const Eigen::VectorXd& c0 = x.coords;
  const double f0 = f(c0);

  Eigen::VectorXd grad(d);
  Eigen::MatrixXd hess(d, d);
  std::vector<double> fp(d), fm(d);
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd cp = c0, cm = c0;
    cp[k] += h;
    cm[k] -= h;
    fp[k] = f(cp);
    fm[k] = f(cm);
    grad[k] = (fp[k] - fm[k]) / (2.0 * h);
    hess(k, k) = (fp[k] - 2.0 * f0 + fm[k]) / (h * h);
  }
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      Eigen::VectorXd cpp = c0, cpm = c0, cmp = c0, cmm = c0;
      cpp[k] += h; cpp[l] += h;
      cpm[k] += h; cpm[l] -= h;
      cmp[k] -= h; cmp[l] += h;
      cmm[k] -= h; cmm[l] -= h;
      const double v = (f(cpp) - f(cpm) - f(cmp) + f(cmm)) / (4.0 * h * h);
      hess(k, l) = v;
      hess(l, k) = v;
    }
  }
  const double dt = (field.evaluator(t + h, x) - field.evaluator(t - h, x)) / (2.0 * h);
  return assemble_jet(n, x, f0, dt, grad, hess);
}

HorizontalJet jet(const ScalarField& field, double t, const HPoint& x) {
  return jet(field, t, x, default_fd_step(x));
}

double gradient_threshold(const HorizontalJet& j) {
  return 1e-9 * (1.0 + j.hess.norm());
}

double delta_H(const HorizontalJet& j) { return j.hess.trace(); }

double delta_H_inf(const HorizontalJet& j) {
  const double g = j.grad0.norm();
  if (g <= gradient_threshold(j)) throw degenerate_gradient_error();
  const Eigen::VectorXd u = j.grad0 / g;
  return u.dot(j.hess * u);
}

double p_laplacian_normalized(const HorizontalJet& j, const PExponent& p) {
  if (p.is_infinite()) return delta_H_inf(j);
  const double pv = p.value();
  if (pv == 2.0) return delta_H(j);
  return (pv - 2.0) * delta_H_inf(j) + delta_H(j);
}

}  // namespace hmvp
