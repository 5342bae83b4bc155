#pragma once

// Independent reference computations for tests.  Nothing here calls the
// library routine it is used to check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Elementary symmetric polynomials e_0..e_m by the product recurrence.
inline std::vector<double> elementary_symmetric(const std::vector<double>& a) {
  std::vector<double> e(a.size() + 1, 0.0);
  e[0] = 1.0;
  for (double v : a)
    for (std::size_t k = a.size(); k >= 1; --k) e[k] += v * e[k - 1];
  return e;
}

/// prod(1 - a_i) + sum_i a_i prod_{j != i}(1 - a_j) expanded as
/// sum_k (-1)^k (1 - k) e_k.
inline double product_sum_via_symmetric(const std::vector<double>& a) {
  const auto e = elementary_symmetric(a);
  double q = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k)
    q += ((k % 2 == 0) ? 1.0 : -1.0) * (1.0 - static_cast<double>(k)) * e[k];
  return q;
}

/// Closed N membership margin from the definition, pairs enumerated.
inline double n_closure_margin(const std::vector<double>& a) {
  if (a.size() < 2) return INFINITY;
  double pair = -INFINITY;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) pair = std::max(pair, a[i] * a[j]);
  return std::min(1.0 - pair, product_sum_via_symmetric(a));
}

/// Squared singular values of a 2-column matrix from the eigenvalues of
/// J^T J in closed form, descending.
inline std::vector<double> squared_singular_values_2col(const Eigen::MatrixXd& j) {
  const Eigen::Matrix2d g = j.transpose() * j;
  const double tr = g.trace(), det = g.determinant();
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return {tr / 2.0 + disc, std::max(0.0, tr / 2.0 - disc)};
}

/// Hyperboloid distance from the Poincare ball images of p and q,
/// d = acosh(1 + 2|u - w|^2 / ((1 - |u|^2)(1 - |w|^2))) written through
/// asinh to stay accurate for nearby points.  Curvature -kappa.
inline double hyperbolic_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                  double kappa) {
  const double s = std::sqrt(kappa);
  auto ball = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x.tail(x.size() - 1) * s;
    return Eigen::VectorXd(y / (1.0 + s * x[0]));
  };
  const Eigen::VectorXd u = ball(p), w = ball(q);
  const double den = (1.0 - u.squaredNorm()) * (1.0 - w.squaredNorm());
  return 2.0 * std::asinh((u - w).norm() / std::sqrt(den)) / s;
}

inline double minkowski(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  double s = -u[0] * v[0];
  for (Eigen::Index i = 1; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

/// exp on the hyperboloid by the textbook cosh/sinh formula.
inline Eigen::VectorXd hyperbolic_exp(const Eigen::VectorXd& p, const Eigen::VectorXd& v,
                                      double kappa) {
  const double n = std::sqrt(std::max(0.0, minkowski(v, v)));
  if (n == 0.0) return p;
  const double s = std::sqrt(kappa) * n;
  return std::cosh(s) * p + std::sinh(s) / s * v;
}

/// Weak majorization of y by x in two dimensions written out by hand.
inline bool weakly_majorized_2d(double y1, double y2, double x1, double x2, double tol) {
  const double ym = std::max(y1, y2), xm = std::max(x1, x2);
  return ym <= xm + tol && y1 + y2 <= x1 + x2 + tol;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace oracle
