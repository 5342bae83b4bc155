#pragma once

// Target spaces: Euclidean R^n and hyperbolic space of constant curvature
// -kappa in the hyperboloid model {x in R^{n+1} : <x,x>_L = -1/kappa, x_0 > 0}
// with the Minkowski form <u,v>_L = -u_0 v_0 + sum_i u_i v_i.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mgl {

using Point = Eigen::VectorXd;
using Vec = Eigen::VectorXd;

inline constexpr double kConstraintTol = 1e-10;

enum class ManifoldKind { Euclidean, Hyperbolic };

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Euclidean;
  int dim = 1;
  /// Sectional curvature: 0 for euclidean, -kappa for hyperbolic.
  double curvature = 0.0;

  static ManifoldSpec euclidean(int n);
  static ManifoldSpec hyperbolic(int n, double kappa = 1.0);
  /// "euclidean:n" or "hyperbolic:n:kappa" (kappa defaults to 1).
  static ManifoldSpec parse(const std::string& text);
  std::string to_string() const;

  void validate() const;
  double kappa() const { return -curvature; }
  int ambient_dim() const { return kind == ManifoldKind::Hyperbolic ? dim + 1 : dim; }
  bool operator==(const ManifoldSpec&) const = default;
};

struct TangentVec {
  Point base;
  Vec components;
};

/// Closed-form Riemannian primitives for a ManifoldSpec.
class ModelManifold {
 public:
  explicit ModelManifold(ManifoldSpec spec);

  const ManifoldSpec& spec() const { return spec_; }
  bool hyperbolic() const { return spec_.kind == ManifoldKind::Hyperbolic; }
  int dim() const { return spec_.dim; }
  int ambient_dim() const { return spec_.ambient_dim(); }

  /// Metric on tangent vectors (Minkowski form restricted to tangent spaces).
  double inner(const Vec& u, const Vec& v) const;
  double norm(const Vec& v) const;

  Point origin() const;
  /// Point whose spatial coordinates are the given n-vector.
  Point lift(const Vec& spatial) const;
  /// Re-projection onto the hyperboloid (identity for euclidean).
  Point project_point(const Point& x) const;
  Vec project_tangent(const Point& p, const Vec& v) const;
  /// Constraint residual |<x,x>_L + 1/kappa| (0 for euclidean).
  double constraint_residual(const Point& x) const;
  /// Residual |<p,v>_L| of the tangency condition.
  double tangency_residual(const Point& p, const Vec& v) const;

  double distance(const Point& p, const Point& q) const;
  Point exp_map(const Point& p, const Vec& v) const;
  Point exp_map(const TangentVec& v) const { return exp_map(v.base, v.components); }
  /// Throws std::invalid_argument when v is not based at p.
  Point exp_map(const Point& p, const TangentVec& v) const;
  Vec log_map(const Point& p, const Point& q) const;
  TangentVec log_tangent(const Point& p, const Point& q) const { return {p, log_map(p, q)}; }
  Point geodesic_point(const Point& p, const Point& q, double t) const;
  /// Velocity of the constant-speed geodesic p -> q at time t.
  Vec geodesic_velocity(const Point& p, const Point& q, double t) const;
  /// Parallel transport of v (at p) along the geodesic p -> q.
  Vec parallel_transport(const Point& p, const Point& q, const Vec& v) const;
  TangentVec parallel_transport(const TangentVec& v, const Point& q) const;

  /// <R(X,V)X,V> with R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y];
  /// equals kappa (|X|^2 |V|^2 - <X,V>^2) for curvature -kappa.
  double curvature_quadratic(const Point& p, const Vec& x, const Vec& v) const;

  /// Orthonormal frame at p: the standard frame at the origin transported
  /// to p, then re-orthonormalized.  Columns are ambient vectors.
  Eigen::MatrixXd orthonormal_frame(const Point& p) const;
  std::vector<TangentVec> orthonormal_frame_vectors(const Point& p) const;

  /// Frame coordinates of a tangent vector at p and back.
  Eigen::VectorXd to_frame(const Eigen::MatrixXd& frame, const Vec& v) const;
  Vec from_frame(const Eigen::MatrixXd& frame, const Eigen::VectorXd& c) const;

 private:
  ManifoldSpec spec_;
  double kappa_ = 0.0;
  double sqrt_kappa_ = 0.0;
};

/// sinh(x)/x with a series guard near zero.
double sinhc(double x);

}  // namespace mgl
