#include "mgl/manifold.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mgl {

namespace {

constexpr double kSmallAngle = 1e-8;

// cosh(x) - 1 without cancellation.
double coshm1(double x) {
  const double s = std::sinh(0.5 * x);
  return 2.0 * s * s;
}

void require_same_base(const Point& a, const Point& b) {
  if (a.size() != b.size() || (a - b).lpNorm<Eigen::Infinity>() > 0.0)
    throw std::invalid_argument("tangent vector is not based at the given point");
}

}  // namespace

double sinhc(double x) {
  if (std::abs(x) < kSmallAngle) return 1.0 + x * x / 6.0;
  return std::sinh(x) / x;
}

ManifoldSpec ManifoldSpec::euclidean(int n) {
  ManifoldSpec s{ManifoldKind::Euclidean, n, 0.0};
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::hyperbolic(int n, double kappa) {
  ManifoldSpec s{ManifoldKind::Hyperbolic, n, -kappa};
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    return v;
  };
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
  };
  if (parts.size() == 2 && parts[0] == "euclidean") return euclidean(to_int(parts[1]));
  if ((parts.size() == 2 || parts.size() == 3) && parts[0] == "hyperbolic")
    return hyperbolic(to_int(parts[1]), parts.size() == 3 ? to_double(parts[2]) : 1.0);
  throw std::invalid_argument("target must be euclidean:n or hyperbolic:n:kappa, got '" + text +
                              "'");
}

std::string ManifoldSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == ManifoldKind::Euclidean) {
    os << "euclidean:" << dim;
  } else {
    os << "hyperbolic:" << dim << ":" << kappa();
  }
  return os.str();
}

void ManifoldSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("manifold dimension must be >= 1");
  if (kind == ManifoldKind::Euclidean && curvature != 0.0)
    throw std::invalid_argument("euclidean target must have zero curvature");
  if (kind == ManifoldKind::Hyperbolic && !(curvature < 0.0))
    throw std::invalid_argument("hyperbolic target must have negative curvature");
}

ModelManifold::ModelManifold(ManifoldSpec spec) : spec_(spec) {
  spec_.validate();
  kappa_ = spec_.kappa();
  sqrt_kappa_ = std::sqrt(std::max(kappa_, 0.0));
}

double ModelManifold::inner(const Vec& u, const Vec& v) const {
  if (!hyperbolic()) return u.dot(v);
  return -u[0] * v[0] + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

double ModelManifold::norm(const Vec& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

Point ModelManifold::origin() const {
  Point o = Point::Zero(ambient_dim());
  if (hyperbolic()) o[0] = 1.0 / sqrt_kappa_;
  return o;
}

Point ModelManifold::lift(const Vec& spatial) const {
  if (spatial.size() != dim()) throw std::invalid_argument("lift: wrong dimension");
  if (!hyperbolic()) return spatial;
  Point x(ambient_dim());
  x[0] = std::sqrt(1.0 / kappa_ + spatial.squaredNorm());
  x.tail(dim()) = spatial;
  return x;
}

Point ModelManifold::project_point(const Point& x) const {
  if (!hyperbolic()) return x;
  Point y = x;
  y[0] = std::sqrt(1.0 / kappa_ + x.tail(dim()).squaredNorm());
  return y;
}

Vec ModelManifold::project_tangent(const Point& p, const Vec& v) const {
  if (!hyperbolic()) return v;
  return v + kappa_ * inner(p, v) * p;
}

double ModelManifold::constraint_residual(const Point& x) const {
  if (!hyperbolic()) return 0.0;
  return std::abs(inner(x, x) + 1.0 / kappa_);
}

double ModelManifold::tangency_residual(const Point& p, const Vec& v) const {
  if (!hyperbolic()) return 0.0;
  return std::abs(inner(p, v));
}

double ModelManifold::distance(const Point& p, const Point& q) const {
  const Vec w = q - p;
  if (!hyperbolic()) return w.norm();
  const double chord = norm(w);
  return 2.0 / sqrt_kappa_ * std::asinh(0.5 * sqrt_kappa_ * chord);
}

Point ModelManifold::exp_map(const Point& p, const Vec& v) const {
  if (p.size() != ambient_dim() || v.size() != ambient_dim())
    throw std::invalid_argument("exp_map: dimension mismatch");
  if (!hyperbolic()) return p + v;
  const double theta = sqrt_kappa_ * norm(v);
  return project_point(p + coshm1(theta) * p + sinhc(theta) * v);
}

Point ModelManifold::exp_map(const Point& p, const TangentVec& v) const {
  require_same_base(p, v.base);
  return exp_map(p, v.components);
}

Vec ModelManifold::log_map(const Point& p, const Point& q) const {
  if (p.size() != ambient_dim() || q.size() != ambient_dim())
    throw std::invalid_argument("log_map: dimension mismatch");
  const Vec w = q - p;
  if (!hyperbolic()) return w;
  const double theta = sqrt_kappa_ * distance(p, q);
  const Vec u = w - coshm1(theta) * p;
  return project_tangent(p, u / sinhc(theta));
}

Point ModelManifold::geodesic_point(const Point& p, const Point& q, double t) const {
  if (!hyperbolic()) return p + t * (q - p);
  return exp_map(p, t * log_map(p, q));
}

Vec ModelManifold::geodesic_velocity(const Point& p, const Point& q, double t) const {
  const Vec v = log_map(p, q);
  if (!hyperbolic()) return v;
  return parallel_transport(p, geodesic_point(p, q, t), v);
}

Vec ModelManifold::parallel_transport(const Point& p, const Point& q, const Vec& v) const {
  if (!hyperbolic()) return v;
  const double denom = 1.0 - kappa_ * inner(p, q);
  return project_tangent(q, v + (kappa_ * inner(q, v) / denom) * (p + q));
}

TangentVec ModelManifold::parallel_transport(const TangentVec& v, const Point& q) const {
  return {q, parallel_transport(v.base, q, v.components)};
}

double ModelManifold::curvature_quadratic(const Point& /*p*/, const Vec& x, const Vec& v) const {
  if (!hyperbolic()) return 0.0;
  const double xx = inner(x, x), vv = inner(v, v), xv = inner(x, v);
  return kappa_ * std::max(0.0, xx * vv - xv * xv);
}

Eigen::MatrixXd ModelManifold::orthonormal_frame(const Point& p) const {
  const int n = dim();
  if (!hyperbolic()) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd frame(ambient_dim(), n);
  const Point o = origin();
  const double denom = 1.0 + sqrt_kappa_ * p[0];
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(ambient_dim());
    e[i + 1] = 1.0;
    frame.col(i) = e + (kappa_ * p[i + 1] / denom) * (o + p);
  }
  // One Gram-Schmidt pass removes rounding drift from the transported frame.
  for (int i = 0; i < n; ++i) {
    Vec c = project_tangent(p, frame.col(i));
    for (int j = 0; j < i; ++j) c -= inner(frame.col(j), c) * frame.col(j);
    frame.col(i) = c / norm(c);
  }
  return frame;
}

std::vector<TangentVec> ModelManifold::orthonormal_frame_vectors(const Point& p) const {
  const Eigen::MatrixXd f = orthonormal_frame(p);
  std::vector<TangentVec> out;
  for (int i = 0; i < f.cols(); ++i) out.push_back({p, f.col(i)});
  return out;
}

Eigen::VectorXd ModelManifold::to_frame(const Eigen::MatrixXd& frame, const Vec& v) const {
  Eigen::VectorXd c(frame.cols());
  for (int a = 0; a < frame.cols(); ++a) c[a] = inner(frame.col(a), v);
  return c;
}

Vec ModelManifold::from_frame(const Eigen::MatrixXd& frame, const Eigen::VectorXd& c) const {
  return frame * c;
}

}  // namespace mgl
