#include "mgl/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mgl/util.hpp"

namespace mgl {

GridDomain GridDomain::unit_square(int nx, int ny) {
  GridDomain d;
  d.nx = nx;
  d.ny = ny;
  d.hx = 1.0 / (nx - 1);
  d.hy = 1.0 / (ny - 1);
  d.validate();
  return d;
}

void GridDomain::validate() const {
  if (nx < 3 || ny < 3) throw std::invalid_argument("grid needs at least 3 x 3 nodes");
  if (!(hx > 0.0) || !(hy > 0.0)) throw std::invalid_argument("grid spacings must be positive");
  if (!mask.empty() && mask.size() != size())
    throw std::invalid_argument("mask size does not match grid");
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!active(i, j)) continue;
      for (int axis = 0; axis < 2; ++axis) {
        const int di = axis == 0 ? 1 : 0, dj = axis == 0 ? 0 : 1;
        if (!active(i + di, j + dj) && !active(i - di, j - dj))
          throw std::invalid_argument("active node without a neighbour along an axis");
      }
    }
  }
}

bool GridDomain::active(int i, int j) const {
  if (!inside(i, j)) return false;
  return mask.empty() || mask[index(i, j)] != 0;
}

bool GridDomain::boundary(int i, int j) const {
  if (!active(i, j)) return false;
  return !active(i - 1, j) || !active(i + 1, j) || !active(i, j - 1) || !active(i, j + 1);
}

std::vector<double> GridDomain::quadrature_weights() const {
  std::vector<double> w(size(), 0.0);
  const double quarter = 0.25 * hx * hy;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      if (!(active(i, j) && active(i + 1, j) && active(i, j + 1) && active(i + 1, j + 1)))
        continue;
      w[index(i, j)] += quarter;
      w[index(i + 1, j)] += quarter;
      w[index(i, j + 1)] += quarter;
      w[index(i + 1, j + 1)] += quarter;
    }
  }
  return w;
}

double GridDomain::area() const {
  const auto w = quadrature_weights();
  return pairwise_sum(w);
}

AxisStencil axis_stencil(const GridDomain& d, int i, int j, int axis) {
  const int di = axis == 0 ? 1 : 0, dj = axis == 0 ? 0 : 1;
  const double h = d.spacing(axis);
  auto on = [&](int k) { return d.active(i + k * di, j + k * dj); };
  AxisStencil s;
  if (on(-1) && on(1)) {
    s.offsets = {-1, 1, 0};
    s.weights = {-0.5 / h, 0.5 / h, 0.0};
    s.count = 2;
  } else if (on(1) && on(2)) {
    s.offsets = {0, 1, 2};
    s.weights = {-1.5 / h, 2.0 / h, -0.5 / h};
    s.count = 3;
  } else if (on(-1) && on(-2)) {
    s.offsets = {0, -1, -2};
    s.weights = {1.5 / h, -2.0 / h, 0.5 / h};
    s.count = 3;
  } else if (on(1)) {
    s.offsets = {0, 1, 0};
    s.weights = {-1.0 / h, 1.0 / h, 0.0};
    s.count = 2;
  } else if (on(-1)) {
    s.offsets = {0, -1, 0};
    s.weights = {1.0 / h, -1.0 / h, 0.0};
    s.count = 2;
  } else {
    throw std::invalid_argument("node has no active neighbour along axis");
  }
  return s;
}

GridMap::GridMap(GridDomain d, ManifoldSpec t) : domain(std::move(d)), target(t) {
  domain.validate();
  target.validate();
  values.assign(domain.size(), ModelManifold(target).origin());
}

GridMap GridMap::from_function(const GridDomain& d, const ManifoldSpec& t,
                               const std::function<Point(double, double)>& f) {
  GridMap g(d, t);
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i) {
      if (d.active(i, j)) g.at(i, j) = f(d.x(i), d.y(j));
    }
  }
  g.validate();
  return g;
}

void GridMap::validate() const {
  domain.validate();
  target.validate();
  if (values.size() != domain.size()) throw std::invalid_argument("map value count mismatch");
  const ModelManifold mf(target);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!domain.active(domain.col(k), domain.row(k))) continue;
    const Point& p = values[k];
    if (p.size() != mf.ambient_dim()) throw std::invalid_argument("map value has wrong length");
    if (!p.allFinite()) throw std::invalid_argument("map value is not finite");
    if (mf.hyperbolic() &&
        (p[0] <= 0.0 || mf.constraint_residual(p) > kConstraintTol * std::max(1.0, p[0] * p[0])))
      throw std::invalid_argument("map value violates the hyperboloid constraint");
  }
}

Vec axis_derivative(const ModelManifold& mf, const GridMap& f, int i, int j, int axis) {
  if (!f.domain.active(i, j)) throw std::invalid_argument("jacobian at inactive node");
  const AxisStencil s = axis_stencil(f.domain, i, j, axis);
  const int di = axis == 0 ? 1 : 0, dj = axis == 0 ? 0 : 1;
  const Point& c = f.at(i, j);
  Vec out = Vec::Zero(c.size());
  for (int k = 0; k < s.count; ++k) {
    if (s.offsets[k] == 0) continue;
    out += s.weights[k] * mf.log_map(c, f.at(i + s.offsets[k] * di, j + s.offsets[k] * dj));
  }
  return out;
}

NodeJacobian jacobian(const ModelManifold& mf, const GridMap& f, int i, int j) {
  NodeJacobian nj;
  nj.frame = mf.orthonormal_frame(f.at(i, j));
  nj.matrix.resize(mf.dim(), kSourceDim);
  for (int axis = 0; axis < kSourceDim; ++axis)
    nj.matrix.col(axis) = mf.to_frame(nj.frame, axis_derivative(mf, f, i, j, axis));
  return nj;
}

NodeJacobian jacobian(const GridMap& f, int i, int j) {
  return jacobian(ModelManifold(f.target), f, i, j);
}

std::vector<NodeJacobian> jacobian_field(const GridMap& f) {
  const ModelManifold mf(f.target);
  std::vector<NodeJacobian> out(f.domain.size());
  parallel_for(out.size(), [&](std::size_t k) {
    const int i = f.domain.col(k), j = f.domain.row(k);
    if (f.domain.active(i, j)) out[k] = jacobian(mf, f, i, j);
  });
  return out;
}

Spectrum spectrum_of(const Eigen::MatrixXd& j) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  std::vector<double> s(kSourceDim, 0.0);
  const auto& sv = svd.singularValues();
  for (int k = 0; k < sv.size() && k < kSourceDim; ++k) s[k] = sv[k];
  return Spectrum(std::move(s));
}

int rank_of(const Spectrum& s) {
  const double cut = kRankTol * std::max(1.0, s[0]);
  int r = 0;
  for (double v : s.values()) r += v > cut ? 1 : 0;
  return r;
}

Spectrum singular_spectrum(const GridMap& f, int i, int j) {
  return spectrum_of(jacobian(f, i, j).matrix);
}

Eigen::Matrix2d induced_metric(const Eigen::MatrixXd& j) {
  return Eigen::Matrix2d::Identity() + j.transpose() * j;
}

Eigen::Matrix2d induced_metric(const GridMap& f, int i, int j) {
  return induced_metric(jacobian(f, i, j).matrix);
}

Eigen::Matrix2d area_coefficient(const Eigen::MatrixXd& j) {
  const Eigen::Matrix2d g = induced_metric(j);
  const double det = g.determinant();
  Eigen::Matrix2d inv;
  inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
  return inv / std::sqrt(det);
}

double graph_volume(const GridDomain& d, const std::vector<NodeJacobian>& jac) {
  const auto w = d.quadrature_weights();
  std::vector<double> terms(d.size(), 0.0);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (w[k] == 0.0) continue;
    terms[k] = w[k] * std::sqrt(induced_metric(jac[k].matrix).determinant());
  }
  return pairwise_sum(terms);
}

double graph_volume(const GridMap& f) { return graph_volume(f.domain, jacobian_field(f)); }

RegionField region_field(const GridMap& f, const Region& region) {
  const auto jac = jacobian_field(f);
  RegionField field;
  field.verdicts.resize(f.domain.size());
  field.spectra.resize(f.domain.size(), SquaredSpectrum(std::vector<double>(kSourceDim, 0.0)));
  for (std::size_t k = 0; k < jac.size(); ++k) {
    if (!f.domain.active(f.domain.col(k), f.domain.row(k))) continue;
    field.spectra[k] = SquaredSpectrum::from_spectrum(spectrum_of(jac[k].matrix));
    const RegionVerdict v = region(field.spectra[k]);
    field.verdicts[k] = v;
    field.min_margin = std::min(field.min_margin, v.margin);
    if (!v.member) {
      field.all_member = false;
      ++field.non_members;
    }
  }
  return field;
}

namespace {

double nodal_derivative(const GridDomain& d, const std::vector<double>& u, int i, int j,
                        int axis) {
  const AxisStencil s = axis_stencil(d, i, j, axis);
  const int di = axis == 0 ? 1 : 0, dj = axis == 0 ? 0 : 1;
  double out = 0.0;
  for (int k = 0; k < s.count; ++k)
    out += s.weights[k] * u[d.index(i + s.offsets[k] * di, j + s.offsets[k] * dj)];
  return out;
}

}  // namespace

double divergence_at(const GridDomain& d, const std::vector<Eigen::Matrix2d>& a,
                     const std::vector<double>& u, int i, int j) {
  const std::size_t c = d.index(i, j);
  const std::size_t e = d.index(i + 1, j), w = d.index(i - 1, j);
  const std::size_t n = d.index(i, j + 1), s = d.index(i, j - 1);
  const double hx2 = d.hx * d.hx, hy2 = d.hy * d.hy;
  double out = 0.0;
  out += (0.5 * (a[c](0, 0) + a[e](0, 0)) * (u[e] - u[c]) -
          0.5 * (a[c](0, 0) + a[w](0, 0)) * (u[c] - u[w])) /
         hx2;
  out += (0.5 * (a[c](1, 1) + a[n](1, 1)) * (u[n] - u[c]) -
          0.5 * (a[c](1, 1) + a[s](1, 1)) * (u[c] - u[s])) /
         hy2;
  out += (a[e](0, 1) * nodal_derivative(d, u, i + 1, j, 1) -
          a[w](0, 1) * nodal_derivative(d, u, i - 1, j, 1)) /
         (2.0 * d.hx);
  out += (a[n](1, 0) * nodal_derivative(d, u, i, j + 1, 0) -
          a[s](1, 0) * nodal_derivative(d, u, i, j - 1, 0)) /
         (2.0 * d.hy);
  return out;
}

double divergence_center(const GridDomain& d, const std::vector<Eigen::Matrix2d>& a, int i,
                         int j) {
  const std::size_t c = d.index(i, j);
  const std::size_t e = d.index(i + 1, j), w = d.index(i - 1, j);
  const std::size_t n = d.index(i, j + 1), s = d.index(i, j - 1);
  return -(0.5 * (2.0 * a[c](0, 0) + a[e](0, 0) + a[w](0, 0))) / (d.hx * d.hx) -
         (0.5 * (2.0 * a[c](1, 1) + a[n](1, 1) + a[s](1, 1))) / (d.hy * d.hy);
}

std::vector<Eigen::Matrix2d> area_coefficient_field(const GridMap& f) {
  const auto jac = jacobian_field(f);
  std::vector<Eigen::Matrix2d> a(f.domain.size(), Eigen::Matrix2d::Identity());
  for (std::size_t k = 0; k < jac.size(); ++k) {
    if (jac[k].matrix.size() > 0) a[k] = area_coefficient(jac[k].matrix);
  }
  return a;
}

std::vector<double> ms_residual(const GridMap& f) {
  if (f.target.kind != ManifoldKind::Euclidean)
    throw std::invalid_argument("ms_residual requires a euclidean target");
  const auto a = area_coefficient_field(f);
  const GridDomain& d = f.domain;
  const int n = f.target.dim;
  std::vector<double> res(d.size(), 0.0);
  std::vector<double> u(d.size(), 0.0);
  for (int alpha = 0; alpha < n; ++alpha) {
    for (std::size_t k = 0; k < d.size(); ++k) u[k] = f.values[k][alpha];
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        if (!d.interior(i, j)) continue;
        const double r = divergence_at(d, a, u, i, j);
        res[d.index(i, j)] += r * r;
      }
    }
  }
  for (auto& r : res) r = std::sqrt(r);
  return res;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_distance(const GridMap& a, const GridMap& b) {
  if (!(a.domain == b.domain) || !(a.target == b.target))
    throw std::invalid_argument("sup_distance: maps live on different grids or targets");
  const ModelManifold mf(a.target);
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    if (!a.domain.active(a.domain.col(k), a.domain.row(k))) continue;
    m = std::max(m, mf.distance(a.values[k], b.values[k]));
  }
  return m;
}

double boundary_distance(const GridMap& a, const GridMap& b) {
  if (!(a.domain == b.domain) || !(a.target == b.target))
    throw std::invalid_argument("boundary_distance: maps live on different grids or targets");
  const ModelManifold mf(a.target);
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    if (!a.domain.boundary(a.domain.col(k), a.domain.row(k))) continue;
    m = std::max(m, mf.distance(a.values[k], b.values[k]));
  }
  return m;
}

}  // namespace mgl
