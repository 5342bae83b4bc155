#include "mgl/samples.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mgl/util.hpp"

namespace mgl {

namespace {

constexpr double kPi = std::numbers::pi;

double sine_mode(int c, double x, double y) {
  switch (c) {
    case 0: return std::sin(kPi * x) * std::cos(kPi * y);
    case 1: return std::cos(kPi * x) * std::sin(kPi * y);
    default: return std::sin(kPi * x + c) * std::sin(kPi * y + 0.5 * c);
  }
}

}  // namespace

GridMap affine_map(const GridDomain& d, const ManifoldSpec& target, const Eigen::MatrixXd& a,
                   const Eigen::VectorXd& offset) {
  if (a.rows() != target.dim || a.cols() != kSourceDim || offset.size() != target.dim)
    throw std::invalid_argument("affine map: shape mismatch");
  const ModelManifold mf(target);
  return GridMap::from_function(d, target, [&](double x, double y) {
    return mf.lift(offset + a * Eigen::Vector2d(x, y));
  });
}

GridMap sine_map(const GridDomain& d, const ManifoldSpec& target, double amplitude) {
  const ModelManifold mf(target);
  const double lx = (d.nx - 1) * d.hx, ly = (d.ny - 1) * d.hy;
  return GridMap::from_function(d, target, [&](double x, double y) {
    Vec s(target.dim);
    for (int c = 0; c < target.dim; ++c) s[c] = amplitude * sine_mode(c, x / lx, y / ly);
    return mf.lift(s);
  });
}

BoundaryData demo_boundary(const std::string& name, const GridDomain& d,
                           const ManifoldSpec& target) {
  if (name == "affine") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(target.dim, kSourceDim);
    for (int r = 0; r < target.dim; ++r) {
      a(r, 0) = 0.3 / (r + 1);
      a(r, 1) = 0.2 * (r % 2 == 0 ? 1.0 : -1.0);
    }
    return BoundaryData::from_map(affine_map(d, target, a, Eigen::VectorXd::Zero(target.dim)));
  }
  if (name == "steep") return BoundaryData::from_map(sine_map(d, target, 0.8));
  if (name.rfind("sine", 0) == 0) {
    double amp = 0.3;
    if (name.size() > 4) {
      if (name[4] != ':') throw std::invalid_argument("demo must be sine[:amplitude]");
      std::size_t used = 0;
      const std::string rest = name.substr(5);
      try {
        amp = std::stod(rest, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != rest.size())
        throw std::invalid_argument("bad sine amplitude '" + rest + "'");
    }
    return BoundaryData::from_map(sine_map(d, target, amp));
  }
  throw std::invalid_argument("unknown demo '" + name + "' (affine, sine[:amp], steep)");
}

MapPair random_map_pair(const GridDomain& d, const ManifoldSpec& target, std::uint64_t seed,
                        double scale) {
  const ModelManifold mf(target);
  const int n = target.dim;
  Rng rng(seed);
  const double lx = (d.nx - 1) * d.hx, ly = (d.ny - 1) * d.hy;
  constexpr int kModes = 6;
  Eigen::MatrixXd base(n, kModes), bump(n, 4);
  for (int a = 0; a < n; ++a) {
    for (int m = 0; m < kModes; ++m) base(a, m) = rng.uniform(-1.0, 1.0);
    for (int m = 0; m < 4; ++m) bump(a, m) = rng.uniform(-1.0, 1.0);
  }
  auto spatial = [&](double x, double y) {
    const double modes[kModes] = {x - 0.5,
                                  y - 0.5,
                                  (x - 0.5) * (y - 0.5),
                                  std::sin(kPi * x),
                                  std::cos(kPi * y),
                                  std::sin(kPi * (x + y))};
    Vec s = Vec::Zero(n);
    for (int m = 0; m < kModes; ++m) s += base.col(m) * modes[m];
    return Vec(scale * s);
  };
  MapPair p;
  p.f0 = GridMap::from_function(d, target,
                                [&](double x, double y) { return mf.lift(spatial(x / lx, y / ly)); });
  p.f1 = p.f0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const int i = d.col(k), j = d.row(k);
    if (!d.interior(i, j)) continue;
    const double sx = d.x(i) / lx, sy = d.y(j) / ly;
    const double modes[4] = {std::sin(kPi * sx) * std::sin(kPi * sy),
                             std::sin(2 * kPi * sx) * std::sin(kPi * sy),
                             std::sin(kPi * sx) * std::sin(2 * kPi * sy),
                             std::sin(2 * kPi * sx) * std::sin(2 * kPi * sy)};
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < 4; ++m) c += bump.col(m) * modes[m];
    const Point& q = p.f0.values[k];
    p.f1.values[k] = mf.exp_map(q, mf.from_frame(mf.orthonormal_frame(q), scale * c));
  }
  return p;
}

}  // namespace mgl
