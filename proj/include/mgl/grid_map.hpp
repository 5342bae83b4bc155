#pragma once

// Maps from a planar grid domain into a model manifold.  The source is flat
// R^2 with its Euclidean metric, so m = 2 throughout this module.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "mgl/manifold.hpp"
#include "mgl/region.hpp"

namespace mgl {

inline constexpr int kSourceDim = 2;

struct GridDomain {
  int nx = 3;
  int ny = 3;
  double hx = 1.0;
  double hy = 1.0;
  /// Active-node mask in row-major order (index = j * nx + i).  Empty means
  /// every node is active.
  std::vector<char> mask;

  /// Unit square [0,1]^2 sampled with nx x ny nodes.
  static GridDomain unit_square(int nx, int ny);

  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  int col(std::size_t k) const { return static_cast<int>(k % nx); }
  int row(std::size_t k) const { return static_cast<int>(k / nx); }
  bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }
  bool active(int i, int j) const;
  /// Active node on the grid edge or with an inactive 4-neighbour.
  bool boundary(int i, int j) const;
  bool interior(int i, int j) const { return active(i, j) && !boundary(i, j); }
  double x(int i) const { return i * hx; }
  double y(int j) const { return j * hy; }
  double spacing(int axis) const { return axis == 0 ? hx : hy; }
  /// Trapezoidal weights over the union of fully active cells.
  std::vector<double> quadrature_weights() const;
  double area() const;
  bool operator==(const GridDomain&) const = default;
};

/// First-derivative stencil along one axis at one node; weights include 1/h.
struct AxisStencil {
  std::array<int, 3> offsets{};
  std::array<double, 3> weights{};
  int count = 0;
};

/// Central differences where both neighbours are active, otherwise
/// one-sided second order, falling back to first order.
AxisStencil axis_stencil(const GridDomain& d, int i, int j, int axis);

struct GridMap {
  GridDomain domain;
  ManifoldSpec target;
  std::vector<Point> values;

  GridMap() = default;
  GridMap(GridDomain d, ManifoldSpec t);
  static GridMap from_function(const GridDomain& d, const ManifoldSpec& t,
                               const std::function<Point(double, double)>& f);

  Point& at(int i, int j) { return values[domain.index(i, j)]; }
  const Point& at(int i, int j) const { return values[domain.index(i, j)]; }
  /// Throws std::invalid_argument on constraint violations.
  void validate() const;
};

/// Jacobian of f at a node expressed in the orthonormal frame at f(node):
/// matrix is n x 2, frame holds the ambient frame vectors as columns.
struct NodeJacobian {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd frame;
};

/// Ambient derivative of f along one grid axis at a node (a tangent vector
/// at f(node)), from log-map differences.
Vec axis_derivative(const ModelManifold& mf, const GridMap& f, int i, int j, int axis);

NodeJacobian jacobian(const GridMap& f, int i, int j);
NodeJacobian jacobian(const ModelManifold& mf, const GridMap& f, int i, int j);
/// Jacobians of every active node (inactive slots are empty).
std::vector<NodeJacobian> jacobian_field(const GridMap& f);

inline constexpr double kRankTol = 1e-8;

/// Descending singular values padded with zeros to length 2.
Spectrum spectrum_of(const Eigen::MatrixXd& j);
/// Rank: singular values above kRankTol * max(1, lambda_1).
int rank_of(const Spectrum& s);
Spectrum singular_spectrum(const GridMap& f, int i, int j);

Eigen::Matrix2d induced_metric(const Eigen::MatrixXd& j);
Eigen::Matrix2d induced_metric(const GridMap& f, int i, int j);
/// sqrt(det g) g^{-1}, the coefficient of the minimal surface operator.
Eigen::Matrix2d area_coefficient(const Eigen::MatrixXd& j);

double graph_volume(const GridMap& f);
/// Volume from precomputed Jacobians (same quadrature).
double graph_volume(const GridDomain& d, const std::vector<NodeJacobian>& jac);

struct RegionField {
  std::vector<RegionVerdict> verdicts;
  std::vector<SquaredSpectrum> spectra;
  bool all_member = true;
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t non_members = 0;
};

RegionField region_field(const GridMap& f, const Region& region);

/// Discrete divergence sum_ij d_i(a_ij d_j u) at an interior node.
/// Diagonal terms use face-averaged coefficients, mixed terms a central
/// difference of a_ij D_j u taken at the axis neighbours.
double divergence_at(const GridDomain& d, const std::vector<Eigen::Matrix2d>& a,
                     const std::vector<double>& u, int i, int j);
/// Coefficient of u(i, j) in divergence_at.
double divergence_center(const GridDomain& d, const std::vector<Eigen::Matrix2d>& a, int i,
                         int j);
std::vector<Eigen::Matrix2d> area_coefficient_field(const GridMap& f);

/// Per-node Euclidean norm over components of the minimal surface operator;
/// zero on boundary and inactive nodes.  Euclidean targets only.
std::vector<double> ms_residual(const GridMap& f);
double max_abs(const std::vector<double>& v);

/// Largest distance between corresponding active nodes.
double sup_distance(const GridMap& a, const GridMap& b);
/// Largest distance on boundary nodes.
double boundary_distance(const GridMap& a, const GridMap& b);

}  // namespace mgl
