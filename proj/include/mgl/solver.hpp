#pragma once

// Dirichlet problem for minimal maps on a grid.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgl/grid_map.hpp"
#include "mgl/region.hpp"

namespace mgl {

struct SolverOptions {
  int max_outer = 200;
  int inner_sweeps = 50;
  double sor_omega = 1.5;
  double tol_residual = 1e-8;
  double damping = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SolveOutcome {
  GridMap map;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> volume_history;
  std::string message;
};

/// Dirichlet data: values on boundary nodes, nothing elsewhere.
struct BoundaryData {
  GridDomain domain;
  ManifoldSpec target;
  std::vector<std::optional<Point>> values;

  /// Takes the boundary values of a map.
  static BoundaryData from_map(const GridMap& f);
  /// Throws std::invalid_argument if a boundary node has no value.
  void require_complete() const;
  /// Copies the boundary values into f (bit-exact).
  void impose(GridMap& f) const;
};

/// Discrete harmonic interior (euclidean) or iterated geodesic-mean interior
/// (hyperbolic) for the given boundary values.
GridMap harmonic_extension(const BoundaryData& boundary, double tol = 1e-12,
                           int max_sweeps = 200000);

/// Picard iteration on the minimal surface system: coefficients
/// sqrt(g) g^{-1} are frozen per outer step and each component's linear
/// divergence-form equation is relaxed by red-black SOR.
SolveOutcome solve_euclidean(const BoundaryData& boundary, const GridMap& init,
                             const SolverOptions& opts = {});

/// Riemannian gradient descent on the discrete graph volume with an
/// Armijo backtracking line search.  final_residual is the largest nodal
/// gradient norm divided by the nodal quadrature weight.
SolveOutcome solve_hyperbolic(const BoundaryData& boundary, const GridMap& init,
                              const SolverOptions& opts = {});

/// Dispatches on the target kind.
SolveOutcome solve_minimal(const BoundaryData& boundary, const GridMap& init,
                           const SolverOptions& opts = {});

/// Per-node gradient of the discrete graph volume (ambient tangent vectors,
/// zero on boundary nodes).
std::vector<Vec> volume_gradient(const GridMap& f);

/// Harmonic extension plus a seeded smooth interior bump of amplitude
/// `amplitude`, zero on the boundary.
GridMap perturbed_initialization(const BoundaryData& boundary, double amplitude,
                                 std::uint64_t seed);

/// Largest distance of a boundary value from the first one (1 if all equal).
double data_scale(const BoundaryData& boundary);

enum class UniquenessVerdict { Unique, TheoremSilent, Inconclusive };
std::string to_string(UniquenessVerdict v);

struct UniquenessRun {
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  bool in_region = false;
  double min_margin = 0.0;
  std::size_t non_members = 0;
  double max_slope = 0.0;
};

struct UniquenessReport {
  std::vector<UniquenessRun> runs;
  std::vector<GridMap> solutions;
  double max_pair_distance = 0.0;
  bool in_region = false;
  UniquenessVerdict verdict = UniquenessVerdict::Inconclusive;
  std::string conclusion;
};

inline constexpr double kUniquenessTol = 1e-6;

/// Solves from `runs` distinct initializations (harmonic, then perturbed
/// with seeds opts.seed + k) and compares the converged maps.
UniquenessReport uniqueness_experiment(const BoundaryData& boundary, const Region& region,
                                       const SolverOptions& opts = {}, int runs = 2,
                                       double distance_tol = kUniquenessTol);

}  // namespace mgl
