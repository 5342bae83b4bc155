#pragma once

// Geodesic homotopy f_t between two grid maps with equal boundary values,
// and the checks on the squared spectra along it.

#include <ostream>
#include <string>
#include <vector>

#include "mgl/grid_map.hpp"
#include "mgl/region.hpp"

namespace mgl {

struct HomotopyTrace {
  GridMap f0, f1;
  std::vector<double> t;
  std::vector<GridMap> maps;
  /// [t index][node]
  std::vector<std::vector<NodeJacobian>> jacobians;
  std::vector<std::vector<SquaredSpectrum>> spectra;
  /// Geodesic velocity V = d/dt f_t(x), ambient components at f_t(x).
  std::vector<std::vector<Vec>> velocity;

  std::size_t samples() const { return t.size(); }
  std::size_t nodes() const { return f0.domain.size(); }
  bool active(std::size_t node) const {
    return f0.domain.active(f0.domain.col(node), f0.domain.row(node));
  }
  /// Largest lambda_1^2 over all nodes and samples.
  double max_spectrum() const;
};

/// n uniform samples of [0, 1] (n >= 2).
std::vector<double> uniform_samples(int n);

/// Matching requires equal boundary values (the Dirichlet setting).  Free
/// admits any endpoints, e.g. two different affine maps; boundary velocity
/// is then non-zero.
enum class BoundaryPolicy { Matching, Free };

/// Throws std::invalid_argument on grid/target mismatch, boundary mismatch
/// above 1e-10 (Matching only), or samples that are not ordered in [0,1]
/// with both ends.
HomotopyTrace build_homotopy(const GridMap& f0, const GridMap& f1,
                             const std::vector<double>& t_samples,
                             BoundaryPolicy policy = BoundaryPolicy::Matching);

/// Linear interpolant mu(t) of the endpoint squared spectra on [t1, t2].
struct InterpolantMu {
  double t1 = 0.0, t2 = 1.0;
  SquaredSpectrum a1, a2;
  std::vector<double> operator()(double t) const;
};

struct DominationReport {
  int l = 1;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_violation = 0.0;  // max of S_l(t) - sum mu_i(t)
  std::size_t worst_node = 0;
  double worst_t = 0.0;
  double tolerance = 0.0;
};

/// Partial sums sum_{i<=l} lambda_i^2(t) against sum_{i<=l} mu_i(t) for the
/// samples strictly inside [t[i1], t[i2]].  Default tolerance is
/// 1e-6 * max_spectrum().
DominationReport partial_sum_domination(const HomotopyTrace& trace, int l, std::size_t i1,
                                        std::size_t i2, double tol = -1.0);

struct ConvexityReport {
  int k = 1;
  double min_second_difference = 0.0;
  double max_F = 0.0;
  double tolerance = 0.0;
  std::size_t violations = 0;
  std::size_t worst_node = 0;
};

/// F_k(t) = sum_{i<=k} |df_t(a_i)|^2 with {a_i} the right singular vectors
/// at the middle sample, per node.  Tolerance defaults to 1e-5 * max F_k.
ConvexityReport fk_convexity(const HomotopyTrace& trace, int k, double tol = -1.0);
/// F_k values per sample at one node (for plotting and tests).
std::vector<double> fk_values(const HomotopyTrace& trace, std::size_t node, int k);

struct ConfinementTraceReport {
  std::size_t nodes = 0;
  std::size_t hypothesis_met = 0;
  std::size_t hypothesis_unmet = 0;
  std::size_t violations = 0;
  /// Nodes with lambda^2(t0) on the boundary of N and lambda_1^2(t0) > 1 at
  /// some interior sample.
  std::size_t degenerate_boundary_nodes = 0;
  std::string status;
};

/// Where both endpoint spectra of a node lie in C, every sampled
/// lambda^2(t) must lie in closed N.
ConfinementTraceReport confinement_check(const HomotopyTrace& trace, const Region& c);

/// CSV rows: node_i,node_j,t,lambda1_sq,...,S_1..S_m,mu_S_1..mu_S_m.
void write_trace_csv(const HomotopyTrace& trace, std::ostream& out);

}  // namespace mgl
