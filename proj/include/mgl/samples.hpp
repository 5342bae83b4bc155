#pragma once

// Smooth test maps: demo boundary data for the CLI and seeded random map
// pairs with shared boundary values.

#include <cstdint>
#include <string>

#include "mgl/grid_map.hpp"
#include "mgl/solver.hpp"

namespace mgl {

/// Euclidean: offset + A (x, y).  Hyperbolic: the lift of that spatial map.
GridMap affine_map(const GridDomain& d, const ManifoldSpec& target, const Eigen::MatrixXd& a,
                   const Eigen::VectorXd& offset);

/// Component c is amplitude * s_c(x, y) with s_0 = sin(pi x) cos(pi y),
/// s_1 = cos(pi x) sin(pi y) and shifted products beyond; lifted for
/// hyperbolic targets.
GridMap sine_map(const GridDomain& d, const ManifoldSpec& target, double amplitude);

/// Parses "affine", "sine[:amplitude]" (default 0.3) or "steep"
/// (sine with amplitude 0.8) and returns the boundary values of that map.
BoundaryData demo_boundary(const std::string& name, const GridDomain& d,
                           const ManifoldSpec& target);

struct MapPair {
  GridMap f0, f1;
};

/// f0 lifts a random smooth spatial field of size `scale`; f1 adds a random
/// interior bump that vanishes on boundary nodes, so both share boundary
/// values exactly.
MapPair random_map_pair(const GridDomain& d, const ManifoldSpec& target, std::uint64_t seed,
                        double scale = 0.5);

}  // namespace mgl
