#include <doctest.h>

#include <cmath>

#include "mgl/samples.hpp"
#include "mgl/solver.hpp"

using namespace mgl;

namespace {

GridMap affine2(int n) {
  Eigen::MatrixXd a(2, 2);
  a << 0.4, 0.1, -0.2, 0.3;
  return affine_map(GridDomain::unit_square(n, n), ManifoldSpec::euclidean(2), a,
                    Eigen::Vector2d(0.5, -0.5));
}

bool boundary_bit_exact(const BoundaryData& b, const GridMap& f) {
  for (std::size_t k = 0; k < b.values.size(); ++k)
    if (b.values[k] && *b.values[k] != f.values[k]) return false;
  return true;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("options validation") {
    SolverOptions o;
    CHECK_NOTHROW(o.validate());
    o.sor_omega = 2.0;
    CHECK_THROWS(o.validate());
    o = {};
    o.tol_residual = 0.0;
    CHECK_THROWS(o.validate());
    o = {};
    o.damping = 1.5;
    CHECK_THROWS(o.validate());
  }

  TEST_CASE("harmonic extension of affine and constant data") {
    const auto f = affine2(9);
    const auto h = harmonic_extension(BoundaryData::from_map(f));
    CHECK(sup_distance(h, f) < 1e-10);
    const auto c = GridMap::from_function(GridDomain::unit_square(7, 7), ManifoldSpec::euclidean(3),
                                          [](double, double) { return Eigen::Vector3d(1, 2, 3); });
    CHECK(sup_distance(harmonic_extension(BoundaryData::from_map(c)), c) < 1e-12);
  }

  TEST_CASE("hyperbolic harmonic extension settles") {
    const auto s = sine_map(GridDomain::unit_square(9, 9), ManifoldSpec::hyperbolic(2), 0.3);
    const auto b = BoundaryData::from_map(s);
    const auto h = harmonic_extension(b);
    CHECK(boundary_bit_exact(b, h));
    const ModelManifold mf(h.target);
    for (const auto& p : h.values) CHECK(mf.constraint_residual(p) < 1e-10);
    // Each interior value is the geodesic mean of its four neighbours.
    double worst = 0.0;
    for (int j = 1; j < 8; ++j)
      for (int i = 1; i < 8; ++i) {
        Vec s = mf.log_map(h.at(i, j), h.at(i + 1, j)) + mf.log_map(h.at(i, j), h.at(i - 1, j)) +
                mf.log_map(h.at(i, j), h.at(i, j + 1)) + mf.log_map(h.at(i, j), h.at(i, j - 1));
        worst = std::max(worst, mf.norm(s));
      }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("incomplete boundary data is rejected") {
    auto b = BoundaryData::from_map(affine2(5));
    b.values[0].reset();
    CHECK_THROWS_AS(b.require_complete(), std::invalid_argument);
    CHECK_THROWS(harmonic_extension(b));
  }

  TEST_CASE("affine boundary converges to the affine map") {
    const auto f = affine2(9);
    const auto b = BoundaryData::from_map(f);
    SolverOptions o;
    o.tol_residual = 1e-12;
    const auto out = solve_euclidean(b, perturbed_initialization(b, 0.2, 3), o);
    CHECK(out.converged);
    CHECK(out.final_residual <= 1e-10);
    CHECK(sup_distance(out.map, f) < 1e-9);
    CHECK(boundary_bit_exact(b, out.map));
  }

  TEST_CASE("codim-1 sine boundary converges and refines at second order") {
    auto solve = [](int n) {
      const auto b = demo_boundary("sine:0.3", GridDomain::unit_square(n, n), ManifoldSpec::euclidean(1));
      const auto out = solve_euclidean(b, harmonic_extension(b));
      REQUIRE(out.converged);
      CHECK(out.final_residual <= 1e-8);
      CHECK(max_abs(ms_residual(out.map)) <= 1e-8);
      CHECK(boundary_bit_exact(b, out.map));
      return out.map;
    };
    const auto c = solve(9), m = solve(17), f = solve(33);
    double e1 = 0, e2 = 0;
    for (int j = 0; j < 9; ++j)
      for (int i = 0; i < 9; ++i) {
        e1 = std::max(e1, std::abs(c.at(i, j)[0] - m.at(2 * i, 2 * j)[0]));
        e2 = std::max(e2, std::abs(m.at(2 * i, 2 * j)[0] - f.at(4 * i, 4 * j)[0]));
      }
    CHECK(e2 > 0.0);
    CHECK(e1 / e2 > 3.0);
  }

  TEST_CASE("solution has less volume than the initial map") {
    const auto b = demo_boundary("sine:0.3", GridDomain::unit_square(17, 17), ManifoldSpec::euclidean(2));
    const auto init = perturbed_initialization(b, 0.1, 5);
    const auto out = solve_minimal(b, init);
    CHECK(out.converged);
    CHECK(graph_volume(out.map) <= graph_volume(init) + 1e-10);
  }

  TEST_CASE("hyperbolic: constant boundary gives the constant map") {
    const ModelManifold h(ManifoldSpec::hyperbolic(2));
    Vec s(2);
    s << 0.3, -0.2;
    const Point p = h.lift(s);
    const auto c = GridMap::from_function(GridDomain::unit_square(7, 7), h.spec(),
                                          [&](double, double) { return p; });
    const auto b = BoundaryData::from_map(c);
    const auto out = solve_hyperbolic(b, harmonic_extension(b));
    CHECK(out.converged);
    CHECK(sup_distance(out.map, c) < 1e-12);
    for (const auto& g : volume_gradient(out.map)) CHECK(g.norm() < 1e-12);
  }

  TEST_CASE("hyperbolic: geodesic boundary stays on the geodesic") {
    const ModelManifold h(ManifoldSpec::hyperbolic(2));
    const auto d = GridDomain::unit_square(9, 9);
    const auto f = GridMap::from_function(d, h.spec(), [&](double x, double y) {
      Vec v = Vec::Zero(3);
      v[1] = 0.8 * x + 0.3 * std::sin(3 * y) * x * (1 - x);
      return h.exp_map(h.origin(), v);
    });
    const auto b = BoundaryData::from_map(f);
    SolverOptions o;
    o.max_outer = 5000;
    const auto out = solve_hyperbolic(b, perturbed_initialization(b, 0.1, 2), o);
    CHECK(out.converged);
    CHECK(out.final_residual <= 1e-8);
    double off = 0.0;
    for (const auto& p : out.map.values) off = std::max(off, std::abs(p[2]));
    CHECK(off < 1e-7);
    CHECK(boundary_bit_exact(b, out.map));
  }

  TEST_CASE("hyperbolic volume history is non-increasing") {
    const auto b = demo_boundary("sine:0.3", GridDomain::unit_square(9, 9), ManifoldSpec::hyperbolic(2));
    const auto out = solve_hyperbolic(b, perturbed_initialization(b, 0.1, 1));
    CHECK(out.converged);
    REQUIRE(out.volume_history.size() >= 2);
    for (std::size_t k = 1; k < out.volume_history.size(); ++k)
      CHECK(out.volume_history[k] <= out.volume_history[k - 1]);
  }

  TEST_CASE("non-convergence is reported, not thrown") {
    const auto b = demo_boundary("sine:0.3", GridDomain::unit_square(17, 17), ManifoldSpec::euclidean(1));
    SolverOptions o;
    o.max_outer = 1;
    o.inner_sweeps = 1;
    const auto out = solve_euclidean(b, harmonic_extension(b), o);
    CHECK_FALSE(out.converged);
    CHECK_FALSE(out.message.empty());
  }

  TEST_CASE("perturbed initialization keeps the boundary and is seeded") {
    const auto b = demo_boundary("sine", GridDomain::unit_square(9, 9), ManifoldSpec::euclidean(2));
    const auto p1 = perturbed_initialization(b, 0.1, 7), p2 = perturbed_initialization(b, 0.1, 7),
               p3 = perturbed_initialization(b, 0.1, 8);
    CHECK(boundary_bit_exact(b, p1));
    CHECK(sup_distance(p1, p2) == 0.0);
    CHECK(sup_distance(p1, p3) > 0.0);
  }

  TEST_CASE("uniqueness verdicts") {
    const auto d = GridDomain::unit_square(9, 9);
    SolverOptions o;
    o.tol_residual = 1e-12;
    const auto aff = uniqueness_experiment(BoundaryData::from_map(affine2(9)), Region(RegionKind::C_m), o);
    CHECK(aff.verdict == UniquenessVerdict::Unique);
    CHECK(aff.max_pair_distance < 1e-9);
    CHECK(aff.in_region);

    const auto sine = uniqueness_experiment(demo_boundary("sine:0.2", d, ManifoldSpec::euclidean(2)),
                                            Region(RegionKind::SlopeSqrt3));
    CHECK(sine.verdict == UniquenessVerdict::Unique);
    CHECK(sine.max_pair_distance < 1e-6);

    const auto steep = uniqueness_experiment(demo_boundary("steep", d, ManifoldSpec::euclidean(2)),
                                             Region(RegionKind::N_closure));
    CHECK(steep.verdict == UniquenessVerdict::TheoremSilent);
    CHECK(to_string(steep.verdict) == "out of region — theorem silent");

    SolverOptions few;
    few.max_outer = 1;
    const auto inc = uniqueness_experiment(demo_boundary("sine:0.2", d, ManifoldSpec::euclidean(2)),
                                           Region(RegionKind::SlopeSqrt3), few);
    CHECK(inc.verdict == UniquenessVerdict::Inconclusive);
  }
}
