#include <doctest.h>

#include <cmath>

#include "mgl/grid_map.hpp"
#include "mgl/samples.hpp"
#include "mgl/util.hpp"
#include "oracles.hpp"

using namespace mgl;

namespace {

GridMap euclid_fn(int n, int dim, const std::function<Eigen::VectorXd(double, double)>& f) {
  return GridMap::from_function(GridDomain::unit_square(n, n), ManifoldSpec::euclidean(dim), f);
}

}  // namespace

TEST_SUITE("grid_map") {
  TEST_CASE("domain layout and validation") {
    auto d = GridDomain::unit_square(5, 4);
    CHECK(d.size() == 20);
    CHECK(d.index(2, 3) == 17);
    CHECK(d.col(17) == 2);
    CHECK(d.row(17) == 3);
    CHECK(d.hy == doctest::Approx(1.0 / 3.0));
    CHECK(d.boundary(0, 1));
    CHECK(d.interior(1, 1));
    CHECK(d.area() == doctest::Approx(1.0));
    CHECK_THROWS(GridDomain::unit_square(2, 5).validate());
    d.mask.assign(20, 1);
    d.mask[d.index(2, 2)] = 0;
    CHECK(d.boundary(2, 1));
    CHECK_FALSE(d.active(2, 2));
    CHECK(d.area() == doctest::Approx(1.0 - 4 * (1.0 / 4) * (1.0 / 3)));
    GridDomain lonely = GridDomain::unit_square(3, 3);
    lonely.mask = {1, 0, 0, 0, 0, 0, 0, 0, 0};
    CHECK_THROWS(lonely.validate());
  }

  TEST_CASE("constant map has zero Jacobian, identity metric, unit volume") {
    const auto f = euclid_fn(9, 3, [](double, double) { return Eigen::Vector3d(1, 2, 3); });
    const auto j = jacobian(f, 4, 4);
    CHECK(j.matrix.norm() == 0.0);
    CHECK(singular_spectrum(f, 4, 4)[0] == 0.0);
    CHECK((induced_metric(f, 4, 4) - Eigen::Matrix2d::Identity()).norm() == 0.0);
    CHECK(graph_volume(f) == doctest::Approx(1.0).epsilon(1e-14));
    for (auto kind : {RegionKind::M_closed, RegionKind::N_closure, RegionKind::C_m,
                      RegionKind::V_m, RegionKind::SlopeSqrt3})
      CHECK(region_field(f, Region(kind)).all_member);
  }

  TEST_CASE("affine Jacobian is exact at every node") {
    Eigen::MatrixXd a(3, 2);
    a << 1.0, -0.5, 0.25, 2.0, 0.0, 0.3;
    const auto f = affine_map(GridDomain::unit_square(7, 7), ManifoldSpec::euclidean(3), a,
                              Eigen::Vector3d(0.1, 0.2, 0.3));
    for (int j = 0; j < 7; ++j)
      for (int i = 0; i < 7; ++i) CHECK((jacobian(f, i, j).matrix - a).norm() < 1e-13);
  }

  TEST_CASE("unit-speed geodesic map has unit first column") {
    const ModelManifold h(ManifoldSpec::hyperbolic(2, 1.0));
    const auto f = GridMap::from_function(GridDomain::unit_square(17, 17), h.spec(),
                                          [&](double x, double) {
                                            Vec v = Vec::Zero(3);
                                            v[1] = x;
                                            return h.exp_map(h.origin(), v);
                                          });
    for (int i = 0; i < 17; ++i) {
      const auto j = jacobian(f, i, 8);
      CHECK(j.matrix.col(0).norm() == doctest::Approx(1.0).epsilon(1e-4));
      CHECK(j.matrix.col(1).norm() < 1e-12);
    }
  }

  TEST_CASE("spectrum of fixed and random matrices") {
    Eigen::MatrixXd d(2, 2);
    d << 2, 0, 0, 1;
    const auto s = spectrum_of(d);
    CHECK(s[0] == doctest::Approx(2.0));
    CHECK(s[1] == doctest::Approx(1.0));
    CHECK(spectrum_of(Eigen::MatrixXd::Zero(3, 2))[0] == 0.0);
    Rng rng(3);
    for (int k = 0; k < 1000; ++k) {
      Eigen::MatrixXd j(3, 2);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 2; ++c) j(r, c) = rng.uniform(-2, 2);
      const auto sp = spectrum_of(j);
      const auto ref = oracle::squared_singular_values_2col(j);
      CHECK(sp[0] * sp[0] == doctest::Approx(ref[0]).epsilon(1e-10).scale(1.0));
      CHECK(sp[1] * sp[1] == doctest::Approx(ref[1]).epsilon(1e-10).scale(1.0));
      CHECK(induced_metric(j).determinant() ==
            doctest::Approx(std::pow(slope_from_spectrum(sp), 2)).epsilon(1e-10));
    }
    Eigen::MatrixXd one(1, 2);
    one << 3, 4;
    const auto s1 = spectrum_of(one);
    CHECK(s1.size() == 2);
    CHECK(s1[0] == doctest::Approx(5.0));
    CHECK(s1[1] == 0.0);
    CHECK(rank_of(s1) == 1);
  }

  TEST_CASE("induced metric examples") {
    Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
    CHECK((induced_metric(i2) - 2.0 * Eigen::Matrix2d::Identity()).norm() == 0.0);
    CHECK(induced_metric(i2).determinant() == doctest::Approx(4.0));
    CHECK((induced_metric(Eigen::MatrixXd::Zero(2, 2)) - Eigen::Matrix2d::Identity()).norm() == 0.0);
  }

  TEST_CASE("metric determinant equals squared slope on random maps") {
    const auto p = random_map_pair(GridDomain::unit_square(9, 9), ManifoldSpec::hyperbolic(3, 1.0), 4);
    for (int j = 0; j < 9; ++j)
      for (int i = 0; i < 9; ++i) {
        const double det = induced_metric(p.f1, i, j).determinant();
        const double sl = slope_from_spectrum(singular_spectrum(p.f1, i, j));
        CHECK(det == doctest::Approx(sl * sl).epsilon(1e-10));
      }
  }

  TEST_CASE("spectrum is invariant under swapping the axes") {
    const auto f = euclid_fn(11, 3, [](double x, double y) {
      return Eigen::Vector3d(std::sin(x + 2 * y), x * y, std::cos(3 * x) - y);
    });
    const auto g = euclid_fn(11, 3, [](double x, double y) {
      return Eigen::Vector3d(std::sin(y + 2 * x), x * y, std::cos(3 * y) - x);
    });
    for (int j = 0; j < 11; ++j)
      for (int i = 0; i < 11; ++i) {
        const auto a = singular_spectrum(f, i, j), b = singular_spectrum(g, j, i);
        CHECK(std::abs(a[0] - b[0]) < 1e-10);
        CHECK(std::abs(a[1] - b[1]) < 1e-10);
      }
  }

  TEST_CASE("volume of an affine graph") {
    const double c = 0.7;
    const auto f = euclid_fn(9, 1, [&](double x, double y) { return Eigen::VectorXd::Constant(1, c * (x + y)); });
    CHECK(graph_volume(f) == doctest::Approx(std::sqrt(1 + 2 * c * c)).epsilon(1e-13));
  }

  TEST_CASE("volume converges at second order") {
    auto vol = [](int n) {
      return graph_volume(euclid_fn(n, 1, [](double x, double y) {
        return Eigen::VectorXd::Constant(1, std::sin(2 * x) + y);
      }));
    };
    const double exact = oracle::simpson(
        [](double x) { return std::sqrt(2.0 + 4.0 * std::cos(2 * x) * std::cos(2 * x)); }, 0, 1, 2000);
    const double e1 = std::abs(vol(33) - exact), e2 = std::abs(vol(65) - exact),
                 e3 = std::abs(vol(129) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("region fields") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 0, 0, 1;
    const auto f = affine_map(GridDomain::unit_square(5, 5), ManifoldSpec::euclidean(2), a,
                              Eigen::Vector2d::Zero());
    const auto field = region_field(f, Region(RegionKind::N_closure));
    CHECK(field.all_member);
    for (const auto& v : field.verdicts) CHECK(v.on_boundary);

    auto steep = euclid_fn(7, 2, [](double x, double y) { return Eigen::Vector2d(0.1 * x, 0.1 * y); });
    steep.at(3, 3) = Eigen::Vector2d(5.0, -5.0);
    const auto sf = region_field(steep, Region(RegionKind::N_closure));
    // Central differences see the spike from its axis neighbours.
    CHECK_FALSE(sf.all_member);
    CHECK_FALSE(sf.verdicts[steep.domain.index(4, 3)].member);
    CHECK_FALSE(sf.verdicts[steep.domain.index(3, 2)].member);
    CHECK(sf.verdicts[steep.domain.index(0, 0)].member);
    CHECK(sf.non_members == 4);
  }

  TEST_CASE("minimal surface residual") {
    Eigen::MatrixXd a(2, 2);
    a << 0.5, 0.2, -0.3, 0.4;
    const auto f = affine_map(GridDomain::unit_square(9, 9), ManifoldSpec::euclidean(2), a,
                              Eigen::Vector2d(1, 1));
    CHECK(max_abs(ms_residual(f)) <= 1e-10);
    auto harm = [](double c) {
      return max_abs(ms_residual(euclid_fn(33, 1, [&](double x, double y) {
        return Eigen::VectorXd::Constant(1, c * (x * x - y * y));
      })));
    };
    const double r1 = harm(0.05), r2 = harm(0.1);
    CHECK(r1 > 1e-6);
    CHECK(r2 / r1 == doctest::Approx(8.0).epsilon(0.1));
    const auto hyp = random_map_pair(GridDomain::unit_square(5, 5), ManifoldSpec::hyperbolic(2), 1);
    CHECK_THROWS_AS(ms_residual(hyp.f0), std::invalid_argument);
  }

  TEST_CASE("inactive nodes are rejected") {
    auto d = GridDomain::unit_square(5, 5);
    d.mask.assign(25, 1);
    d.mask[d.index(4, 4)] = 0;
    const GridMap f(d, ManifoldSpec::euclidean(1));
    CHECK_THROWS(jacobian(f, 4, 4));
  }

  TEST_CASE("distances between maps") {
    const auto p = random_map_pair(GridDomain::unit_square(9, 9), ManifoldSpec::hyperbolic(2), 2);
    CHECK(boundary_distance(p.f0, p.f1) == 0.0);
    CHECK(sup_distance(p.f0, p.f1) > 0.0);
    CHECK(sup_distance(p.f0, p.f0) == 0.0);
  }
}
