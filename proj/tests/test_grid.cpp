#include <doctest.h>

#include <cmath>

#include "hjbcar/grid.hpp"

using namespace hjbcar;

TEST_SUITE_BEGIN("grid");

namespace {
const CarParams kPaperCar = CarParams::make(0.07, 0.04, 4.0);
}

TEST_CASE("CFL bound arithmetic") {
  SUBCASE("stock parameters") {
    const double dt = cfl_max_dt(0.02, 0.02, kTwoPi / 100, kPaperCar);
    CHECK(dt == doctest::Approx(0.0052175).epsilon(1e-4));
  }
  SUBCASE("point car with unit spacings") {
    const CarParams car = CarParams::make(0.0, 0.0, 3.0);
    CHECK(cfl_max_dt(1, 1, 1, car) == doctest::Approx(1.0 / (2.0 + 3.0)));
  }
  SUBCASE("homogeneity: doubling spacings doubles the bound") {
    const double a = cfl_max_dt(0.05, 0.04, 0.1, kPaperCar);
    const double b = cfl_max_dt(0.10, 0.08, 0.2, kPaperCar);
    CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-12));
  }
  SUBCASE("rejects nonpositive spacings") {
    CHECK_THROWS_AS(cfl_max_dt(0.0, 1, 1, kPaperCar), std::invalid_argument);
  }
}

TEST_CASE("grid construction honors the CFL bound") {
  const Grid4 g = Grid4::make(-1, 1, -1, 1, 50, 50, 64, 3.0, kPaperCar, 0.9);
  const double bound = cfl_max_dt(g.dx(), g.dy(), g.dtheta(), kPaperCar);
  CHECK(g.dt() <= 0.9 * bound * (1 + 1e-12));
  CHECK(g.time_of(g.N()) == 3.0);
  CHECK(g.time_of(0) == 0.0);
  CHECK(g.dx() == doctest::Approx(0.04));
  CHECK(g.dtheta() == doctest::Approx(kTwoPi / 64));

  SUBCASE("explicit step counts violating the bound are rejected") {
    CHECK_THROWS_AS(Grid4::with_steps(-1, 1, -1, 1, 50, 50, 64, 3.0, 10, kPaperCar),
                    std::invalid_argument);
    CHECK_NOTHROW(Grid4::with_steps(-1, 1, -1, 1, 50, 50, 64, 3.0, 400, kPaperCar));
  }
}

TEST_CASE("node to configuration corners") {
  const Grid4 g = Grid4::make(-1, 1, -1, 1, 20, 20, 16, 1.0, kPaperCar);
  SUBCASE("origin corner") {
    const auto [c, t] = g.node_to_config({0, 0, 0, 0});
    CHECK(c.x == -1.0);
    CHECK(c.y == -1.0);
    CHECK(c.theta == 0.0);
    CHECK(t == 0.0);
  }
  SUBCASE("far corner at the horizon") {
    const auto [c, t] = g.node_to_config({20, 20, 0, g.N()});
    CHECK(c.x == 1.0);
    CHECK(c.y == 1.0);
    CHECK(t == 1.0);
  }
  SUBCASE("heading index K must be reduced mod K first") {
    CHECK_THROWS_AS(g.node_to_config({0, 0, 16, 0}), std::out_of_range);
  }
  SUBCASE("time index out of range") {
    CHECK_THROWS_AS(g.node_to_config({0, 0, 0, g.N() + 1}), std::out_of_range);
  }
}

TEST_CASE("snapping") {
  const Grid4 g = Grid4::make(-1, 1, -1, 1, 20, 20, 16, 1.0, kPaperCar);
  SUBCASE("a node snaps to itself") {
    for (int i = 0; i <= 20; i += 5) {
      for (int k = 0; k < 16; k += 3) {
        const Configuration c = g.node_config(i, 7, k);
        const NodeIndex idx = g.snap_config(c);
        CHECK(idx.i == i);
        CHECK(idx.j == 7);
        CHECK(idx.k == k);
      }
    }
  }
  SUBCASE("heading just below 2*pi wraps to node 0") {
    const NodeIndex idx = g.snap_config({0, 0, kTwoPi - g.dtheta() / 4});
    CHECK(idx.k == 0);
  }
  SUBCASE("midpoints tie toward the lower index") {
    // dx = 2/16 = 0.125 is exact, so the midpoint is an exact tie.
    const Grid4 g16 = Grid4::make(-1, 1, -1, 1, 16, 16, 16, 1.0, kPaperCar);
    const double mid_x = -1.0 + 1.5 * g16.dx();
    CHECK(g16.snap_config({mid_x, 0, 0}).i == 1);
    CHECK(g16.snap_config({mid_x + 1e-9, 0, 0}).i == 2);
    CHECK(g16.snap_config({mid_x - 1e-9, 0, 0}).i == 1);
  }
  SUBCASE("outside the domain is rejected") {
    CHECK_THROWS_AS(g.snap_config({1.5, 0, 0}), std::out_of_range);
  }
  SUBCASE("snap displaces by at most half a cell per axis") {
    for (double x = -0.999; x < 1.0; x += 0.137) {
      for (double th = 0.0; th < kTwoPi; th += 0.456) {
        const NodeIndex idx = g.snap_config({x, 0.421, th});
        const Configuration c = g.node_config(idx.i, idx.j, idx.k);
        CHECK(std::abs(c.x - x) <= g.dx() / 2 + 1e-12);
        CHECK(std::abs(c.y - 0.421) <= g.dy() / 2 + 1e-12);
        CHECK(std::abs(angle_diff(c.theta, th)) <= g.dtheta() / 2 + 1e-12);
      }
    }
  }
}

TEST_CASE("heading arithmetic is periodic") {
  const Grid4 g = Grid4::make(-1, 1, -1, 1, 10, 10, 12, 1.0, kPaperCar);
  for (int k = 0; k < 12; ++k) {
    CHECK(g.wrap_k(k + 12) == k);
    CHECK(g.wrap_k(k - 12) == k);
  }
}

TEST_SUITE_END();
