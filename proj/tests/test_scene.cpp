#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hjbcar/scene.hpp"
#include "hjbcar/scene_library.hpp"

using namespace hjbcar;

TEST_SUITE_BEGIN("scene");

namespace {

const CarParams kPaperCar = CarParams::make(0.07, 0.04, 4.0);
constexpr double kPi = kTwoPi / 2.0;

Scene empty_scene(double horizon = 5.0) {
  Scene s;
  s.horizon = horizon;
  return s;
}

bool corners_match(const Footprint& fp, std::vector<Vec2> expected, double tol) {
  for (const Vec2& c : fp.corners) {
    auto it = std::find_if(expected.begin(), expected.end(), [&](Vec2 e) {
      return std::abs(e.x - c.x) <= tol && std::abs(e.y - c.y) <= tol;
    });
    if (it == expected.end()) return false;
    expected.erase(it);
  }
  return expected.empty();
}

}  // namespace

TEST_CASE("footprint corners") {
  SUBCASE("axis aligned") {
    const Footprint fp = footprint({0, 0, 0}, kPaperCar);
    CHECK(corners_match(fp, {{0.07, 0.04}, {0.07, -0.04}, {-0.07, 0.04}, {-0.07, -0.04}},
                        1e-12));
  }
  SUBCASE("rotated a quarter turn") {
    const Footprint fp = footprint({0, 0, kPi / 2}, kPaperCar);
    CHECK(corners_match(fp, {{0.04, 0.07}, {-0.04, 0.07}, {0.04, -0.07}, {-0.04, -0.07}},
                        1e-12));
  }
  SUBCASE("translation moves every corner") {
    const Footprint a = footprint({0, 0, 0.9}, kPaperCar);
    const Footprint b = footprint({0.3, 0.3, 0.9}, kPaperCar);
    for (int i = 0; i < 4; ++i) {
      CHECK(b.corners[i].x == doctest::Approx(a.corners[i].x + 0.3));
      CHECK(b.corners[i].y == doctest::Approx(a.corners[i].y + 0.3));
    }
  }
  SUBCASE("area is preserved under rotation") {
    for (double th = 0.0; th < kTwoPi; th += 0.37) {
      const Footprint fp = footprint({0.1, -0.2, th}, kPaperCar);
      double area = 0.0;
      for (int i = 0; i < 4; ++i)
        area += cross(fp.corners[i], fp.corners[(i + 1) % 4]);
      CHECK(std::abs(area) / 2 == doctest::Approx(4 * 0.07 * 0.04).epsilon(1e-10));
    }
  }
}

TEST_CASE("occupancy of the motion primitives") {
  SUBCASE("static disk holds for all times") {
    Scene s = empty_scene();
    s.obstacles.emplace_back(StaticDisk{{0.2, 0.0}, 0.1});
    for (double t : {0.0, 1.0, 4.9}) {
      CHECK(occupied({0.25, 0.0}, t, s));
      CHECK_FALSE(occupied({0.5, 0.5}, t, s));
    }
  }
  SUBCASE("rotating sector sweeps past a fixed point") {
    Scene s = empty_scene();
    RotatingAnnularSector sec;
    sec.center = {0, 0};
    sec.r_inner = 0.35;
    sec.r_outer = 0.65;
    sec.angle_start = 0.0;
    sec.angle_width = kPi / 4;
    sec.angular_speed = kPi / 5;
    s.obstacles.emplace_back(sec);
    const Vec2 p{0.5 * std::cos(kPi / 8), 0.5 * std::sin(kPi / 8)};
    CHECK(occupied(p, 0.0, s));  // inside the initial span
    // After t = 2.5 the span is rotated by pi/2 and has fully passed p.
    CHECK_FALSE(occupied(p, 2.5, s));
    // Radii gate membership regardless of angle.
    CHECK_FALSE(occupied({0.2 * std::cos(kPi / 8), 0.2 * std::sin(kPi / 8)}, 0.0, s));
  }
  SUBCASE("points outside the domain are free by convention") {
    Scene s = empty_scene();
    s.obstacles.emplace_back(StaticDisk{{0.9, 0.0}, 0.3});  // sticks out of the domain
    CHECK(occupied({1.0, 0.0}, 0.0, s));
    CHECK_FALSE(occupied({1.1, 0.0}, 0.0, s));
  }
  SUBCASE("time outside the horizon is rejected") {
    Scene s = empty_scene(2.0);
    CHECK_THROWS_AS(occupied({0, 0}, 3.0, s), std::out_of_range);
  }
}

TEST_CASE("periodic motions repeat their occupancy") {
  SUBCASE("rotating sector") {
    Scene s = empty_scene(25.0);
    RotatingAnnularSector sec;
    sec.center = {0, 0};
    sec.r_inner = 0.3;
    sec.r_outer = 0.6;
    sec.angle_start = 0.7;
    sec.angle_width = 1.0;
    sec.angular_speed = kTwoPi / 10.0;  // period 10
    s.obstacles.emplace_back(sec);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coord(-0.99, 0.99);
    std::uniform_real_distribution<double> time(0.0, 10.0);
    for (int i = 0; i < 300; ++i) {
      const Vec2 p{coord(rng), coord(rng)};
      const double t = time(rng);
      CHECK(occupied(p, t, s) == occupied(p, t + 10.0, s));
    }
  }
  SUBCASE("oscillating bar") {
    Scene s = empty_scene(10.0);
    OscillatingBar bar;
    bar.center = {0.0, 0.2};
    bar.half_width = 0.3;
    bar.half_height = 0.05;
    bar.axis = {0, 1};
    bar.amplitude = 0.4;
    bar.period = 3.0;
    s.obstacles.emplace_back(bar);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> coord(-0.99, 0.99);
    std::uniform_real_distribution<double> time(0.0, 7.0);
    for (int i = 0; i < 300; ++i) {
      const Vec2 p{coord(rng), coord(rng)};
      const double t = time(rng);
      CHECK(occupied(p, t, s) == occupied(p, t + 3.0, s));
    }
  }
}

TEST_CASE("collision queries") {
  const double spacing = 0.01;
  SUBCASE("car centered in a large disk") {
    Scene s = empty_scene();
    s.obstacles.emplace_back(StaticDisk{{0.0, 0.0}, 0.5});
    CHECK(collides({0, 0, 0.3}, 0.0, s, kPaperCar, spacing));
  }
  SUBCASE("clear separation never collides") {
    Scene s = empty_scene();
    s.obstacles.emplace_back(StaticDisk{{0.6, 0.6}, 0.2});
    CHECK_FALSE(collides({-0.5, -0.5, 1.0}, 0.0, s, kPaperCar, spacing));
  }
  SUBCASE("a bar as thin as the sample spacing is still detected") {
    // The lattice has spacing <= `spacing`, so a bar of that width cannot
    // slip between two sample columns.
    Scene s = empty_scene();
    OscillatingBar bar;
    bar.center = {0.005, 0.0};  // centered between lattice columns
    bar.half_width = spacing / 2;
    bar.half_height = 1.0;
    bar.axis = {0, 1};
    bar.amplitude = 0.0;
    bar.period = 1.0;
    s.obstacles.emplace_back(bar);
    CHECK(collides({0, 0, 0}, 0.0, s, kPaperCar, spacing));
  }
  SUBCASE("growing the body never un-collides") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> coord(-0.8, 0.8);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    Scene s = empty_scene();
    s.obstacles.emplace_back(StaticDisk{{0.25, -0.1}, 0.3});
    s.obstacles.emplace_back(StaticPolygon{{{-0.6, 0.2}, {-0.2, 0.2}, {-0.4, 0.7}}});
    for (int i = 0; i < 200; ++i) {
      const Configuration c{coord(rng), coord(rng), angle(rng)};
      CarParams big = kPaperCar;
      big.body_half_length *= 1.8;
      big.body_half_width *= 1.8;
      if (collides(c, 0.0, s, kPaperCar, spacing))
        CHECK(collides(c, 0.0, s, big, spacing));
    }
  }
}

TEST_CASE("illegal masks") {
  const Grid4 g = Grid4::make(-1, 1, -1, 1, 16, 16, 8, 4.0, kPaperCar);
  SUBCASE("empty scene masks nothing") {
    const Scene s = empty_scene(4.0);
    const auto mask = illegal_mask(s, g, 0, kPaperCar);
    CHECK(std::count(mask.begin(), mask.end(), 1) == 0);
  }
  SUBCASE("static scenes give the same mask at every step") {
    Scene s = empty_scene(4.0);
    s.obstacles.emplace_back(StaticDisk{{0.3, 0.3}, 0.25});
    const auto m0 = illegal_mask(s, g, 0, kPaperCar);
    const auto mN = illegal_mask(s, g, g.N() / 2, kPaperCar);
    CHECK(m0 == mN);
    CHECK(std::count(m0.begin(), m0.end(), 1) > 0);
  }
  SUBCASE("rotation by a full period reproduces the mask") {
    Scene s = empty_scene(20.0);
    RotatingAnnularSector sec;
    sec.center = {0, 0};
    sec.r_inner = 0.3;
    sec.r_outer = 0.7;
    sec.angle_start = 0.3;
    sec.angle_width = 0.9;
    sec.angular_speed = kTwoPi / 10.0;
    s.obstacles.emplace_back(sec);
    // dt = 20/N; pick N even so that t(N/2) = 10 = one period, exactly.
    const Grid4 gp = Grid4::with_steps(-1, 1, -1, 1, 16, 16, 8, 20.0, 3000, kPaperCar);
    const auto m0 = illegal_mask(s, gp, 0, kPaperCar);
    const auto m1 = illegal_mask(s, gp, 1500, kPaperCar);
    CHECK(m0 == m1);
  }
  SUBCASE("mask agrees with per-node collision queries") {
    Scene s = empty_scene(4.0);
    s.obstacles.emplace_back(StaticDisk{{0.2, -0.3}, 0.3});
    OscillatingBar bar;
    bar.center = {-0.4, 0.3};
    bar.half_width = 0.25;
    bar.half_height = 0.04;
    bar.axis = {0, 1};
    bar.amplitude = 0.2;
    bar.period = 2.0;
    s.obstacles.emplace_back(bar);
    const int n = g.N() / 3;
    const auto mask = illegal_mask(s, g, n, kPaperCar, 2);
    const double spacing = 0.5 * std::min(g.dx(), g.dy());
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> ii(0, g.I()), jj(0, g.J()), kk(0, g.K() - 1);
    for (int trial = 0; trial < 400; ++trial) {
      const int i = ii(rng), j = jj(rng), k = kk(rng);
      const bool direct =
          collides(g.node_config(i, j, k), g.time_of(n), s, kPaperCar, spacing);
      CHECK(mask[g.flat(i, j, k)] == (direct ? 1 : 0));
    }
  }
}

TEST_CASE("inflation widens every kind") {
  Scene s = empty_scene();
  s.obstacles.emplace_back(StaticDisk{{0.0, 0.0}, 0.2});
  CHECK_FALSE(occupied({0.25, 0.0}, 0.0, s));
  s.inflation = 0.1;
  CHECK(occupied({0.25, 0.0}, 0.0, s));
}

TEST_CASE("built-in problems are valid and round-trip scene invariants") {
  for (const std::string& name : builtin_problem_names()) {
    const Problem p = builtin_problem(name);
    CHECK_NOTHROW(p.scene.validate());
    CHECK_NOTHROW(p.car.validate());
    CHECK(p.scene.in_domain(p.target.x, p.target.y));
    for (const Configuration& start : p.starts) {
      CHECK(p.scene.in_domain(start.x, start.y));
      CHECK_FALSE(collides(start, 0.0, p.scene, p.car, 0.01));
    }
    // The target must be legal at the terminal time (and for these scenes at
    // every time).
    CHECK_FALSE(collides(p.target, p.scene.horizon, p.scene, p.car, 0.01));
  }
}

TEST_CASE("obstacle validation rejects malformed shapes") {
  CHECK_THROWS_AS(validate_obstacle(StaticPolygon{{{0, 0}, {1, 1}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_obstacle(StaticDisk{{0, 0}, 0.0}), std::invalid_argument);
  RotatingAnnularSector sec;
  sec.r_inner = 0.5;
  sec.r_outer = 0.4;
  sec.angle_width = 1.0;
  CHECK_THROWS_AS(validate_obstacle(sec), std::invalid_argument);
  sec.r_outer = 0.6;
  sec.angle_width = kTwoPi;
  CHECK_THROWS_AS(validate_obstacle(sec), std::invalid_argument);
  MovingRectangle r;
  r.half_width = 0.1;
  r.half_height = 0.1;
  CHECK_THROWS_AS(validate_obstacle(r), std::invalid_argument);  // no waypoints
}

TEST_SUITE_END();
