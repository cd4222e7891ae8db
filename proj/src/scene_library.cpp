#include "hjbcar/scene_library.hpp"

#include <cmath>
#include <stdexcept>

namespace hjbcar {

namespace {

constexpr double kPi = kTwoPi / 2.0;

Scene square_domain(double horizon) {
  Scene s;
  s.x_min = -1.0;
  s.x_max = 1.0;
  s.y_min = -1.0;
  s.y_max = 1.0;
  s.horizon = horizon;
  return s;
}

/// A doorway: a wall at x = wall_x with a gap of half-height `gap_half`
/// whose center oscillates. Both bars share the motion so the gap size stays
/// fixed; the bars are long enough to cover the wall at every displacement.
void add_doorway(Scene& s, double wall_x, double gap_center, double gap_half,
                 double amplitude, double period, double phase) {
  const double bar_half_h = 1.8;
  OscillatingBar upper;
  upper.center = {wall_x, gap_center + gap_half + bar_half_h};
  upper.half_width = 0.03;
  upper.half_height = bar_half_h;
  upper.axis = {0.0, 1.0};
  upper.amplitude = amplitude;
  upper.period = period;
  upper.phase = phase;
  OscillatingBar lower = upper;
  lower.center = {wall_x, gap_center - gap_half - bar_half_h};
  s.obstacles.emplace_back(upper);
  s.obstacles.emplace_back(lower);
}

}  // namespace

Problem free_space() {
  Problem p;
  p.name = "free_space";
  p.scene = square_domain(3.0);
  p.car = CarParams::make(0.07, 0.04, 4.0);
  p.target = {0.5, 0.0, 0.0};
  p.starts = {{-0.5, 0.0, 0.0}};
  return p;
}

Problem point_car_arc() {
  Problem p;
  p.name = "point_car_arc";
  p.scene = square_domain(3.0);
  p.car = CarParams::make(0.0, 0.0, 4.0);
  p.target = {0.25, 0.25, kPi / 2.0};
  p.starts = {{0.0, 0.0, 0.0}};
  return p;
}

Problem rotating_sectors() {
  Problem p;
  p.name = "rotating_sectors";
  p.scene = square_domain(10.0);
  p.car = CarParams::make(0.07, 0.04, 4.0);
  p.target = {0.0, 0.0, kPi};
  p.starts = {{-0.8, -0.8, kPi / 4.0},
              {0.8, -0.8, 3.0 * kPi / 4.0},
              {0.8, 0.8, 5.0 * kPi / 4.0},
              {-0.8, 0.8, 7.0 * kPi / 4.0}};

  // Two slow and two fast sectors; the fast ones run at three times the
  // slow speed. All rotate counterclockwise about the origin. The widths
  // and radii are chosen so that some corner starts have to stop and wait
  // for a sector to pass instead of driving around it.
  const double slow = kPi / 5.0;
  const double fast = 3.0 * slow;
  const double width = 1.35;
  const auto sector = [&](double start, double speed) {
    RotatingAnnularSector s;
    s.center = {0.0, 0.0};
    s.r_inner = 0.30;
    s.r_outer = 0.70;
    s.angle_start = start;
    s.angle_width = width;
    s.angular_speed = speed;
    return s;
  };
  p.scene.obstacles.emplace_back(sector(0.0, slow));
  p.scene.obstacles.emplace_back(sector(kPi, slow));
  p.scene.obstacles.emplace_back(sector(kPi / 2.0, fast));
  p.scene.obstacles.emplace_back(sector(3.0 * kPi / 2.0, fast));
  return p;
}

Problem moving_doors() {
  Problem p;
  p.name = "moving_doors";
  p.scene = square_domain(10.0);
  p.car = CarParams::make(0.07, 0.04, 4.0);
  p.target = {0.8, 0.8, kPi / 4.0};
  p.starts = {{-0.8, -0.8, kPi / 4.0}};
  add_doorway(p.scene, -0.5, -0.30, 0.16, 0.35, 3.0, 0.0);
  add_doorway(p.scene, 0.0, 0.00, 0.16, 0.35, 4.0, 2.0);
  add_doorway(p.scene, 0.5, 0.30, 0.16, 0.35, 3.5, 4.0);
  return p;
}

Problem lane_change() {
  Problem p;
  p.name = "lane_change";
  p.scene = square_domain(10.0);
  p.car = CarParams::make(0.07, 0.04, 4.0);
  // Two cars drive up the left lane; ours starts in the right lane behind
  // the rear one and has to slot into the gap.
  p.target = {-0.2, 0.45, kPi / 2.0};
  p.starts = {{0.2, -0.75, kPi / 2.0}};
  const double T = p.scene.horizon;
  const auto car_obstacle = [&](Vec2 start, double speed_y) {
    MovingRectangle r;
    r.half_width = 0.05;
    r.half_height = 0.08;
    r.waypoints = {{0.0, start}, {T, {start.x, start.y + speed_y * T}}};
    return r;
  };
  p.scene.obstacles.emplace_back(car_obstacle({-0.2, 0.65}, 0.25));   // lead car
  p.scene.obstacles.emplace_back(car_obstacle({-0.2, -0.45}, 0.07));  // trailing car
  return p;
}

Problem static_blocks() {
  Problem p;
  p.name = "static_blocks";
  p.scene = square_domain(6.0);
  p.car = CarParams::make(0.07, 0.04, 4.0);
  p.target = {0.5, 0.0, 0.0};
  p.starts = {{-0.7, -0.6, 0.0}};
  p.scene.obstacles.emplace_back(StaticDisk{{-0.1, 0.15}, 0.22});
  p.scene.obstacles.emplace_back(StaticPolygon{
      {{0.05, -0.75}, {0.35, -0.75}, {0.35, -0.35}, {0.05, -0.35}}});
  return p;
}

std::vector<std::string> builtin_problem_names() {
  return {"free_space", "point_car_arc", "rotating_sectors", "moving_doors",
          "lane_change", "static_blocks"};
}

Problem builtin_problem(const std::string& name) {
  if (name == "free_space") return free_space();
  if (name == "point_car_arc") return point_car_arc();
  if (name == "rotating_sectors") return rotating_sectors();
  if (name == "moving_doors") return moving_doors();
  if (name == "lane_change") return lane_change();
  if (name == "static_blocks") return static_blocks();
  throw std::invalid_argument("unknown built-in problem: " + name);
}

}  // namespace hjbcar
