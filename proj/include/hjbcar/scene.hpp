#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hjbcar/grid.hpp"
#include "hjbcar/types.hpp"

namespace hjbcar {

// ---------------------------------------------------------------------------
// Obstacle motion primitives. Every primitive defines a closed point set for
// each time in [0, horizon].

struct StaticPolygon {
  std::vector<Vec2> vertices;  // simple polygon, at least 3 vertices
};

struct StaticDisk {
  Vec2 center;
  double radius = 0.0;
};

/// Annular sector rotating about `center` with constant angular speed
/// (counterclockwise positive). The span at time t starts at
/// angle_start + angular_speed * t.
struct RotatingAnnularSector {
  Vec2 center;
  double r_inner = 0.0;
  double r_outer = 0.0;
  double angle_start = 0.0;
  double angle_width = 0.0;  // in (0, 2*pi)
  double angular_speed = 0.0;
};

/// Axis-aligned rectangle whose center oscillates sinusoidally along `axis`:
/// center(t) = center + amplitude * sin(2*pi*t/period + phase) * axis.
struct OscillatingBar {
  Vec2 center;
  double half_width = 0.0;
  double half_height = 0.0;
  Vec2 axis{0.0, 1.0};  // unit direction
  double amplitude = 0.0;
  double period = 1.0;
  double phase = 0.0;
};

/// Axis-aligned rectangle following a piecewise-linear waypoint schedule
/// (time, center); the position clamps to the first/last waypoint outside the
/// schedule.
struct MovingRectangle {
  double half_width = 0.0;
  double half_height = 0.0;
  std::vector<std::pair<double, Vec2>> waypoints;
};

using Obstacle = std::variant<StaticPolygon, StaticDisk, RotatingAnnularSector,
                              OscillatingBar, MovingRectangle>;

bool obstacle_is_static(const Obstacle& o);
void validate_obstacle(const Obstacle& o);

// ---------------------------------------------------------------------------

/// Time-dependent obstacle set over a rectangular domain.
struct Scene {
  double x_min = -1.0, x_max = 1.0;
  double y_min = -1.0, y_max = 1.0;
  double horizon = 10.0;
  double inflation = 0.0;  // optional safety margin added to every obstacle
  std::vector<Obstacle> obstacles;

  bool in_domain(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  bool is_static() const;
  void validate() const;
};

/// One obstacle's geometry resolved at a fixed time. contains() is trig-free
/// so mask construction can call it millions of times per step.
class ObstacleSnapshot {
 public:
  ObstacleSnapshot(const Obstacle& o, double t, double inflation);

  bool contains(Vec2 p) const;
  Vec2 bound_center() const { return bound_center_; }
  double bound_radius() const { return bound_radius_; }

 private:
  enum class Kind { Polygon, Disk, Sector, Rect } kind_;
  // disk / rect
  Vec2 center_;
  double radius2_ = 0.0;
  double hw_ = 0.0, hh_ = 0.0;
  // sector
  double r2_inner_ = 0.0, r2_outer_ = 0.0;
  Vec2 e0_, e1_;
  bool span_wide_ = false;   // effective width > pi
  bool span_full_ = false;   // effective width >= 2*pi
  // polygon
  std::vector<Vec2> poly_;
  double poly_inflation_ = 0.0;
  // conservative enclosing circle
  Vec2 bound_center_;
  double bound_radius_ = 0.0;
};

/// All obstacles of a scene resolved at time t. Throws if t lies outside
/// [0, horizon].
class SceneSnapshot {
 public:
  SceneSnapshot(const Scene& s, double t);
  bool occupied(Vec2 p) const;
  const std::vector<ObstacleSnapshot>& obstacles() const { return obs_; }

 private:
  std::vector<ObstacleSnapshot> obs_;
};

/// Whether point p lies in any obstacle at time t. Points outside the domain
/// are free by convention: the obstacle set lives inside the domain.
bool occupied(Vec2 p, double t, const Scene& s);

// ---------------------------------------------------------------------------

/// Oriented body rectangle of the car at a configuration, as its four
/// corners (counterclockwise, starting front-left).
struct Footprint {
  std::array<Vec2, 4> corners;
};

Footprint footprint(const Configuration& c, const CarParams& car);

/// Regular sample lattice covering the body rectangle (boundary included)
/// with spacing at most `max_spacing`, plus the center and the four corners.
/// The center comes first so containment tests usually hit early.
class FootprintSampler {
 public:
  FootprintSampler(const CarParams& car, double max_spacing);

  const std::vector<Vec2>& body_frame() const { return pts_; }
  double circumradius() const { return circumradius_; }

  /// Body-frame points rotated by `theta` (not translated).
  std::vector<Vec2> rotated(double theta) const;

 private:
  std::vector<Vec2> pts_;
  double circumradius_ = 0.0;
};

/// Whether the car footprint at configuration c intersects any obstacle at
/// time t, decided by testing the sample lattice. `max_spacing` should be at
/// most half the finest grid spacing the result will be used with.
bool collides(const Configuration& c, double t, const Scene& s, const CarParams& car,
              double max_spacing);

/// Fast path used by the solver and the oracle: snapshot and sampler are
/// built once and reused.
bool collides(Vec2 position, double theta, const SceneSnapshot& snap,
              const FootprintSampler& sampler);

/// mask[g.flat(i,j,k)] = 1 iff the car at node (i,j,k) collides at time t_n.
/// Moving scenes need this recomputed at every time step.
std::vector<std::uint8_t> illegal_mask(const Scene& s, const Grid4& g, int n,
                                       const CarParams& car, int threads = 1);

// ---------------------------------------------------------------------------

/// A full planning problem: scene, vehicle, target configuration and the
/// canonical start configurations. Mirrors the scene file schema.
struct Problem {
  std::string name;
  Scene scene;
  CarParams car;
  Configuration target;
  std::vector<Configuration> starts;
};

}  // namespace hjbcar
