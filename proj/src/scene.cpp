#include "hjbcar/scene.hpp"

#include <algorithm>
#include <cmath>

#include "hjbcar/parallel.hpp"

namespace hjbcar {

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return dist(p, a);
  double s = dot(p - a, ab) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return dist(p, a + s * ab);
}

/// Even-odd crossing test; points within `pad` of an edge count as inside,
/// which also makes the boundary closed.
bool polygon_contains(const std::vector<Vec2>& v, Vec2 p, double pad) {
  bool inside = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross =
          v[j].x + (p.y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
      if (p.x < x_cross) inside = !inside;
    }
  }
  if (inside) return true;
  const double eps = std::max(pad, 1e-12);
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (segment_distance(p, v[j], v[i]) <= eps) return true;
  }
  return false;
}

Vec2 rect_center_at(const MovingRectangle& r, double t) {
  const auto& wp = r.waypoints;
  if (t <= wp.front().first) return wp.front().second;
  if (t >= wp.back().first) return wp.back().second;
  for (std::size_t i = 1; i < wp.size(); ++i) {
    if (t <= wp[i].first) {
      const double span = wp[i].first - wp[i - 1].first;
      const double s = span > 0.0 ? (t - wp[i - 1].first) / span : 1.0;
      return wp[i - 1].second + s * (wp[i].second - wp[i - 1].second);
    }
  }
  return wp.back().second;
}

Vec2 bar_center_at(const OscillatingBar& b, double t) {
  const double s = b.amplitude * std::sin(kTwoPi * t / b.period + b.phase);
  return b.center + s * b.axis;
}

}  // namespace

bool obstacle_is_static(const Obstacle& o) {
  return std::visit(
      [](const auto& ob) -> bool {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, StaticPolygon> || std::is_same_v<T, StaticDisk>) {
          return true;
        } else if constexpr (std::is_same_v<T, RotatingAnnularSector>) {
          return ob.angular_speed == 0.0;
        } else if constexpr (std::is_same_v<T, OscillatingBar>) {
          return ob.amplitude == 0.0;
        } else {
          static_assert(std::is_same_v<T, MovingRectangle>);
          for (const auto& [t, c] : ob.waypoints)
            if (c.x != ob.waypoints.front().second.x || c.y != ob.waypoints.front().second.y)
              return false;
          return true;
        }
      },
      o);
}

void validate_obstacle(const Obstacle& o) {
  std::visit(
      [](const auto& ob) {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, StaticPolygon>) {
          if (ob.vertices.size() < 3)
            throw std::invalid_argument("static_polygon: needs at least 3 vertices");
        } else if constexpr (std::is_same_v<T, StaticDisk>) {
          if (!(ob.radius > 0.0))
            throw std::invalid_argument("static_disk: radius must be > 0");
        } else if constexpr (std::is_same_v<T, RotatingAnnularSector>) {
          if (!(ob.r_inner >= 0.0) || !(ob.r_outer > ob.r_inner))
            throw std::invalid_argument(
                "rotating_annular_sector: need 0 <= r_inner < r_outer");
          if (!(ob.angle_width > 0.0) || !(ob.angle_width < kTwoPi))
            throw std::invalid_argument(
                "rotating_annular_sector: angle_width must lie in (0, 2*pi)");
        } else if constexpr (std::is_same_v<T, OscillatingBar>) {
          if (!(ob.half_width > 0.0) || !(ob.half_height > 0.0))
            throw std::invalid_argument("oscillating_bar: half extents must be > 0");
          if (!(ob.period > 0.0))
            throw std::invalid_argument("oscillating_bar: period must be > 0");
          if (norm(ob.axis) == 0.0)
            throw std::invalid_argument("oscillating_bar: axis must be nonzero");
        } else {
          static_assert(std::is_same_v<T, MovingRectangle>);
          if (!(ob.half_width > 0.0) || !(ob.half_height > 0.0))
            throw std::invalid_argument("moving_rectangle: half extents must be > 0");
          if (ob.waypoints.empty())
            throw std::invalid_argument("moving_rectangle: needs at least one waypoint");
          for (std::size_t i = 1; i < ob.waypoints.size(); ++i)
            if (!(ob.waypoints[i].first > ob.waypoints[i - 1].first))
              throw std::invalid_argument(
                  "moving_rectangle: waypoint times must be strictly increasing");
        }
      },
      o);
}

bool Scene::is_static() const {
  return std::all_of(obstacles.begin(), obstacles.end(), obstacle_is_static);
}

void Scene::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min))
    throw std::invalid_argument("Scene: empty domain");
  if (!(horizon > 0.0)) throw std::invalid_argument("Scene: horizon must be > 0");
  if (inflation < 0.0) throw std::invalid_argument("Scene: inflation must be >= 0");
  for (const auto& o : obstacles) validate_obstacle(o);
}

// ---------------------------------------------------------------------------

ObstacleSnapshot::ObstacleSnapshot(const Obstacle& o, double t, double inflation) {
  std::visit(
      [&](const auto& ob) {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, StaticPolygon>) {
          kind_ = Kind::Polygon;
          poly_ = ob.vertices;
          poly_inflation_ = inflation;
          Vec2 lo = poly_[0], hi = poly_[0];
          for (const Vec2& v : poly_) {
            lo.x = std::min(lo.x, v.x);
            lo.y = std::min(lo.y, v.y);
            hi.x = std::max(hi.x, v.x);
            hi.y = std::max(hi.y, v.y);
          }
          bound_center_ = 0.5 * (lo + hi);
          bound_radius_ = 0.5 * dist(lo, hi) + inflation;
        } else if constexpr (std::is_same_v<T, StaticDisk>) {
          kind_ = Kind::Disk;
          center_ = ob.center;
          const double r = ob.radius + inflation;
          radius2_ = r * r;
          bound_center_ = center_;
          bound_radius_ = r;
        } else if constexpr (std::is_same_v<T, RotatingAnnularSector>) {
          kind_ = Kind::Sector;
          center_ = ob.center;
          const double ri = std::max(0.0, ob.r_inner - inflation);
          const double ro = ob.r_outer + inflation;
          r2_inner_ = ri * ri;
          r2_outer_ = ro * ro;
          const double dw =
              inflation > 0.0 ? inflation / std::max(ob.r_inner, 1e-9) : 0.0;
          const double width = std::min(kTwoPi, ob.angle_width + 2.0 * dw);
          const double start = ob.angle_start + ob.angular_speed * t - dw;
          span_full_ = width >= kTwoPi;
          span_wide_ = width > kTwoPi / 2.0;
          e0_ = {std::cos(start), std::sin(start)};
          e1_ = {std::cos(start + width), std::sin(start + width)};
          bound_center_ = center_;
          bound_radius_ = ro;
        } else if constexpr (std::is_same_v<T, OscillatingBar>) {
          kind_ = Kind::Rect;
          center_ = bar_center_at(ob, t);
          hw_ = ob.half_width + inflation;
          hh_ = ob.half_height + inflation;
          bound_center_ = center_;
          bound_radius_ = std::hypot(hw_, hh_);
        } else {
          static_assert(std::is_same_v<T, MovingRectangle>);
          kind_ = Kind::Rect;
          center_ = rect_center_at(ob, t);
          hw_ = ob.half_width + inflation;
          hh_ = ob.half_height + inflation;
          bound_center_ = center_;
          bound_radius_ = std::hypot(hw_, hh_);
        }
      },
      o);
}

bool ObstacleSnapshot::contains(Vec2 p) const {
  switch (kind_) {
    case Kind::Disk: {
      const Vec2 r = p - center_;
      return dot(r, r) <= radius2_;
    }
    case Kind::Rect:
      return std::abs(p.x - center_.x) <= hw_ && std::abs(p.y - center_.y) <= hh_;
    case Kind::Sector: {
      const Vec2 r = p - center_;
      const double r2 = dot(r, r);
      if (r2 < r2_inner_ || r2 > r2_outer_) return false;
      if (span_full_) return true;
      if (!span_wide_) return cross(e0_, r) >= 0.0 && cross(r, e1_) >= 0.0;
      // Wide span: the complement span (e1 -> e0) is narrow.
      return !(cross(e1_, r) > 0.0 && cross(r, e0_) > 0.0);
    }
    case Kind::Polygon:
      return polygon_contains(poly_, p, poly_inflation_);
  }
  return false;
}

SceneSnapshot::SceneSnapshot(const Scene& s, double t) {
  const double slack = 1e-9 * std::max(1.0, s.horizon);
  if (t < -slack || t > s.horizon + slack)
    throw std::out_of_range("SceneSnapshot: time outside [0, horizon]");
  obs_.reserve(s.obstacles.size());
  for (const auto& o : s.obstacles) obs_.emplace_back(o, t, s.inflation);
}

bool SceneSnapshot::occupied(Vec2 p) const {
  for (const auto& ob : obs_)
    if (ob.contains(p)) return true;
  return false;
}

bool occupied(Vec2 p, double t, const Scene& s) {
  if (!s.in_domain(p.x, p.y)) return false;
  return SceneSnapshot(s, t).occupied(p);
}

// ---------------------------------------------------------------------------

Footprint footprint(const Configuration& c, const CarParams& car) {
  const double ct = std::cos(c.theta);
  const double st = std::sin(c.theta);
  const double hl = car.body_half_length;
  const double hw = car.body_half_width;
  const auto place = [&](double u, double v) -> Vec2 {
    return {c.x + u * ct - v * st, c.y + u * st + v * ct};
  };
  return {{place(hl, hw), place(-hl, hw), place(-hl, -hw), place(hl, -hw)}};
}

FootprintSampler::FootprintSampler(const CarParams& car, double max_spacing) {
  if (!(max_spacing > 0.0))
    throw std::invalid_argument("FootprintSampler: max_spacing must be > 0");
  const double hl = car.body_half_length;
  const double hw = car.body_half_width;
  circumradius_ = std::hypot(hl, hw);

  const auto axis_coords = [&](double half) {
    std::vector<double> c;
    if (half <= 0.0) {
      c.push_back(0.0);
      return c;
    }
    const int cells = std::max(1, static_cast<int>(std::ceil(2.0 * half / max_spacing)));
    c.reserve(cells + 1);
    for (int i = 0; i <= cells; ++i) c.push_back(-half + 2.0 * half * i / cells);
    return c;
  };

  const auto push_unique = [&](Vec2 p) {
    for (const Vec2& q : pts_)
      if (q.x == p.x && q.y == p.y) return;
    pts_.push_back(p);
  };

  push_unique({0.0, 0.0});
  push_unique({hl, hw});
  push_unique({-hl, hw});
  push_unique({-hl, -hw});
  push_unique({hl, -hw});
  for (double u : axis_coords(hl))
    for (double v : axis_coords(hw)) push_unique({u, v});
}

std::vector<Vec2> FootprintSampler::rotated(double theta) const {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  std::vector<Vec2> out;
  out.reserve(pts_.size());
  for (const Vec2& p : pts_)
    out.push_back({p.x * ct - p.y * st, p.x * st + p.y * ct});
  return out;
}

namespace {

bool any_sample_occupied(Vec2 position, const std::vector<Vec2>& offsets,
                         double circumradius, const SceneSnapshot& snap) {
  for (const auto& obs : snap.obstacles()) {
    const double reach = obs.bound_radius() + circumradius;
    const Vec2 d = position - obs.bound_center();
    if (dot(d, d) > reach * reach) continue;
    for (const Vec2& off : offsets)
      if (obs.contains(position + off)) return true;
  }
  return false;
}

}  // namespace

bool collides(Vec2 position, double theta, const SceneSnapshot& snap,
              const FootprintSampler& sampler) {
  return any_sample_occupied(position, sampler.rotated(theta),
                             sampler.circumradius(), snap);
}

bool collides(const Configuration& c, double t, const Scene& s, const CarParams& car,
              double max_spacing) {
  const SceneSnapshot snap(s, t);
  const FootprintSampler sampler(car, max_spacing);
  return collides({c.x, c.y}, c.theta, snap, sampler);
}

std::vector<std::uint8_t> illegal_mask(const Scene& s, const Grid4& g, int n,
                                       const CarParams& car, int threads) {
  if (n < 0 || n > g.N()) throw std::out_of_range("illegal_mask: time index out of range");
  const SceneSnapshot snap(s, g.time_of(n));
  const FootprintSampler sampler(car, 0.5 * std::min(g.dx(), g.dy()));

  const int K = g.K();
  std::vector<std::vector<Vec2>> offsets(K);
  for (int k = 0; k < K; ++k) offsets[k] = sampler.rotated(k * g.dtheta());

  std::vector<std::uint8_t> mask(g.slice_size(), 0);
  if (snap.obstacles().empty()) return mask;

  parallel_for(0, g.I() + 1, threads, [&](int i_lo, int i_hi) {
    for (int i = i_lo; i < i_hi; ++i) {
      for (int j = 0; j <= g.J(); ++j) {
        const Vec2 p{g.x_min() + i * g.dx(), g.y_min() + j * g.dy()};
        const std::size_t base = g.flat(i, j, 0);
        for (int k = 0; k < K; ++k) {
          mask[base + k] =
              any_sample_occupied(p, offsets[k], sampler.circumradius(), snap) ? 1 : 0;
        }
      }
    }
  });
  return mask;
}

}  // namespace hjbcar
