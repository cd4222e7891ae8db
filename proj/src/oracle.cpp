#include "hjbcar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hjbcar/kinematics.hpp"

namespace hjbcar {

namespace {

Configuration rk4_step(const Configuration& c, ControlPair u, const CarParams& car,
                       double h) {
  const auto f = [&](double x, double y, double th) {
    return motion({x, y, th}, u, car);
  };
  const Velocity k1 = f(c.x, c.y, c.theta);
  const Velocity k2 = f(c.x + 0.5 * h * k1.x_dot, c.y + 0.5 * h * k1.y_dot,
                        c.theta + 0.5 * h * k1.theta_dot);
  const Velocity k3 = f(c.x + 0.5 * h * k2.x_dot, c.y + 0.5 * h * k2.y_dot,
                        c.theta + 0.5 * h * k2.theta_dot);
  const Velocity k4 = f(c.x + h * k3.x_dot, c.y + h * k3.y_dot, c.theta + h * k3.theta_dot);
  return {c.x + h / 6.0 * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot),
          c.y + h / 6.0 * (k1.y_dot + 2.0 * k2.y_dot + 2.0 * k3.y_dot + k4.y_dot),
          c.theta + h / 6.0 * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot +
                               k4.theta_dot)};
}

bool near_target(const Configuration& c, const Configuration& target, double pos_tol,
                 double ang_tol) {
  return std::hypot(c.x - target.x, c.y - target.y) <= pos_tol &&
         std::abs(angle_diff(c.theta, target.theta)) <= ang_tol;
}

struct SimContext {
  const Scene& scene;
  const CarParams& car;
  const Configuration& target;
  const OracleParams& params;
  const FootprintSampler sampler;

  SimContext(const Scene& s, const CarParams& c, const Configuration& tg,
             const OracleParams& p)
      : scene(s), car(c), target(tg), params(p), sampler(c, p.collision_spacing) {}

  bool in_collision(const Configuration& c, double t) const {
    if (scene.obstacles.empty()) return false;
    const SceneSnapshot snap(scene, t);
    return collides({c.x, c.y}, c.theta, snap, sampler);
  }
};

/// Integrates one segment from (state, t). Returns Exhausted with the end
/// state if neither arrival nor collision occurred before the segment (or the
/// horizon) ended. When `deadline` is finite the segment is abandoned as
/// Collided-equivalent once no completion can arrive before it (sound: the
/// remaining-time bound is admissible).
SimOutcome run_segment(const SimContext& ctx, Configuration state, double t,
                       ControlPair u, double duration,
                       double deadline = std::numeric_limits<double>::infinity(),
                       const std::function<double(const Configuration&)>* remaining =
                           nullptr) {
  const double horizon = ctx.scene.horizon;
  const double span = std::min(duration, horizon - t);
  if (span <= 0.0) return {SimOutcome::Status::Exhausted, t, state};
  const int substeps = std::max(1, static_cast<int>(std::ceil(span / ctx.params.substep)));
  const double h = span / substeps;
  for (int s = 0; s < substeps; ++s) {
    state = rk4_step(state, u, ctx.car, h);
    state.theta = wrap_angle(state.theta);
    t += h;
    if (ctx.in_collision(state, t)) return {SimOutcome::Status::Collided, t, state};
    if (near_target(state, ctx.target, ctx.params.pos_tol, ctx.params.ang_tol))
      return {SimOutcome::Status::Arrived, t, state};
    if (remaining && (s & 7) == 7 && t + (*remaining)(state) >= deadline)
      return {SimOutcome::Status::Collided, t, state};  // cannot beat the incumbent
  }
  return {SimOutcome::Status::Exhausted, t, state};
}

}  // namespace

SimOutcome simulate(const Configuration& start, const Schedule& sched, const Scene& scene,
                    const CarParams& car, const Configuration& target,
                    const OracleParams& params) {
  if (!(params.substep > 0.0))
    throw std::invalid_argument("simulate: substep must be > 0");
  const SimContext ctx(scene, car, target, params);

  if (ctx.in_collision(start, 0.0)) return {SimOutcome::Status::Collided, 0.0, start};
  if (near_target(start, target, params.pos_tol, params.ang_tol))
    return {SimOutcome::Status::Arrived, 0.0, start};

  Configuration state = start;
  double t = 0.0;
  for (const ScheduleSegment& seg : sched) {
    if (seg.duration < 0.0)
      throw std::invalid_argument("simulate: segment durations must be >= 0");
    const SimOutcome out = run_segment(ctx, state, t, seg.control, seg.duration);
    if (out.status != SimOutcome::Status::Exhausted) return out;
    state = out.end_state;
    t = out.time;
    if (t >= scene.horizon) break;
  }
  return {SimOutcome::Status::Exhausted, t, state};
}

ShootingResult shoot(const Configuration& start, const Configuration& target,
                     const Scene& scene, const CarParams& car, int depth,
                     const std::vector<double>& durations, const OracleParams& params) {
  if (depth < 1) throw std::invalid_argument("shoot: depth must be >= 1");
  if (durations.empty()) throw std::invalid_argument("shoot: empty duration menu");
  const SimContext ctx(scene, car, target, params);
  ShootingResult result;

  if (ctx.in_collision(start, 0.0)) return result;
  if (near_target(start, target, params.pos_tol, params.ang_tol)) {
    result.best_time = 0.0;
    return result;
  }

  // Admissible remaining-time bound from the planar speed and turning limits.
  const double planar_vmax = std::sqrt(1.0 + car.W * car.d * car.W * car.d);
  const auto lower_bound = [&](const Configuration& c) {
    const double dp = std::hypot(c.x - target.x, c.y - target.y);
    const double da = std::abs(angle_diff(c.theta, target.theta));
    return std::max({0.0, (dp - params.pos_tol) / planar_vmax,
                     (da - params.ang_tol) / car.W});
  };

  // Exploration order only affects how fast an incumbent appears (driving
  // segments first, shorter durations first); the admissible bound makes the
  // result identical to plain enumeration over the same menu.
  constexpr std::array<ControlPair, 7> explore_order = {
      {{1, 0}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}, {-1, 0}, {0, 0}}};
  std::vector<double> menu = durations;
  std::sort(menu.begin(), menu.end());
  const std::function<double(const Configuration&)> remaining = lower_bound;

  double best = scene.horizon + 1.0;
  Schedule prefix;
  const auto dfs = [&](auto&& self, const Configuration& state, double t,
                       int segments_left) -> void {
    if (segments_left == 0) return;
    for (const ControlPair u : explore_order) {
      for (const double q : menu) {
        // The bound depends only on (state, t), so once it fails the whole
        // node is dead, including all remaining control/duration branches.
        if (t + lower_bound(state) >= best) return;
        ++result.schedules_tried;
        const SimOutcome out = run_segment(ctx, state, t, u, q, best, &remaining);
        prefix.push_back({u, q});
        if (out.status == SimOutcome::Status::Arrived && out.time < best) {
          best = out.time;
          result.best_time = best;
          result.best_schedule = prefix;
        } else if (out.status == SimOutcome::Status::Exhausted &&
                   out.time < scene.horizon) {
          self(self, out.end_state, out.time, segments_left - 1);
        }
        prefix.pop_back();
      }
    }
  };
  dfs(dfs, start, 0.0, depth);
  return result;
}

}  // namespace hjbcar
