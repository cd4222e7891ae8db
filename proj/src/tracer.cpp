#include "hjbcar/tracer.hpp"

#include <algorithm>
#include <cmath>

#include "hjbcar/kinematics.hpp"

namespace hjbcar {

TracerParams TracerParams::resolved(const ValueFunction& vf) const {
  const Grid4& g = vf.grid();
  TracerParams p = *this;
  if (p.delta <= 0.0) p.delta = vf.stride() * g.dt();
  if (p.pos_tol <= 0.0) p.pos_tol = 1.5 * std::max(g.dx(), g.dy());
  if (p.ang_tol <= 0.0) p.ang_tol = 1.5 * g.dtheta();
  if (p.max_steps <= 0)
    p.max_steps = static_cast<int>(std::ceil(g.T() / p.delta));
  return p;
}

namespace {

bool within_tolerance(const Configuration& c, const Configuration& target,
                      double pos_tol, double ang_tol) {
  const double dp = std::hypot(c.x - target.x, c.y - target.y);
  return dp <= pos_tol && std::abs(angle_diff(c.theta, target.theta)) <= ang_tol;
}

}  // namespace

Trajectory trace(const ValueFunction& vf, const Configuration& start, const Scene& scene,
                 const CarParams& car, TracerParams params) {
  const Grid4& g = vf.grid();
  const TracerParams p = params.resolved(vf);
  const Configuration target = vf.target_config();
  const double M = vf.sentinel();

  const double spacing = 0.5 * std::min(g.dx(), g.dy());
  if (!g.in_domain(start.x, start.y))
    throw std::invalid_argument("trace: start outside the domain");
  if (collides(start, 0.0, scene, car, spacing))
    throw std::invalid_argument("trace: start is in collision at t = 0");
  if (vf.interpolate(start.x, start.y, start.theta, 0.0) >= g.T())
    throw std::invalid_argument("trace: start has no admissible plan (value >= T)");

  Trajectory tr;
  tr.start = start;
  tr.delta = p.delta;

  Configuration state = start;
  for (int step = 0; step <= p.max_steps; ++step) {
    const double t = step * p.delta;
    if (within_tolerance(state, target, p.pos_tol, p.ang_tol)) {
      if (step > 0)
        tr.samples.push_back({state.x, state.y, state.theta, t, 0, 0});
      tr.arrival_time = t;
      break;
    }
    if (step == p.max_steps || t >= g.T()) {
      tr.samples.push_back({state.x, state.y, state.theta, t, 0, 0});
      break;  // budget exhausted: partial path, no arrival
    }

    // Pick the pair whose Euler-advanced state has the smallest value; ties
    // fall to the earliest pair, so waiting wins when nothing helps.
    ControlPair best = kControlPairs[0];
    double best_value = M;
    const double t_eval = std::min(t, g.T());
    for (const ControlPair u : kControlPairs) {
      const Configuration next = euler_step(state, u, car, p.delta);
      double value = M;
      if (g.in_domain(next.x, next.y))
        value = vf.interpolate(next.x, next.y, next.theta, t_eval);
      if (value < best_value) {
        best_value = value;
        best = u;
      }
    }
    tr.samples.push_back({state.x, state.y, state.theta, t, best.v, best.w});
    state = euler_step(state, best, car, p.delta);
  }
  return tr;
}

ValidationReport validate_trajectory(const Trajectory& tr, const Scene& scene,
                                     const CarParams& car, int oversample,
                                     double collision_spacing) {
  ValidationReport rep;
  const auto fail = [&](double t, const std::string& msg) {
    rep.pass = false;
    rep.violation_time = t;
    rep.message = msg;
    return rep;
  };
  if (tr.samples.empty()) return rep;

  const FootprintSampler sampler(car, collision_spacing);
  const int over = std::max(1, oversample);

  for (std::size_t s = 0; s + 1 < tr.samples.size(); ++s) {
    const TrajectorySample& a = tr.samples[s];
    const TrajectorySample& b = tr.samples[s + 1];
    const double h = b.t - a.t;
    if (!(h > 0.0)) return fail(a.t, "non-increasing sample times");

    // Samples must be exact Euler steps of the recorded control.
    const Configuration expect =
        euler_step({a.x, a.y, a.theta}, {a.v, a.w}, car, h);
    const double tol = 1e-9;
    if (std::abs(expect.x - b.x) > tol || std::abs(expect.y - b.y) > tol ||
        std::abs(angle_diff(expect.theta, b.theta)) > tol)
      return fail(b.t, "sample " + std::to_string(s + 1) +
                           " is not the Euler image of its predecessor");

    const double dtheta = a.w * car.W * h;  // realized heading increment
    if (std::abs(dtheta) / h > car.W * (1.0 + 1e-9))
      return fail(b.t, "angular velocity bound exceeded");

    for (int q = 0; q < over; ++q) {
      const double frac = static_cast<double>(q) / over;
      const double t = a.t + frac * h;
      const Vec2 pos{a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y)};
      const double theta = wrap_angle(a.theta + frac * dtheta);
      const SceneSnapshot snap(scene, t);
      if (collides(pos, theta, snap, sampler))
        return fail(t, "collision at t = " + std::to_string(t));
    }
  }
  const TrajectorySample& last = tr.samples.back();
  const SceneSnapshot snap(scene, last.t);
  if (collides({last.x, last.y}, last.theta, snap, sampler))
    return fail(last.t, "collision at final sample");
  return rep;
}

GradientDiagnostic compare_gradient_controls(const ValueFunction& vf,
                                             const Trajectory& tr,
                                             const CarParams& car) {
  GradientDiagnostic diag;
  const Grid4& g = vf.grid();
  const double M = vf.sentinel();
  for (const TrajectorySample& s : tr.samples) {
    if (s.v == 0 && s.w == 0) continue;  // waiting has no descent direction
    const auto probe = [&](double x, double y, double th) -> double {
      if (!g.in_domain(x, y)) return M;
      return vf.interpolate(x, y, th, s.t);
    };
    const double xp = probe(s.x + g.dx(), s.y, s.theta);
    const double xm = probe(s.x - g.dx(), s.y, s.theta);
    const double yp = probe(s.x, s.y + g.dy(), s.theta);
    const double ym = probe(s.x, s.y - g.dy(), s.theta);
    const double tp = probe(s.x, s.y, s.theta + g.dtheta());
    const double tm = probe(s.x, s.y, s.theta - g.dtheta());
    if (xp >= M || xm >= M || yp >= M || ym >= M || tp >= M || tm >= M) continue;
    const double ux = (xp - xm) / (2.0 * g.dx());
    const double uy = (yp - ym) / (2.0 * g.dy());
    const double ut = (tp - tm) / (2.0 * g.dtheta());
    const GradientControls gc = controls_from_gradient(ux, uy, ut, s.theta, car);
    ++diag.samples;
    if (!gc.admissible) ++diag.inadmissible;
    if (gc.v != s.v || gc.w != s.w) ++diag.mismatches;
  }
  return diag;
}

}  // namespace hjbcar
