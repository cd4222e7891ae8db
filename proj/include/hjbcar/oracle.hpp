#pragma once

#include <optional>
#include <vector>

#include "hjbcar/scene.hpp"
#include "hjbcar/types.hpp"

namespace hjbcar {

/// Piecewise-constant control schedule: bang-bang segments with durations.
struct ScheduleSegment {
  ControlPair control;
  double duration = 0.0;
};
using Schedule = std::vector<ScheduleSegment>;

struct OracleParams {
  double substep = 1e-3;            // fixed integration step
  double pos_tol = 0.02;            // arrival tolerances (match the tracer's)
  double ang_tol = 0.1;
  double collision_spacing = 0.02;  // footprint sample spacing
};

struct SimOutcome {
  enum class Status { Arrived, Collided, Exhausted };
  Status status = Status::Exhausted;
  double time = 0.0;  // arrival or collision time; end time otherwise
  Configuration end_state;

  bool arrived() const { return status == Status::Arrived; }
};

/// Integrates the equations of motion along a schedule with a classical
/// fourth-order scheme at the given substep, checking collisions and arrival
/// at every substep. Stops at the horizon.
SimOutcome simulate(const Configuration& start, const Schedule& sched, const Scene& scene,
                    const CarParams& car, const Configuration& target,
                    const OracleParams& params);

struct ShootingResult {
  std::optional<double> best_time;
  Schedule best_schedule;
  long long schedules_tried = 0;

  bool found() const { return best_time.has_value(); }
};

/// Exhaustive search over all schedules of at most `depth` segments with
/// durations drawn from the menu, via depth-first enumeration with an
/// admissible travel-time bound pruning subtrees that cannot beat the
/// incumbent (the returned optimum matches plain enumeration). This is an
/// upper-bound oracle: it claims admissibility, never optimality.
ShootingResult shoot(const Configuration& start, const Configuration& target,
                     const Scene& scene, const CarParams& car, int depth,
                     const std::vector<double>& durations, const OracleParams& params);

}  // namespace hjbcar
