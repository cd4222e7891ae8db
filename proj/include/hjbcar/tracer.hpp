#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjbcar/solver.hpp"

namespace hjbcar {

/// Trajectory extraction knobs. Zeros mean "derive from the value function":
/// the step defaults to the stored-slice interval, the halting tolerances to
/// 1.5 grid cells, and the step budget to the horizon.
struct TracerParams {
  double delta = 0.0;      // semi-Lagrangian step
  double pos_tol = 0.0;    // arrival tolerance, Euclidean position
  double ang_tol = 0.0;    // arrival tolerance, heading
  int max_steps = 0;

  TracerParams resolved(const ValueFunction& vf) const;
};

struct TrajectorySample {
  double x = 0.0, y = 0.0, theta = 0.0, t = 0.0;
  int v = 0, w = 0;  // control applied over [t, t + delta)
};

struct Trajectory {
  Configuration start;
  std::vector<TrajectorySample> samples;  // empty iff the start already arrives
  std::optional<double> arrival_time;
  double delta = 0.0;

  bool arrived() const { return arrival_time.has_value(); }
  double duration() const { return arrival_time.value_or(samples.empty() ? 0.0 : samples.back().t); }
};

/// Follows the steepest descent of the interpolated travel time over the
/// seven control pairs, advancing by Euler steps of length delta, until the
/// state is within tolerance of the target or the step budget runs out.
/// Throws if the start is in collision or its travel time is not below the
/// horizon.
Trajectory trace(const ValueFunction& vf, const Configuration& start, const Scene& scene,
                 const CarParams& car, TracerParams params = {});

struct ValidationReport {
  bool pass = true;
  std::string message;           // first violation, empty when pass
  double violation_time = -1.0;
};

/// Post-hoc trajectory checks: collision freedom at `oversample` times the
/// sample rate, Euler consistency of consecutive samples, and the angular
/// velocity bound.
ValidationReport validate_trajectory(const Trajectory& tr, const Scene& scene,
                                     const CarParams& car, int oversample,
                                     double collision_spacing);

struct GradientDiagnostic {
  int samples = 0;
  int mismatches = 0;
  int inadmissible = 0;  // gradient formula suggested (0, +/-1)
  double mismatch_rate() const {
    return samples > 0 ? static_cast<double>(mismatches) / samples : 0.0;
  }
};

/// Compares the gradient-sign control formula (central differences of the
/// interpolated field) with the controls the tracer actually chose. Kinks
/// make local disagreement legitimate, so the rate is reported, not asserted.
GradientDiagnostic compare_gradient_controls(const ValueFunction& vf,
                                             const Trajectory& tr,
                                             const CarParams& car);

}  // namespace hjbcar
