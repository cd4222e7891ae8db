#pragma once

#include "hjbcar/types.hpp"

namespace hjbcar {

struct Velocity {
  double x_dot = 0.0;
  double y_dot = 0.0;
  double theta_dot = 0.0;
};

/// Planar velocity components for heading `theta` under control `u`. These
/// expressions double as the upwind coefficients A and B, so the coefficient
/// table and the equations of motion agree bit for bit.
inline void planar_velocity(double theta, ControlPair u, const CarParams& car,
                            double& A, double& B) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  A = u.v * ct - u.w * car.W * car.d * st;
  B = u.v * st + u.w * car.W * car.d * ct;
}

/// Equations of motion of the kinematic car model.
inline Velocity motion(const Configuration& c, ControlPair u, const CarParams& car) {
  double A, B;
  planar_velocity(c.theta, u, car, A, B);
  return {A, B, u.w * car.W};
}

/// Euler step of the equations of motion; the heading is re-wrapped.
inline Configuration euler_step(const Configuration& c, ControlPair u,
                                const CarParams& car, double h) {
  const Velocity f = motion(c, u, car);
  return {c.x + h * f.x_dot, c.y + h * f.y_dot, c.theta + h * f.theta_dot};
}

/// Upwind coefficients and their signs for one heading node and control pair.
struct UpwindCoeffs {
  double A = 0.0;
  int a = 0;
  double B = 0.0;
  int b = 0;
};

inline UpwindCoeffs upwind_coeffs(double theta_k, ControlPair u, const CarParams& car) {
  double A, B;
  planar_velocity(theta_k, u, car, A, B);
  return {A, sign_of(A), B, sign_of(B)};
}

/// Control pair recovered from the value-function gradient via the sign
/// formulas. A result with v = 0 and w != 0 cannot be realized by the
/// seven-pair controller and is flagged inadmissible; it is only ever used
/// for diagnostics.
struct GradientControls {
  int v = 0;
  int w = 0;
  bool admissible = true;
};

inline GradientControls controls_from_gradient(double u_x, double u_y, double u_theta,
                                               double theta, const CarParams& car) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const int v = -sign_of(u_x * ct + u_y * st);
  const int w = -sign_of(-car.d * u_x * st + car.d * u_y * ct + u_theta);
  return {v, w, !(v == 0 && w != 0)};
}

}  // namespace hjbcar
