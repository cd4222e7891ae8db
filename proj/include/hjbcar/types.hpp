#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace hjbcar {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod(-eps) + 2*pi can round up to exactly 2*pi
  return r;
}

/// Signed angular difference a - b wrapped into (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = wrap_angle(a - b);
  if (d > kTwoPi / 2.0) d -= kTwoPi;
  return d;
}

/// sign(x) with sign(0) = 0.
inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Vehicle geometry and angular-velocity bound.
///
/// d is the distance from the rear axle to the center of mass, R the half
/// width of the rear axle, and W the bound on |theta_dot|. The body rectangle
/// is centered on the center of mass; the default body has half-length d and
/// half-width R, which puts the rear axle on the rear edge.
struct CarParams {
  double d = 0.07;
  double R = 0.04;
  double W = 4.0;
  double body_half_length = 0.07;
  double body_half_width = 0.04;

  static CarParams make(double d, double R, double W) {
    CarParams c{d, R, W, d, R};
    c.validate();
    return c;
  }

  void validate() const {
    if (!(d >= 0.0) || !(R >= 0.0))
      throw std::invalid_argument("CarParams: d and R must be >= 0");
    if (!(W > 0.0)) throw std::invalid_argument("CarParams: W must be > 0");
    if (body_half_length < d || body_half_width < R)
      throw std::invalid_argument(
          "CarParams: body rectangle must contain the axle and center of mass");
  }
};

/// Tangential / angular control pair, both in {-1, 0, +1}. Turning in place
/// is impossible for a car, so (0, +/-1) is not admissible.
struct ControlPair {
  int v = 0;
  int w = 0;
  bool operator==(const ControlPair&) const = default;
};

/// The seven admissible pairs in fixed enumeration order; argmin ties are
/// always broken by first occurrence so runs are reproducible.
inline constexpr std::array<ControlPair, 7> kControlPairs = {
    {{0, 0}, {1, 0}, {-1, 0}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

inline bool is_admissible(ControlPair u) {
  return u.v >= -1 && u.v <= 1 && u.w >= -1 && u.w <= 1 && !(u.v == 0 && u.w != 0);
}

/// A car configuration (x, y, heading). The heading is stored wrapped to
/// [0, 2*pi).
struct Configuration {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Configuration() = default;
  Configuration(double x_, double y_, double theta_)
      : x(x_), y(y_), theta(wrap_angle(theta_)) {}
};

}  // namespace hjbcar
