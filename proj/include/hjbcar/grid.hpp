#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "hjbcar/types.hpp"

namespace hjbcar {

/// Largest time step for which the explicit upwind update stays monotone on
/// the given spacings.
inline double cfl_max_dt(double dx, double dy, double dtheta, const CarParams& car) {
  if (!(dx > 0.0 && dy > 0.0 && dtheta > 0.0))
    throw std::invalid_argument("cfl_max_dt: spacings must be positive");
  const double s = 1.0 + car.W * car.d;
  return 1.0 / (s / dx + s / dy + car.W / dtheta);
}

/// Grid node index. i in [0, I], j in [0, J], k in [0, K-1] with modular
/// arithmetic, n in [0, N]; n = -1 marks a spatial-only index.
struct NodeIndex {
  int i = 0;
  int j = 0;
  int k = 0;
  int n = -1;
  bool operator==(const NodeIndex&) const = default;
};

/// Uniform discretization of [x_min,x_max] x [y_min,y_max] x [0,2*pi) x [0,T].
///
/// I, J, K, N are cell counts: the spatial axes carry I+1 and J+1 nodes, the
/// heading axis carries K distinct nodes (node K is identified with node 0),
/// and time carries N+1 levels.
class Grid4 {
 public:
  /// Chooses N from the CFL bound scaled by `cfl_safety`, then sets
  /// dt = T / N so the last step lands exactly on the horizon.
  static Grid4 make(double x_min, double x_max, double y_min, double y_max,
                    int cells_x, int cells_y, int cells_theta, double horizon,
                    const CarParams& car, double cfl_safety = 0.9) {
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
      throw std::invalid_argument("Grid4: cfl_safety must lie in (0, 1]");
    Grid4 g(x_min, x_max, y_min, y_max, cells_x, cells_y, cells_theta, horizon);
    const double bound = cfl_max_dt(g.dx_, g.dy_, g.dtheta_, car);
    g.steps_ = static_cast<int>(std::ceil(horizon / (cfl_safety * bound)));
    if (g.steps_ < 1) g.steps_ = 1;
    g.dt_ = horizon / g.steps_;
    if (g.dt_ > bound)
      throw std::invalid_argument("Grid4: derived time step violates the CFL bound");
    return g;
  }

  /// Explicit step count; rejected outright if it violates the CFL bound.
  static Grid4 with_steps(double x_min, double x_max, double y_min, double y_max,
                          int cells_x, int cells_y, int cells_theta, double horizon,
                          int steps, const CarParams& car) {
    Grid4 g(x_min, x_max, y_min, y_max, cells_x, cells_y, cells_theta, horizon);
    if (steps < 1) throw std::invalid_argument("Grid4: steps must be >= 1");
    g.steps_ = steps;
    g.dt_ = horizon / steps;
    const double bound = cfl_max_dt(g.dx_, g.dy_, g.dtheta_, car);
    if (g.dt_ > bound)
      throw std::invalid_argument(
          "Grid4: dt = " + std::to_string(g.dt_) +
          " exceeds the CFL bound " + std::to_string(bound));
    return g;
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  int I() const { return cells_x_; }
  int J() const { return cells_y_; }
  int K() const { return cells_theta_; }
  int N() const { return steps_; }
  double T() const { return horizon_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double dtheta() const { return dtheta_; }
  double dt() const { return dt_; }

  std::size_t slice_size() const {
    return static_cast<std::size_t>(cells_x_ + 1) * (cells_y_ + 1) * cells_theta_;
  }

  /// Row-major (i, j, k) flattening, k fastest.
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * (cells_y_ + 1) + j) * cells_theta_ + k;
  }

  bool in_domain(double x, double y) const {
    return x >= x_min_ && x <= x_max_ && y >= y_min_ && y <= y_max_;
  }

  bool is_spatial_boundary(int i, int j) const {
    return i == 0 || i == cells_x_ || j == 0 || j == cells_y_;
  }

  int wrap_k(int k) const {
    int m = k % cells_theta_;
    return m < 0 ? m + cells_theta_ : m;
  }

  /// Time of level n; exact at both endpoints.
  double time_of(int n) const { return horizon_ * static_cast<double>(n) / steps_; }

  Configuration node_config(int i, int j, int k) const {
    return {x_min_ + i * dx_, y_min_ + j * dy_, k * dtheta_};
  }

  std::pair<Configuration, double> node_to_config(const NodeIndex& idx) const {
    if (idx.i < 0 || idx.i > cells_x_ || idx.j < 0 || idx.j > cells_y_)
      throw std::out_of_range("node_to_config: spatial index out of range");
    if (idx.k < 0 || idx.k >= cells_theta_)
      throw std::out_of_range("node_to_config: heading index out of range (reduce mod K)");
    if (idx.n < 0 || idx.n > steps_)
      throw std::out_of_range("node_to_config: time index out of range");
    return {node_config(idx.i, idx.j, idx.k), time_of(idx.n)};
  }

  /// Nearest grid node per axis; midpoints break toward the lower index and
  /// the heading snaps modulo 2*pi. Rejects configurations outside the domain.
  NodeIndex snap_config(const Configuration& c) const {
    if (!in_domain(c.x, c.y))
      throw std::out_of_range("snap_config: configuration outside the domain");
    const auto snap_axis = [](double s, int cells) {
      int i = static_cast<int>(std::ceil(s - 0.5));
      if (i < 0) i = 0;
      if (i > cells) i = cells;
      return i;
    };
    NodeIndex idx;
    idx.i = snap_axis((c.x - x_min_) / dx_, cells_x_);
    idx.j = snap_axis((c.y - y_min_) / dy_, cells_y_);
    idx.k = wrap_k(static_cast<int>(std::ceil(wrap_angle(c.theta) / dtheta_ - 0.5)));
    idx.n = -1;
    return idx;
  }

 private:
  Grid4(double x_min, double x_max, double y_min, double y_max, int cells_x,
        int cells_y, int cells_theta, double horizon)
      : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max),
        cells_x_(cells_x), cells_y_(cells_y), cells_theta_(cells_theta),
        horizon_(horizon) {
    if (!(x_max > x_min) || !(y_max > y_min))
      throw std::invalid_argument("Grid4: empty spatial domain");
    if (cells_x < 2 || cells_y < 2)
      throw std::invalid_argument("Grid4: need at least 2 cells per spatial axis");
    if (cells_theta < 4)
      throw std::invalid_argument("Grid4: need at least 4 heading cells");
    if (!(horizon > 0.0)) throw std::invalid_argument("Grid4: horizon must be > 0");
    dx_ = (x_max - x_min) / cells_x;
    dy_ = (y_max - y_min) / cells_y;
    dtheta_ = kTwoPi / cells_theta;
  }

  double x_min_, x_max_, y_min_, y_max_;
  int cells_x_, cells_y_, cells_theta_;
  double horizon_;
  int steps_ = 0;
  double dx_ = 0.0, dy_ = 0.0, dtheta_ = 0.0, dt_ = 0.0;
};

}  // namespace hjbcar
