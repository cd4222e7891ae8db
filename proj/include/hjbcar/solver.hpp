#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hjbcar/grid.hpp"
#include "hjbcar/scene.hpp"
#include "hjbcar/types.hpp"

namespace hjbcar {

/// Solver knobs. The sentinel plays the role of +infinity in storage and
/// update arithmetic; values are clamped to [0, sentinel]. A modest sentinel
/// (default 2*T) keeps the relaxation from a fresh slice fast while staying
/// well above every feasible travel time.
struct SolverParams {
  double sentinel = 0.0;   // 0 -> 2*T; must be >= 2*T otherwise
  int slice_stride = 0;    // store every m-th time slice; 0 -> from budget
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
  int threads = 1;         // <= 0: hardware concurrency

  void validate(double horizon) const;
};

/// The travel-time field on the grid: one float slice per stored time level
/// (always including n = 0 and n = N), quadrilinearly interpolated in
/// between. The sentinel absorbs: any interpolation stencil that touches a
/// sentinel-valued node evaluates to the sentinel.
class ValueFunction {
 public:
  ValueFunction(Grid4 grid, double sentinel, int stride, NodeIndex target,
                std::vector<int> stored_ns, std::vector<std::vector<float>> slices);

  const Grid4& grid() const { return grid_; }
  double sentinel() const { return sentinel_; }
  int stride() const { return stride_; }
  NodeIndex target_node() const { return target_; }
  Configuration target_config() const {
    return grid_.node_config(target_.i, target_.j, target_.k);
  }

  int num_stored() const { return static_cast<int>(stored_ns_.size()); }
  int stored_n(int s) const { return stored_ns_[s]; }
  double stored_time(int s) const { return grid_.time_of(stored_ns_[s]); }
  const std::vector<float>& slice(int s) const { return slices_[s]; }

  double at(int s, int i, int j, int k) const {
    return slices_[s][grid_.flat(i, j, k)];
  }

  /// Quadrilinear interpolation in (x, y, theta, t); periodic in theta,
  /// linear in time between stored slices. Throws outside the domain or
  /// horizon.
  double interpolate(double x, double y, double theta, double t) const;

  /// Structural invariants of every stored slice: values within [0, M],
  /// sentinel on the spatial boundary, zero at the target, sentinel on nodes
  /// that collide at the slice time. Returns an explanation on failure.
  std::optional<std::string> check_invariants(const Scene& scene,
                                              const CarParams& car) const;

 private:
  Grid4 grid_;
  double sentinel_;
  int stride_;
  NodeIndex target_;
  std::vector<int> stored_ns_;
  std::vector<std::vector<float>> slices_;
};

struct SolveReport {
  double dt = 0.0;
  double cfl_bound = 0.0;
  int steps = 0;
  int slice_stride = 1;
  double reachable_fraction = 0.0;  // share of nodes with u(.,0) < T
  int target_masked_steps = 0;      // steps where the pinned target collided
  double wall_seconds = 0.0;
};

/// Terminal condition: zero at the node nearest the target, sentinel
/// everywhere else. Throws if the target lies outside the domain or its node
/// is illegal at the terminal time.
std::vector<double> terminal_slice(const Grid4& g, const Configuration& target,
                                   const Scene& scene, const CarParams& car,
                                   double sentinel);

/// One backward time step of the upwind scheme. Reads the slice at level
/// n+1, applies the seven-pair minimization at every interior legal node,
/// clamps to [0, sentinel], pins the spatial boundary and masked nodes to the
/// sentinel and the target node to zero.
void step_backward(const std::vector<double>& next, const std::vector<std::uint8_t>& mask,
                   const Grid4& g, const CarParams& car, double sentinel,
                   std::size_t target_flat, std::vector<double>& out, int threads = 1);

/// The control pair that minimizes the one-step update at an interior node,
/// ties broken by the fixed pair order.
ControlPair argmin_controls(const std::vector<double>& next, const NodeIndex& node,
                            const Grid4& g, const CarParams& car);

/// Integrates the terminal slice backward to t = 0, masking illegal nodes at
/// every step, and keeps every m-th slice (plus the terminal one).
ValueFunction solve(const Scene& scene, const Configuration& target, const Grid4& g,
                    const CarParams& car, const SolverParams& params = {},
                    SolveReport* report = nullptr);

}  // namespace hjbcar
