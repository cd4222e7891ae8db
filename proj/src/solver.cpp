#include "hjbcar/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>

#include "hjbcar/kinematics.hpp"
#include "hjbcar/parallel.hpp"

namespace hjbcar {

namespace {

struct PairCoef {
  double ax = 0.0;  // |A| / dx
  double by = 0.0;  // |B| / dy
  double cw = 0.0;  // |w| W / dtheta
  int di = 0, dj = 0, dk = 0;
};

using PairTable = std::array<PairCoef, 7>;

std::vector<PairTable> pair_tables(const Grid4& g, const CarParams& car) {
  std::vector<PairTable> tables(g.K());
  for (int k = 0; k < g.K(); ++k) {
    const double theta = k * g.dtheta();
    for (std::size_t p = 0; p < kControlPairs.size(); ++p) {
      const ControlPair u = kControlPairs[p];
      const UpwindCoeffs uc = upwind_coeffs(theta, u, car);
      tables[k][p] = {std::abs(uc.A) / g.dx(),
                      std::abs(uc.B) / g.dy(),
                      u.w != 0 ? car.W / g.dtheta() : 0.0,
                      uc.a, uc.b, u.w};
    }
  }
  return tables;
}

/// Minimum over the seven pairs of the upwind directional term at one node.
/// `best_pair`, when non-null, receives the first pair attaining the minimum.
inline double min_pair_term(const std::vector<double>& next, std::size_t idx,
                            const PairTable& tab, std::ptrdiff_t stride_i,
                            std::ptrdiff_t stride_j, int k, int K,
                            std::size_t* best_pair) {
  const double c = next[idx];
  const std::size_t base = idx - static_cast<std::size_t>(k);
  const int kp = (k + 1 == K) ? 0 : k + 1;
  const int km = (k == 0) ? K - 1 : k - 1;
  double best = 0.0;  // pair (0,0)
  std::size_t best_p = 0;
  for (std::size_t p = 1; p < 7; ++p) {
    const PairCoef& pc = tab[p];
    double term = pc.ax * (next[idx + pc.di * stride_i] - c) +
                  pc.by * (next[idx + pc.dj * stride_j] - c);
    if (pc.dk != 0) term += pc.cw * (next[base + (pc.dk > 0 ? kp : km)] - c);
    if (term < best) {
      best = term;
      best_p = p;
    }
  }
  if (best_pair) *best_pair = best_p;
  return best;
}

void step_with_tables(const std::vector<double>& next, const std::vector<std::uint8_t>& mask,
                      const Grid4& g, const std::vector<PairTable>& tables,
                      double sentinel, std::size_t target_flat,
                      std::vector<double>& out, int threads) {
  const int I = g.I(), J = g.J(), K = g.K();
  const double dt = g.dt();
  const auto stride_i = static_cast<std::ptrdiff_t>(J + 1) * K;
  const auto stride_j = static_cast<std::ptrdiff_t>(K);

  parallel_for(0, I + 1, threads, [&](int i_lo, int i_hi) {
    for (int i = i_lo; i < i_hi; ++i) {
      for (int j = 0; j <= J; ++j) {
        const std::size_t row = g.flat(i, j, 0);
        if (g.is_spatial_boundary(i, j)) {
          for (int k = 0; k < K; ++k) out[row + k] = sentinel;
          continue;
        }
        for (int k = 0; k < K; ++k) {
          const std::size_t idx = row + k;
          if (mask[idx]) {
            out[idx] = sentinel;
            continue;
          }
          const double best =
              min_pair_term(next, idx, tables[k], stride_i, stride_j, k, K, nullptr);
          const double cand = next[idx] + dt * (1.0 + best);
          out[idx] = std::clamp(cand, 0.0, sentinel);
        }
      }
    }
  });
  out[target_flat] = 0.0;
}

}  // namespace

void SolverParams::validate(double horizon) const {
  if (sentinel != 0.0 && sentinel < 2.0 * horizon)
    throw std::invalid_argument("SolverParams: sentinel must be at least 2*T");
  if (slice_stride < 0)
    throw std::invalid_argument("SolverParams: slice_stride must be >= 0");
  if (memory_budget_bytes == 0)
    throw std::invalid_argument("SolverParams: memory budget must be positive");
}

ValueFunction::ValueFunction(Grid4 grid, double sentinel, int stride, NodeIndex target,
                             std::vector<int> stored_ns,
                             std::vector<std::vector<float>> slices)
    : grid_(std::move(grid)), sentinel_(sentinel), stride_(stride), target_(target),
      stored_ns_(std::move(stored_ns)), slices_(std::move(slices)) {
  if (stored_ns_.empty() || stored_ns_.size() != slices_.size())
    throw std::invalid_argument("ValueFunction: slice list mismatch");
  if (stored_ns_.front() != 0 || stored_ns_.back() != grid_.N())
    throw std::invalid_argument("ValueFunction: slices must cover n = 0 and n = N");
  for (std::size_t s = 0; s < slices_.size(); ++s) {
    if (slices_[s].size() != grid_.slice_size())
      throw std::invalid_argument("ValueFunction: slice size mismatch");
    if (s > 0 && stored_ns_[s] <= stored_ns_[s - 1])
      throw std::invalid_argument("ValueFunction: slice times must increase");
  }
}

double ValueFunction::interpolate(double x, double y, double theta, double t) const {
  const Grid4& g = grid_;
  const double slack = 1e-9 * std::max(1.0, g.T());
  if (!g.in_domain(x, y))
    throw std::out_of_range("ValueFunction::interpolate: point outside the domain");
  if (t < -slack || t > g.T() + slack)
    throw std::out_of_range("ValueFunction::interpolate: time outside [0, T]");
  t = std::clamp(t, 0.0, g.T());

  const double sx = (x - g.x_min()) / g.dx();
  const double sy = (y - g.y_min()) / g.dy();
  const int i0 = std::clamp(static_cast<int>(sx), 0, g.I() - 1);
  const int j0 = std::clamp(static_cast<int>(sy), 0, g.J() - 1);
  const double wx = std::clamp(sx - i0, 0.0, 1.0);
  const double wy = std::clamp(sy - j0, 0.0, 1.0);

  double sk = wrap_angle(theta) / g.dtheta();
  int k0 = static_cast<int>(sk);
  if (k0 >= g.K()) {  // wrap_angle can return just below 2*pi
    k0 = g.K() - 1;
    sk = g.K();
  }
  const int k1 = (k0 + 1) % g.K();
  const double wk = sk - k0;

  // Bracketing stored slices.
  int s1 = 0;
  while (s1 + 1 < num_stored() && stored_time(s1) < t) ++s1;
  int s0 = s1;
  double wt = 0.0;
  if (stored_time(s1) > t && s1 > 0) {
    s0 = s1 - 1;
    const double span = stored_time(s1) - stored_time(s0);
    wt = (t - stored_time(s0)) / span;
  }

  const double weights[2][4] = {{1.0 - wx, 1.0 - wy, 1.0 - wk, 1.0 - wt},
                                {wx, wy, wk, wt}};
  const int ii[2] = {i0, i0 + 1};
  const int jj[2] = {j0, j0 + 1};
  const int kk[2] = {k0, k1};
  const int ss[2] = {s0, s1};

  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          const double w =
              weights[a][0] * weights[b][1] * weights[c][2] * weights[d][3];
          if (w == 0.0) continue;
          const double v = slices_[ss[d]][grid_.flat(ii[a], jj[b], kk[c])];
          if (v >= sentinel_) return sentinel_;  // infinity absorbs
          acc += w * v;
        }
      }
    }
  }
  return acc;
}

std::optional<std::string> ValueFunction::check_invariants(const Scene& scene,
                                                           const CarParams& car) const {
  const Grid4& g = grid_;
  const std::size_t target_flat = g.flat(target_.i, target_.j, target_.k);
  for (int s = 0; s < num_stored(); ++s) {
    const auto& slice = slices_[s];
    const auto mask = illegal_mask(scene, g, stored_ns_[s], car, 0);
    for (int i = 0; i <= g.I(); ++i) {
      for (int j = 0; j <= g.J(); ++j) {
        for (int k = 0; k < g.K(); ++k) {
          const std::size_t idx = g.flat(i, j, k);
          const double v = slice[idx];
          const auto where = [&] {
            return "slice n=" + std::to_string(stored_ns_[s]) + " node (" +
                   std::to_string(i) + "," + std::to_string(j) + "," +
                   std::to_string(k) + ")";
          };
          if (!(v >= 0.0) || v > sentinel_ * (1.0 + 1e-6))
            return "value " + std::to_string(v) + " outside [0, M] at " + where();
          if (idx == target_flat) {
            if (v != 0.0) return "target node not zero at " + where();
            continue;
          }
          if (g.is_spatial_boundary(i, j) && v < sentinel_)
            return "boundary node below sentinel at " + where();
          if (mask[idx] && v < sentinel_)
            return "masked node below sentinel at " + where();
        }
      }
    }
  }
  return std::nullopt;
}

std::vector<double> terminal_slice(const Grid4& g, const Configuration& target,
                                   const Scene& scene, const CarParams& car,
                                   double sentinel) {
  const NodeIndex node = g.snap_config(target);  // throws outside the domain
  const Configuration snapped = g.node_config(node.i, node.j, node.k);
  if (collides(snapped, g.T(), scene, car, 0.5 * std::min(g.dx(), g.dy())))
    throw std::invalid_argument(
        "terminal_slice: target node is illegal at the terminal time");
  std::vector<double> slice(g.slice_size(), sentinel);
  slice[g.flat(node.i, node.j, node.k)] = 0.0;
  return slice;
}

void step_backward(const std::vector<double>& next, const std::vector<std::uint8_t>& mask,
                   const Grid4& g, const CarParams& car, double sentinel,
                   std::size_t target_flat, std::vector<double>& out, int threads) {
  if (next.size() != g.slice_size() || mask.size() != g.slice_size())
    throw std::invalid_argument("step_backward: slice size mismatch");
  out.resize(g.slice_size());
  step_with_tables(next, mask, g, pair_tables(g, car), sentinel, target_flat, out,
                   threads);
}

ControlPair argmin_controls(const std::vector<double>& next, const NodeIndex& node,
                            const Grid4& g, const CarParams& car) {
  if (node.i <= 0 || node.i >= g.I() || node.j <= 0 || node.j >= g.J() ||
      node.k < 0 || node.k >= g.K())
    throw std::out_of_range("argmin_controls: node must be interior");
  PairTable tab;
  const double theta = node.k * g.dtheta();
  for (std::size_t p = 0; p < kControlPairs.size(); ++p) {
    const ControlPair u = kControlPairs[p];
    const UpwindCoeffs uc = upwind_coeffs(theta, u, car);
    tab[p] = {std::abs(uc.A) / g.dx(), std::abs(uc.B) / g.dy(),
              u.w != 0 ? car.W / g.dtheta() : 0.0, uc.a, uc.b, u.w};
  }
  std::size_t best = 0;
  min_pair_term(next, g.flat(node.i, node.j, node.k), tab,
                static_cast<std::ptrdiff_t>(g.J() + 1) * g.K(), g.K(), node.k, g.K(),
                &best);
  return kControlPairs[best];
}

ValueFunction solve(const Scene& scene, const Configuration& target, const Grid4& g,
                    const CarParams& car, const SolverParams& params,
                    SolveReport* report) {
  const auto t_begin = std::chrono::steady_clock::now();
  scene.validate();
  car.validate();
  params.validate(g.T());
  const double M = params.sentinel != 0.0 ? params.sentinel : 2.0 * g.T();

  int stride = params.slice_stride;
  if (stride <= 0) {
    const std::size_t slice_bytes = g.slice_size() * sizeof(float);
    const std::size_t total = slice_bytes * (static_cast<std::size_t>(g.N()) + 1);
    stride = static_cast<int>((total + params.memory_budget_bytes - 1) /
                              params.memory_budget_bytes);
    stride = std::max(stride, 1);
  }

  const NodeIndex target_node = g.snap_config(target);
  const std::size_t target_flat = g.flat(target_node.i, target_node.j, target_node.k);
  const auto tables = pair_tables(g, car);

  std::vector<double> cur = terminal_slice(g, target, scene, car, M);
  std::vector<double> out(g.slice_size());

  std::vector<int> stored_ns;
  std::vector<std::vector<float>> slices;
  const auto store = [&](int n, const std::vector<double>& slice) {
    stored_ns.push_back(n);
    slices.emplace_back(slice.begin(), slice.end());
  };
  store(g.N(), cur);

  const bool static_scene = scene.is_static();
  std::vector<std::uint8_t> mask;
  int target_masked = 0;
  for (int n = g.N() - 1; n >= 0; --n) {
    if (!static_scene || mask.empty())
      mask = illegal_mask(scene, g, n, car, params.threads);
    step_with_tables(cur, mask, g, tables, M, target_flat, out, params.threads);
    cur.swap(out);
    if (mask[target_flat]) ++target_masked;
    if (n % stride == 0) store(n, cur);
  }
  std::reverse(stored_ns.begin(), stored_ns.end());
  std::reverse(slices.begin(), slices.end());

  std::size_t reachable = 0;
  for (double v : cur)
    if (v < g.T()) ++reachable;

  if (report) {
    report->dt = g.dt();
    report->cfl_bound = cfl_max_dt(g.dx(), g.dy(), g.dtheta(), car);
    report->steps = g.N();
    report->slice_stride = stride;
    report->reachable_fraction = static_cast<double>(reachable) / g.slice_size();
    report->target_masked_steps = target_masked;
    report->wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  }
  return ValueFunction(g, M, stride, target_node, std::move(stored_ns),
                       std::move(slices));
}

}  // namespace hjbcar
