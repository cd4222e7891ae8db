// Acceptance suite: end-to-end criteria at desk scale, one pass/fail line
// each. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hjbcar/oracle.hpp"
#include "hjbcar/runner.hpp"
#include "hjbcar/scene_library.hpp"
#include "hjbcar/solver.hpp"
#include "hjbcar/tracer.hpp"

using namespace hjbcar;

namespace {

constexpr double kPi = kTwoPi / 2.0;

struct Tally {
  int failures = 0;
  void record(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Solved {
  Problem problem;
  Grid4 grid;
  ValueFunction vf;
  SolveReport report;
};

Solved solve_problem(Problem problem, int cells_xy, int cells_theta, double horizon,
                     int threads) {
  if (horizon > 0) problem.scene.horizon = horizon;
  Grid4 grid = Grid4::make(problem.scene.x_min, problem.scene.x_max, problem.scene.y_min,
                           problem.scene.y_max, cells_xy, cells_xy, cells_theta,
                           problem.scene.horizon, problem.car, 0.9);
  SolverParams params;
  params.threads = threads;
  SolveReport report;
  ValueFunction vf =
      solve(problem.scene, problem.target, grid, problem.car, params, &report);
  return Solved{std::move(problem), std::move(grid), std::move(vf), report};
}

int longest_wait_run(const Trajectory& tr) {
  int best = 0, cur = 0;
  if (tr.samples.size() < 2) return 0;
  for (std::size_t s = 0; s + 1 < tr.samples.size(); ++s) {  // executed controls only
    if (tr.samples[s].v == 0 && tr.samples[s].w == 0) {
      best = std::max(best, ++cur);
    } else {
      cur = 0;
    }
  }
  return best;
}

}  // namespace

int main() {
  Tally tally;
  std::vector<Trajectory> all_trajectories;

  // ------------------------------------------------------------------ 1
  // Free space, aligned start and target: the travel time is 1 at unit
  // speed, and the traced plan agrees with the field.
  double crit1_u0 = 0.0;
  {
    const auto clock_start = std::chrono::steady_clock::now();
    Solved run = solve_problem(free_space(), 50, 64, 3.0, /*threads=*/1);
    const Configuration start{-0.5, 0.0, 0.0};
    crit1_u0 = run.vf.interpolate(start.x, start.y, start.theta, 0.0);
    const Trajectory tr = trace(run.vf, start, run.problem.scene, run.problem.car);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start)
            .count();
    const bool u_ok = crit1_u0 >= 0.85 && crit1_u0 <= 1.15;
    const bool arrived = tr.arrived();
    const double gap = arrived ? std::abs(*tr.arrival_time - crit1_u0) : 1e9;
    const bool time_ok = elapsed <= 60.0;
    all_trajectories.push_back(tr);
    tally.record(1, "free-space straight line",
                 u_ok && arrived && gap <= 0.15 && time_ok,
                 "u(start,0)=" + fmt(crit1_u0) + " in [0.85,1.15]; |trace-u|=" +
                     fmt(gap) + " <= 0.15; " + fmt(elapsed) + "s single-threaded");

    // -------------------------------------------------------------- 3
    // Oracle dominance and the distance lower bound on random starts,
    // against the same free-space field.
    {
      const Grid4& g = run.grid;
      std::mt19937_64 rng(987654321u);
      std::uniform_real_distribution<double> coord(-0.85, 0.85);
      std::uniform_real_distribution<double> angle(0.0, kTwoPi);
      const Configuration target = run.problem.target;

      OracleParams op;
      op.substep = g.dt();  // RK4 error stays orders below grid error
      op.pos_tol = 1.5 * std::max(g.dx(), g.dy());
      op.ang_tol = 1.5 * g.dtheta();
      op.collision_spacing = 0.5 * std::min(g.dx(), g.dy());
      // Fine short segments resolve turns to below the heading tolerance;
      // arrival triggers mid-segment, so straights only need a few long
      // entries.
      std::vector<double> menu;
      for (int q = 1; q <= 12; ++q) menu.push_back(0.035 * q);
      for (double q : {0.6, 0.9, 1.3, 1.7}) menu.push_back(q);

      // Arrival slack: traversing the oracle's arrival tolerance (along
      // track, a two-arc lateral correction, and a final turn) plus one
      // grid cell of discretization per axis.
      const double arrival_slack =
          op.pos_tol + 2.0 * std::sqrt(op.pos_tol / run.problem.car.W) +
          op.ang_tol / run.problem.car.W + 2.0 * std::max(g.dx(), g.dy()) +
          2.0 * g.dtheta() / run.problem.car.W;
      int upper_violations = 0, lower_violations = 0, found = 0;
      double worst_gap = -1e9;
      for (int s = 0; s < 20; ++s) {
        Configuration start;
        double dist;
        do {
          start = {coord(rng), coord(rng), angle(rng)};
          dist = std::hypot(start.x - target.x, start.y - target.y);
        } while (dist < 0.3 || dist > 1.1);
        const double u0 = run.vf.interpolate(start.x, start.y, start.theta, 0.0);
        if (u0 < dist - 2.0 * std::max(g.dx(), g.dy())) ++lower_violations;
        const ShootingResult sr =
            shoot(start, target, run.problem.scene, run.problem.car, 3, menu, op);
        if (!sr.found()) continue;
        ++found;
        const double bound = *sr.best_time + 2.0 * g.dt() + arrival_slack;
        worst_gap = std::max(worst_gap, u0 - bound);
        if (u0 > bound) ++upper_violations;
      }
      tally.record(3, "oracle dominance and distance lower bound",
                   found == 20 && upper_violations == 0 && lower_violations == 0,
                   std::to_string(found) + "/20 oracle plans found; " +
                       std::to_string(upper_violations) + " upper and " +
                       std::to_string(lower_violations) +
                       " lower violations (worst margin " + fmt(worst_gap) + ")");
    }
  }

  // ------------------------------------------------------------------ 2
  // Point car quarter arc at the minimum radius.
  {
    Solved run = solve_problem(point_car_arc(), 50, 64, 3.0, 0);
    const double u0 = run.vf.interpolate(0.0, 0.0, 0.0, 0.0);
    tally.record(2, "minimum-radius arc (point car)", u0 >= 0.31 && u0 <= 0.48,
                 "u(start,0)=" + fmt(u0) + " in [0.31,0.48] (analytic " +
                     fmt(kPi / 2.0 / 4.0) + ")");
  }

  // ------------------------------------------------------------------ 4
  // Static obstacles: the travel time must not depend on t away from the
  // horizon.
  {
    Solved run = solve_problem(static_blocks(), 40, 40, 0.0, 0);
    const Grid4& g = run.grid;
    const double t_probe = 0.25 * g.T();
    double worst = 0.0;
    for (int i = 0; i <= g.I(); ++i)
      for (int j = 0; j <= g.J(); ++j)
        for (int k = 0; k < g.K(); ++k) {
          const double v0 = run.vf.at(0, i, j, k);
          if (v0 >= 0.5 * g.T()) continue;
          const Configuration c = g.node_config(i, j, k);
          const double vt = run.vf.interpolate(c.x, c.y, c.theta, t_probe);
          if (vt >= 0.5 * g.T()) continue;
          worst = std::max(worst, std::abs(v0 - vt));
        }
    const double tol = 2.0 * std::max(g.dx(), g.dy());
    tally.record(4, "stationarity on a static scene", worst <= tol,
                 "max |u(.,0)-u(.,T/4)| = " + fmt(worst) + " <= " + fmt(tol));
  }

  // ------------------------------------------------------------------ 5
  // Monotonicity of the one-step update under componentwise increases.
  {
    const CarParams car = CarParams::make(0.07, 0.04, 4.0);
    const Grid4 g = Grid4::make(-1, 1, -1, 1, 16, 16, 16, 2.0, car, 0.9);
    const double M = 2.0 * g.T();
    std::mt19937_64 rng(24680);
    std::uniform_real_distribution<double> val(0.0, M);
    std::uniform_real_distribution<double> bump(0.0, 0.3);
    std::bernoulli_distribution masked(0.15);
    std::vector<double> base(g.slice_size());
    for (double& v : base) v = val(rng);
    std::vector<std::uint8_t> mask(g.slice_size());
    for (auto& m : mask) m = masked(rng) ? 1 : 0;
    const std::size_t target = g.flat(8, 8, 0);

    std::vector<double> out_base, out_pert;
    step_backward(base, mask, g, car, M, target, out_base);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> pert = base;
      for (double& v : pert) v = std::min(M, v + bump(rng));
      step_backward(pert, mask, g, car, M, target, out_pert);
      for (std::size_t i = 0; i < out_base.size(); ++i)
        if (out_pert[i] < out_base[i] - 1e-12) ++violations;
    }
    tally.record(5, "monotone scheme", violations == 0,
                 "50 perturbations on a 17x17x16 grid, " + std::to_string(violations) +
                     " violations");
  }

  // ------------------------------------------------------------------ 6
  // Rotating sectors: all four corner starts arrive, validate at 10x, and
  // at least one car stops to wait for an obstacle.
  {
    Solved run = solve_problem(rotating_sectors(), 50, 48, 6.0, 0);
    const double spacing = 0.5 * std::min(run.grid.dx(), run.grid.dy());
    int arrivals = 0, valid = 0, max_wait = 0;
    for (const Configuration& start : run.problem.starts) {
      const Trajectory tr = trace(run.vf, start, run.problem.scene, run.problem.car);
      all_trajectories.push_back(tr);
      if (tr.arrived()) ++arrivals;
      if (validate_trajectory(tr, run.problem.scene, run.problem.car, 10, spacing).pass)
        ++valid;
      max_wait = std::max(max_wait, longest_wait_run(tr));
    }
    tally.record(6, "rotating sectors with waiting",
                 arrivals == 4 && valid == 4 && max_wait >= 3,
                 std::to_string(arrivals) + "/4 arrive, " + std::to_string(valid) +
                     "/4 validate at 10x, longest wait run " +
                     std::to_string(max_wait) + " steps");
  }

  // ------------------------------------------------------------------ 7
  // Moving doorways and the lane change both produce collision-free
  // arrivals.
  {
    std::string detail;
    bool ok = true;
    for (const char* name : {"moving_doors", "lane_change"}) {
      Solved run = solve_problem(builtin_problem(name), 50, 48, 6.0, 0);
      const double spacing = 0.5 * std::min(run.grid.dx(), run.grid.dy());
      for (const Configuration& start : run.problem.starts) {
        const Trajectory tr = trace(run.vf, start, run.problem.scene, run.problem.car);
        all_trajectories.push_back(tr);
        const bool arrived = tr.arrived();
        const bool valid =
            validate_trajectory(tr, run.problem.scene, run.problem.car, 10, spacing)
                .pass;
        ok = ok && arrived && valid;
        detail += std::string(name) + (arrived ? " arrives" : " FAILS to arrive") +
                  (valid ? " and validates; " : " but fails validation; ");
      }
    }
    tally.record(7, "doors and lane-change scenes", ok, detail);
  }

  // ------------------------------------------------------------------ 8
  // CFL enforcement at construction time and in the recorded manifest.
  {
    const CarParams car = CarParams::make(0.07, 0.04, 4.0);
    bool rejected = false;
    try {
      Grid4::with_steps(-1, 1, -1, 1, 50, 50, 64, 3.0, 100, car);  // dt 3x too big
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    RunConfig cfg;
    cfg.scene = "builtin:free_space";
    cfg.out_dir = (std::filesystem::temp_directory_path() / "hjbcar_acceptance_run")
                      .string();
    cfg.res_x = cfg.res_y = 20;
    cfg.res_theta = 16;
    cfg.horizon = 1.5;
    const SolveOutputs out = run_solve(cfg);
    const io::Manifest& m = out.manifest;
    const bool manifest_ok =
        m.dt <= 0.9 * m.cfl_bound * (1.0 + 1e-12) &&
        std::abs(m.cfl_bound - cfl_max_dt(out.vf.grid().dx(), out.vf.grid().dy(),
                                          out.vf.grid().dtheta(), out.problem.car)) <=
            1e-12;
    tally.record(8, "CFL enforcement", rejected && manifest_ok,
                 std::string("oversized step rejected: ") + (rejected ? "yes" : "no") +
                     "; manifest dt=" + fmt(m.dt) + " <= 0.9*" + fmt(m.cfl_bound));
  }

  // ------------------------------------------------------------------ 9
  // Every control emitted across criteria 1-7 is one of the seven pairs.
  {
    long long controls = 0;
    int bad = 0;
    for (const Trajectory& tr : all_trajectories) {
      for (const TrajectorySample& s : tr.samples) {
        ++controls;
        if (!is_admissible({s.v, s.w}) || (s.v == 0 && s.w != 0)) ++bad;
      }
    }
    tally.record(9, "seven-pair controller", controls > 0 && bad == 0,
                 std::to_string(controls) + " controls emitted, " +
                     std::to_string(bad) + " outside the seven admissible pairs");
  }

  std::printf("%s: %d criterion(s) failed\n", tally.failures == 0 ? "OK" : "FAILED",
              tally.failures);
  return tally.failures == 0 ? 0 : 1;
}
