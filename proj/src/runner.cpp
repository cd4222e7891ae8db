#include "hjbcar/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace hjbcar {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (scene.empty()) throw io::SchemaError("config/scene", "missing scene");
  if (res_x < 2 || res_y < 2 || res_theta < 4)
    throw io::SchemaError("config/res",
                          "grid resolution too small (need >= 2 x 2 x 4 cells)");
  if (horizon < 0.0) throw io::SchemaError("config/horizon", "horizon must be >= 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
    throw io::SchemaError("config/cfl_safety", "safety factor must lie in (0, 1]");
}

SolveOutputs run_solve(const RunConfig& cfg) {
  cfg.validate();
  Problem problem = io::load_problem(cfg.scene);
  if (cfg.horizon > 0.0) problem.scene.horizon = cfg.horizon;
  if (cfg.target_override) problem.target = *cfg.target_override;
  if (!cfg.starts.empty()) problem.starts = cfg.starts;

  const Grid4 grid = Grid4::make(problem.scene.x_min, problem.scene.x_max,
                                 problem.scene.y_min, problem.scene.y_max, cfg.res_x,
                                 cfg.res_y, cfg.res_theta, problem.scene.horizon,
                                 problem.car, cfg.cfl_safety);
  SolveReport report;
  ValueFunction vf = solve(problem.scene, problem.target, grid, problem.car,
                           cfg.solver, &report);

  io::Manifest m;
  m.x_min = grid.x_min();
  m.x_max = grid.x_max();
  m.y_min = grid.y_min();
  m.y_max = grid.y_max();
  m.I = grid.I();
  m.J = grid.J();
  m.K = grid.K();
  m.N = grid.N();
  m.horizon = grid.T();
  m.dt = grid.dt();
  m.cfl_bound = report.cfl_bound;
  m.cfl_safety = cfg.cfl_safety;
  m.sentinel = vf.sentinel();
  m.slice_stride = report.slice_stride;
  for (int s = 0; s < vf.num_stored(); ++s) m.stored_slices.push_back(vf.stored_n(s));
  m.target_node = vf.target_node();
  m.reachable_fraction = report.reachable_fraction;
  m.target_masked_steps = report.target_masked_steps;
  m.wall_seconds = report.wall_seconds;

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    io::save_problem(problem, (fs::path(cfg.out_dir) / m.scene_file).string());
    if (cfg.write_dump)
      io::write_value_dump(vf, (fs::path(cfg.out_dir) / m.value_dump).string());
    io::write_manifest(m, (fs::path(cfg.out_dir) / "manifest.json").string());
  }
  return SolveOutputs{std::move(problem), std::move(vf), report, std::move(m)};
}

TraceOutputs run_trace(const RunConfig& cfg, const Problem& problem,
                       const ValueFunction& vf, const std::string& out_dir) {
  TraceOutputs out;
  const std::vector<Configuration>& starts =
      cfg.starts.empty() ? problem.starts : cfg.starts;
  const double spacing = 0.5 * std::min(vf.grid().dx(), vf.grid().dy());

  if (!out_dir.empty()) fs::create_directories(out_dir);

  nlohmann::ordered_json traces_json = nlohmann::ordered_json::array();
  std::vector<Trajectory> trajectories;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    TraceOutcome oc;
    oc.start = starts[s];
    oc.trajectory = trace(vf, starts[s], problem.scene, problem.car, cfg.tracer);
    oc.validation = validate_trajectory(oc.trajectory, problem.scene, problem.car,
                                        cfg.oversample, spacing);
    if (!oc.trajectory.arrived() || !oc.validation.pass)
      out.all_arrived_and_valid = false;

    if (!out_dir.empty()) {
      oc.csv_file = "trajectory_" + std::to_string(s) + ".csv";
      io::write_trajectory_csv(oc.trajectory,
                               (fs::path(out_dir) / oc.csv_file).string());
    }
    nlohmann::ordered_json tj;
    tj["start"] = {starts[s].x, starts[s].y, starts[s].theta};
    tj["arrived"] = oc.trajectory.arrived();
    if (oc.trajectory.arrived()) tj["arrival_time"] = *oc.trajectory.arrival_time;
    tj["samples"] = oc.trajectory.samples.size();
    tj["valid"] = oc.validation.pass;
    if (!oc.validation.pass) tj["violation"] = oc.validation.message;
    tj["csv"] = oc.csv_file;
    traces_json.push_back(tj);

    trajectories.push_back(oc.trajectory);
    out.outcomes.push_back(std::move(oc));
  }

  if (!out_dir.empty()) {
    if (!trajectories.empty())
      out.frame_files =
          render_frames(problem, trajectories, cfg.plot, out_dir, "frame");
    nlohmann::ordered_json j;
    j["trajectories"] = traces_json;
    j["frames"] = out.frame_files;
    std::ofstream f((fs::path(out_dir) / "trace_manifest.json").string());
    f << j.dump(2) << "\n";
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

VerifyReport run_verify(const io::RunDir& run, const VerifyOptions& opt) {
  VerifyReport rep;
  const ValueFunction& vf = run.vf;
  const Grid4& g = vf.grid();
  const Problem& problem = run.problem;
  const auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
    if (!pass) rep.all_pass = false;
  };

  // Structural invariants of the stored slices.
  const auto bad = vf.check_invariants(problem.scene, problem.car);
  add("dump-invariants", !bad.has_value(), bad.value_or("all stored slices consistent"));

  // The manifest must record a step obeying the CFL bound with its safety
  // factor, and the recorded bound must match the grid.
  const double bound = cfl_max_dt(g.dx(), g.dy(), g.dtheta(), problem.car);
  const bool cfl_ok = std::abs(bound - run.manifest.cfl_bound) <= 1e-12 * bound &&
                      run.manifest.dt <= run.manifest.cfl_safety * bound * (1.0 + 1e-12);
  add("cfl-record", cfl_ok,
      "dt=" + fmt(run.manifest.dt) + " bound=" + fmt(bound) +
          " safety=" + fmt(run.manifest.cfl_safety));

  // Finite travel times cannot beat the planar speed limit.
  {
    const Configuration target = vf.target_config();
    const double vmax = std::sqrt(1.0 + std::pow(problem.car.W * problem.car.d, 2));
    const double slack = std::hypot(g.dx(), g.dy()) + 2.0 * g.dt();
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i <= g.I(); ++i) {
      for (int j = 0; j <= g.J(); ++j) {
        for (int k = 0; k < g.K(); ++k) {
          const double v = vf.at(0, i, j, k);
          if (v >= g.T()) continue;
          const Configuration c = g.node_config(i, j, k);
          const double lb = std::hypot(c.x - target.x, c.y - target.y) / vmax - slack;
          if (v < lb) {
            ++violations;
            worst = std::max(worst, lb - v);
          }
        }
      }
    }
    add("lower-bound", violations == 0,
        violations == 0 ? "no node beats the speed-limit bound"
                        : std::to_string(violations) + " nodes, worst " + fmt(worst));
  }

  if (problem.scene.is_static()) {
    // A static scene must produce a travel time that does not depend on t
    // away from the horizon.
    const double t_probe = 0.25 * g.T();
    const double tol = 2.0 * std::max(g.dx(), g.dy());
    double worst = 0.0;
    for (int i = 0; i <= g.I(); ++i) {
      for (int j = 0; j <= g.J(); ++j) {
        for (int k = 0; k < g.K(); ++k) {
          const Configuration c = g.node_config(i, j, k);
          const double v0 = vf.at(0, i, j, k);
          if (v0 >= 0.5 * g.T()) continue;
          const double vt = vf.interpolate(c.x, c.y, c.theta, t_probe);
          if (vt >= 0.5 * g.T()) continue;
          worst = std::max(worst, std::abs(v0 - vt));
        }
      }
    }
    add("stationarity", worst <= tol, "max |u(.,0) - u(.,T/4)| = " + fmt(worst) +
                                          " tol " + fmt(tol));
  }

  // Oracle dominance on random legal starts: the solved travel time never
  // exceeds a simulated admissible plan by more than discretization slack.
  {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> ux(g.x_min() + 0.1 * (g.x_max() - g.x_min()),
                                              g.x_max() - 0.1 * (g.x_max() - g.x_min()));
    std::uniform_real_distribution<double> uy(g.y_min() + 0.1 * (g.y_max() - g.y_min()),
                                              g.y_max() - 0.1 * (g.y_max() - g.y_min()));
    std::uniform_real_distribution<double> uth(0.0, kTwoPi);
    const TracerParams tp = TracerParams{}.resolved(vf);
    OracleParams op;
    op.substep = g.dt() / 4.0;
    op.pos_tol = tp.pos_tol;
    op.ang_tol = tp.ang_tol;
    op.collision_spacing = 0.5 * std::min(g.dx(), g.dy());
    std::vector<double> menu;
    for (double q = 0.1; q <= 1.61; q += 0.15) menu.push_back(q);

    int tried = 0, found = 0, violations = 0;
    // Closing the oracle's arrival tolerance costs along-track time, a
    // lateral two-arc correction of ~2*sqrt(offset/W), a heading turn, and
    // up to one grid cell per axis of discretization.
    const double slack = op.pos_tol + 2.0 * std::sqrt(op.pos_tol / problem.car.W) +
                         op.ang_tol / problem.car.W +
                         2.0 * std::max(g.dx(), g.dy()) +
                         2.0 * g.dtheta() / problem.car.W + 2.0 * g.dt();
    for (int s = 0; s < opt.random_starts && tried < 4 * opt.random_starts; ++s) {
      const Configuration start{ux(rng), uy(rng), uth(rng)};
      ++tried;
      if (collides(start, 0.0, problem.scene, problem.car, op.collision_spacing) ||
          vf.interpolate(start.x, start.y, start.theta, 0.0) >= g.T()) {
        --s;  // resample until legal
        continue;
      }
      const ShootingResult sr = shoot(start, problem.target, problem.scene,
                                      problem.car, opt.shoot_depth, menu, op);
      if (!sr.found()) continue;
      ++found;
      const double u0 = vf.interpolate(start.x, start.y, start.theta, 0.0);
      if (u0 > *sr.best_time + slack) ++violations;
    }
    add("oracle-dominance", violations == 0,
        std::to_string(found) + "/" + std::to_string(opt.random_starts) +
            " oracle plans found, " + std::to_string(violations) + " violations");
  }

  // End-to-end traces from the scene starts.
  if (!problem.starts.empty()) {
    const double spacing = 0.5 * std::min(g.dx(), g.dy());
    bool all_ok = true;
    std::string detail;
    GradientDiagnostic gd;
    for (const Configuration& s : problem.starts) {
      try {
        const Trajectory tr = trace(vf, s, problem.scene, problem.car, TracerParams{});
        const ValidationReport vr =
            validate_trajectory(tr, problem.scene, problem.car, opt.oversample, spacing);
        if (!tr.arrived() || !vr.pass) {
          all_ok = false;
          detail += (tr.arrived() ? vr.message : "no arrival") + "; ";
        }
        const GradientDiagnostic d = compare_gradient_controls(vf, tr, problem.car);
        gd.samples += d.samples;
        gd.mismatches += d.mismatches;
        gd.inadmissible += d.inadmissible;
      } catch (const std::exception& e) {
        all_ok = false;
        detail += std::string(e.what()) + "; ";
      }
    }
    rep.gradient = gd;
    add("trajectories", all_ok,
        all_ok ? std::to_string(problem.starts.size()) + " starts arrive and validate"
               : detail);
  }

  return rep;
}

nlohmann::ordered_json verify_report_json(const VerifyReport& rep) {
  nlohmann::ordered_json j;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const VerifyCheck& c : rep.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["detail"] = c.detail;
    checks.push_back(cj);
  }
  j["gradient_diagnostic"] = {{"samples", rep.gradient.samples},
                              {"mismatches", rep.gradient.mismatches},
                              {"inadmissible", rep.gradient.inadmissible},
                              {"mismatch_rate", rep.gradient.mismatch_rate()}};
  j["all_pass"] = rep.all_pass;
  return j;
}

}  // namespace hjbcar
