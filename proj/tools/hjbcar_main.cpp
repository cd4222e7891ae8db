#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjbcar/io.hpp"
#include "hjbcar/runner.hpp"
#include "hjbcar/scene_library.hpp"

namespace {

using namespace hjbcar;

Configuration parse_config_arg(const std::string& s) {
  std::istringstream in(s);
  double x, y, theta;
  char c1, c2;
  if (!(in >> x >> c1 >> y >> c2 >> theta) || c1 != ',' || c2 != ',')
    throw io::SchemaError("--start/--target", "expected x,y,theta, got '" + s + "'");
  return {x, y, theta};
}

std::vector<double> parse_times(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

struct CommonFlags {
  std::vector<std::string> starts;
  std::string target;
  int threads = 0;
};

void apply_common(RunConfig& cfg, const CommonFlags& flags) {
  for (const std::string& s : flags.starts) cfg.starts.push_back(parse_config_arg(s));
  if (!flags.target.empty()) cfg.target_override = parse_config_arg(flags.target);
  cfg.solver.threads = flags.threads;
}

int cmd_solve(const RunConfig& cfg) {
  const SolveOutputs out = run_solve(cfg);
  std::printf("solved %s: grid %dx%dx%d, N=%d, dt=%.6g (CFL bound %.6g)\n",
              out.problem.name.c_str(), cfg.res_x + 1, cfg.res_y + 1, cfg.res_theta,
              out.manifest.N, out.manifest.dt, out.manifest.cfl_bound);
  std::printf("reachable fraction %.4f, wall %.2fs, %d stored slices (stride %d)\n",
              out.report.reachable_fraction, out.report.wall_seconds,
              static_cast<int>(out.manifest.stored_slices.size()),
              out.manifest.slice_stride);
  if (out.report.target_masked_steps > 0)
    std::fprintf(stderr,
                 "warning: target node collided during %d steps; it stays pinned "
                 "to zero\n",
                 out.report.target_masked_steps);
  if (!cfg.out_dir.empty()) std::printf("outputs in %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_trace(const std::string& run_dir, RunConfig cfg) {
  const io::RunDir run = io::load_run_dir(run_dir);
  cfg.oversample = std::max(1, cfg.oversample);
  const TraceOutputs out = run_trace(cfg, run.problem, run.vf, run_dir);
  for (const TraceOutcome& oc : out.outcomes) {
    std::printf("start (%.3g, %.3g, %.3g): %s", oc.start.x, oc.start.y, oc.start.theta,
                oc.trajectory.arrived()
                    ? ("arrived at t=" + std::to_string(*oc.trajectory.arrival_time)).c_str()
                    : "did not arrive");
    std::printf(", validation %s\n", oc.validation.pass ? "pass" : "FAIL");
  }
  if (out.outcomes.empty()) std::printf("no starts; wrote trace manifest only\n");
  return out.all_arrived_and_valid ? 0 : 2;
}

int cmd_verify(const std::string& run_dir, const VerifyOptions& opt) {
  const io::RunDir run = io::load_run_dir(run_dir);
  const VerifyReport rep = run_verify(run, opt);
  for (const VerifyCheck& c : rep.checks)
    std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.c_str());
  std::printf("gradient-diagnostic: %d samples, mismatch rate %.3f (reported only)\n",
              rep.gradient.samples, rep.gradient.mismatch_rate());
  std::ofstream f(std::filesystem::path(run_dir) / "verify.json");
  f << verify_report_json(rep).dump(2) << "\n";
  return rep.all_pass ? 0 : 2;
}

int cmd_render(const std::string& run_dir, const PlotSpec& spec, bool frames,
               const std::string& value_csv, double theta, double time) {
  const io::RunDir run = io::load_run_dir(run_dir);
  if (frames) {
    std::vector<Trajectory> none;
    const auto files = render_frames(run.problem, none, spec, run_dir, "scene");
    std::printf("wrote %zu frame(s) in %s\n", files.size(), run_dir.c_str());
  }
  if (!value_csv.empty()) {
    io::write_value_csv(run.vf, theta, time, value_csv);
    std::printf("wrote value slice to %s\n", value_csv.c_str());
  }
  return 0;
}

int cmd_scenes(bool list, const std::string& out_dir) {
  for (const std::string& name : builtin_problem_names()) {
    if (list) std::printf("%s\n", name.c_str());
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      const std::string path =
          (std::filesystem::path(out_dir) / (name + ".json")).string();
      io::save_problem(builtin_problem(name), path);
      std::printf("wrote %s\n", path.c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal nonholonomic planning among moving obstacles"};
  app.require_subcommand(1);

  RunConfig cfg;
  CommonFlags common;
  std::string run_dir;

  auto* solve = app.add_subcommand("solve", "solve the travel-time field");
  solve->add_option("--scene", cfg.scene, "scene file or builtin:<name>");
  solve->add_option("--out", cfg.out_dir, "output directory")->required();
  solve->add_option("--res", "grid cells as I,J,K")
      ->each([&cfg](const std::string& s) {
        const auto v = parse_times(s);
        if (v.size() != 3) throw CLI::ValidationError("--res", "expected I,J,K");
        cfg.res_x = static_cast<int>(v[0]);
        cfg.res_y = static_cast<int>(v[1]);
        cfg.res_theta = static_cast<int>(v[2]);
      });
  solve->add_option("--horizon", cfg.horizon, "override the scene horizon");
  solve->add_option("--safety", cfg.cfl_safety, "CFL safety factor (0, 1]");
  solve->add_option("--sentinel", cfg.solver.sentinel, "infinity stand-in (>= 2T)");
  solve->add_option("--stride", cfg.solver.slice_stride, "store every m-th slice");
  solve->add_option("--budget-mb", "slice storage budget in MiB")
      ->each([&cfg](const std::string& s) {
        cfg.solver.memory_budget_bytes = std::stoull(s) << 20;
      });
  solve->add_option("--target", common.target, "override target as x,y,theta");
  solve->add_flag("--no-dump", [&cfg](std::int64_t) { cfg.write_dump = false; },
                  "skip the value dump");

  auto* tr = app.add_subcommand("trace", "extract trajectories from a solved run");
  tr->add_option("--run", run_dir, "run directory from solve")->required();
  tr->add_option("--start", common.starts, "start as x,y,theta (repeatable)");
  tr->add_option("--delta", cfg.tracer.delta, "tracer step");
  tr->add_option("--pos-tol", cfg.tracer.pos_tol, "arrival position tolerance");
  tr->add_option("--ang-tol", cfg.tracer.ang_tol, "arrival heading tolerance");
  tr->add_option("--max-steps", cfg.tracer.max_steps, "step budget");
  tr->add_option("--oversample", cfg.oversample, "validation oversampling");
  tr->add_option("--frames", cfg.plot.frames, "panel count");
  tr->add_option("--width", cfg.plot.width, "frame width");
  tr->add_option("--height", cfg.plot.height, "frame height");

  VerifyOptions vopt;
  auto* ver = app.add_subcommand("verify", "consistency checks on a solved run");
  ver->add_option("--run", run_dir, "run directory from solve")->required();
  ver->add_option("--random-starts", vopt.random_starts, "oracle sample count");
  ver->add_option("--seed", vopt.seed, "random seed");
  ver->add_option("--oversample", vopt.oversample, "validation oversampling");
  ver->add_option("--depth", vopt.shoot_depth, "oracle schedule depth");

  bool render_frames_flag = true;
  std::string value_csv;
  double render_theta = 0.0, render_time = 0.0, unused = 0;
  (void)unused;
  std::string times_arg;
  auto* ren = app.add_subcommand("render", "scene frames and value-slice export");
  ren->add_option("--run", run_dir, "run directory from solve")->required();
  ren->add_option("--times", times_arg, "frame times t1,t2,...");
  ren->add_option("--frames", cfg.plot.frames, "panel count when --times is unset");
  ren->add_option("--width", cfg.plot.width, "frame width");
  ren->add_option("--height", cfg.plot.height, "frame height");
  ren->add_flag("--no-frames", [&](std::int64_t) { render_frames_flag = false; },
                "skip frames");
  ren->add_option("--value-csv", value_csv, "write an (x,y) value slice CSV");
  ren->add_option("--theta", render_theta, "heading for --value-csv");
  ren->add_option("--time", render_time, "time for --value-csv");

  bool list_flag = false;
  std::string scenes_out;
  auto* sc = app.add_subcommand("scenes", "list or export the built-in scenes");
  sc->add_flag("--list", list_flag, "print the names");
  sc->add_option("--out", scenes_out, "write scene JSON files here");

  app.add_option("--threads", common.threads, "worker threads (0 = auto)");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_common(cfg, common);
    if (solve->parsed()) return cmd_solve(cfg);
    if (tr->parsed()) return cmd_trace(run_dir, cfg);
    if (ver->parsed()) return cmd_verify(run_dir, vopt);
    if (ren->parsed()) {
      if (!times_arg.empty()) cfg.plot.times = parse_times(times_arg);
      return cmd_render(run_dir, cfg.plot, render_frames_flag, value_csv, render_theta,
                        render_time);
    }
    if (sc->parsed()) return cmd_scenes(list_flag || scenes_out.empty(), scenes_out);
  } catch (const hjbcar::io::SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
