#include <doctest.h>

#include <cmath>

#include "hjbcar/scene_library.hpp"
#include "hjbcar/tracer.hpp"

using namespace hjbcar;

TEST_SUITE_BEGIN("tracer");

namespace {

const CarParams kPaperCar = CarParams::make(0.07, 0.04, 4.0);

struct FreeSpaceRun {
  Grid4 grid;
  Scene scene;
  ValueFunction vf;
};

/// Shared free-space solve: start west, target east, both heading east.
const FreeSpaceRun& free_run() {
  static const FreeSpaceRun run = [] {
    Scene s;
    s.horizon = 2.5;
    const Grid4 g = Grid4::make(-1, 1, -1, 1, 30, 30, 32, s.horizon, kPaperCar);
    ValueFunction vf = solve(s, {0.5, 0.0, 0.0}, g, kPaperCar);
    return FreeSpaceRun{g, s, std::move(vf)};
  }();
  return run;
}

}  // namespace

TEST_CASE("free-space trace reaches the aligned target in about unit time") {
  const FreeSpaceRun& run = free_run();
  const Trajectory tr = trace(run.vf, {-0.5, 0.0, 0.0}, run.scene, kPaperCar);
  REQUIRE(tr.arrived());
  const double duration = *tr.arrival_time;
  CHECK(duration == doctest::Approx(1.0).epsilon(0.1));

  const double u0 = run.vf.interpolate(-0.5, 0.0, 0.0, 0.0);
  const TracerParams p = TracerParams{}.resolved(run.vf);
  // One-sided: the traced plan can never beat the value function by more
  // than step and arrival slack.
  CHECK(duration - u0 <= 2.0 * p.delta + 2.0 * run.grid.dt() + p.pos_tol +
                             p.ang_tol / kPaperCar.W);
  // And it halts a tolerance early at worst.
  CHECK(u0 - duration <= p.pos_tol + p.ang_tol / kPaperCar.W + 2.0 * p.delta);

  SUBCASE("only admissible controls appear") {
    for (const TrajectorySample& s : tr.samples) {
      CHECK(is_admissible({s.v, s.w}));
      CHECK_FALSE((s.v == 0 && s.w != 0));
    }
  }
  SUBCASE("the interpolated value decreases along the path") {
    double prev = run.vf.interpolate(tr.samples.front().x, tr.samples.front().y,
                                     tr.samples.front().theta, tr.samples.front().t);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
      const TrajectorySample& s = tr.samples[i];
      const double v = run.vf.interpolate(s.x, s.y, s.theta, std::min(s.t, run.grid.T()));
      const TrajectorySample& before = tr.samples[i - 1];
      const bool waiting = before.v == 0 && before.w == 0;
      if (waiting) {
        CHECK(s.x == before.x);  // exact stasis while waiting
        CHECK(s.y == before.y);
      } else {
        CHECK(v <= prev - tr.delta / 2);
      }
      prev = v;
    }
  }
  SUBCASE("validation passes and the samples are exact Euler steps") {
    const ValidationReport rep =
        validate_trajectory(tr, run.scene, kPaperCar, 10, 0.02);
    CHECK(rep.pass);
  }
}

TEST_CASE("a start at the target yields an empty trajectory") {
  const FreeSpaceRun& run = free_run();
  const Configuration target = run.vf.target_config();
  const Trajectory tr = trace(run.vf, target, run.scene, kPaperCar);
  CHECK(tr.arrived());
  CHECK(*tr.arrival_time == 0.0);
  CHECK(tr.samples.empty());
}

TEST_CASE("illegal or hopeless starts are rejected") {
  const FreeSpaceRun& run = free_run();
  SUBCASE("start inside an obstacle") {
    Scene s = run.scene;
    s.obstacles.emplace_back(StaticDisk{{-0.5, 0.0}, 0.2});
    const Grid4 g = Grid4::make(-1, 1, -1, 1, 30, 30, 32, s.horizon, kPaperCar);
    const ValueFunction vf = solve(s, {0.5, 0.0, 0.0}, g, kPaperCar);
    CHECK_THROWS_AS(trace(vf, {-0.5, 0.0, 0.0}, s, kPaperCar), std::invalid_argument);
  }
  SUBCASE("start outside the domain") {
    CHECK_THROWS_AS(trace(run.vf, {-2.0, 0.0, 0.0}, run.scene, kPaperCar),
                    std::invalid_argument);
  }
  SUBCASE("unreachable start (value at the sentinel)") {
    // Against the west wall facing it, boxed in by the boundary: at this
    // horizon the value is still the sentinel near the corner.
    Scene s;
    s.horizon = 0.3;
    const Grid4 g = Grid4::make(-1, 1, -1, 1, 30, 30, 32, s.horizon, kPaperCar);
    const ValueFunction vf = solve(s, {0.5, 0.0, 0.0}, g, kPaperCar);
    CHECK_THROWS_AS(trace(vf, {-0.9, -0.9, 0.0}, s, kPaperCar), std::invalid_argument);
  }
}

TEST_CASE("validation catches bad trajectories") {
  const FreeSpaceRun& run = free_run();
  SUBCASE("a path driven through a disk fails with a located violation") {
    Scene s = run.scene;
    s.obstacles.emplace_back(StaticDisk{{0.0, 0.0}, 0.15});
    Trajectory tr;
    tr.start = {-0.5, 0.0, 0.0};
    tr.delta = 0.1;
    for (int i = 0; i <= 10; ++i)
      tr.samples.push_back({-0.5 + 0.1 * i, 0.0, 0.0, 0.1 * i, 1, 0});
    const ValidationReport rep = validate_trajectory(tr, s, kPaperCar, 10, 0.02);
    CHECK_FALSE(rep.pass);
    CHECK(rep.violation_time >= 0.2);
    CHECK(rep.violation_time <= 0.8);
  }
  SUBCASE("a teleporting sample fails the Euler check") {
    Trajectory tr;
    tr.start = {0.0, 0.0, 0.0};
    tr.delta = 0.1;
    tr.samples.push_back({0.0, 0.0, 0.0, 0.0, 1, 0});
    tr.samples.push_back({0.5, 0.0, 0.0, 0.1, 0, 0});  // five times too far
    const ValidationReport rep = validate_trajectory(tr, run.scene, kPaperCar, 4, 0.02);
    CHECK_FALSE(rep.pass);
    CHECK(rep.message.find("Euler") != std::string::npos);
  }
  SUBCASE("any traced free-space output passes") {
    const Trajectory tr = trace(run.vf, {0.2, 0.6, 2.0}, run.scene, kPaperCar);
    CHECK(validate_trajectory(tr, run.scene, kPaperCar, 10, 0.02).pass);
  }
}

TEST_CASE("gradient diagnostic runs and reports a sane rate") {
  const FreeSpaceRun& run = free_run();
  const Trajectory tr = trace(run.vf, {-0.5, 0.0, 0.0}, run.scene, kPaperCar);
  const GradientDiagnostic d = compare_gradient_controls(run.vf, tr, kPaperCar);
  CHECK(d.samples > 0);
  CHECK(d.mismatches >= 0);
  CHECK(d.mismatches <= d.samples);
  CHECK(d.mismatch_rate() >= 0.0);
  CHECK(d.mismatch_rate() <= 1.0);
}

TEST_SUITE_END();
