#pragma once

#include <string>
#include <vector>

#include "hjbcar/scene.hpp"

namespace hjbcar {

/// Built-in problems. The obstacle geometries and speeds of the three demo
/// scenes are reconstructions tuned to reproduce the qualitative behavior of
/// the reference figures; all numbers live here, not in the solver.
std::vector<std::string> builtin_problem_names();
Problem builtin_problem(const std::string& name);

Problem free_space();        // straight run to an aligned target
Problem point_car_arc();     // point car, quarter-turn target
Problem rotating_sectors();  // four rotating annular sectors around the target
Problem moving_doors();      // three oscillating doorways
Problem lane_change();       // merge between two moving cars
Problem static_blocks();     // static obstacles, exercises stationarity

}  // namespace hjbcar
