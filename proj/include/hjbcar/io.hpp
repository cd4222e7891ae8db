#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjbcar/solver.hpp"
#include "hjbcar/tracer.hpp"

namespace hjbcar::io {

/// Malformed or semantically invalid input: bad JSON, missing or mistyped
/// fields, impossible configuration values. `where` is a line:column position
/// for parse errors or a JSON pointer for field errors.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// --- scene files -----------------------------------------------------------

/// Parses a scene file. Paths of the form "builtin:<name>" resolve to the
/// built-in problem library.
Problem load_problem(const std::string& path);
Problem parse_problem(const std::string& text, const std::string& origin);

/// Canonical serialized form; parse(serialize(parse(x))) == parse(x).
nlohmann::ordered_json problem_to_json(const Problem& p);
void save_problem(const Problem& p, const std::string& path);

// --- run directories -------------------------------------------------------

struct Manifest {
  std::string scene_file = "scene.json";
  std::string value_dump = "value.bin";
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  int I = 0, J = 0, K = 0, N = 0;
  double horizon = 0;
  double dt = 0;
  double cfl_bound = 0;
  double cfl_safety = 0;
  double sentinel = 0;
  int slice_stride = 1;
  std::vector<int> stored_slices;
  NodeIndex target_node;
  double reachable_fraction = 0;
  int target_masked_steps = 0;
  double wall_seconds = 0;
};

void write_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);

/// Stored slices as concatenated records: a 16-byte little-endian header
/// {I, J, K, n} of uint32, then (I+1)*(J+1)*K float32 values, row-major in
/// (i, j, k) with k fastest.
void write_value_dump(const ValueFunction& vf, const std::string& path);
ValueFunction load_value_dump(const Manifest& m, const CarParams& car,
                              const std::string& path);

/// A solved run loaded back from disk.
struct RunDir {
  Problem problem;
  Manifest manifest;
  ValueFunction vf;
  double cfl_safety = 0;
};
RunDir load_run_dir(const std::string& dir);

// --- flat exports ----------------------------------------------------------

/// Header `t,x,y,theta,v,w`, one row per sample, 9 significant digits.
void write_trajectory_csv(const Trajectory& tr, const std::string& path);
std::string trajectory_csv(const Trajectory& tr);

/// Planar slice of the value function at fixed heading and time:
/// header `x,y,value`, one row per spatial node.
void write_value_csv(const ValueFunction& vf, double theta, double t,
                     const std::string& path);

}  // namespace hjbcar::io
