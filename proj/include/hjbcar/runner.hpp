#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hjbcar/io.hpp"
#include "hjbcar/oracle.hpp"
#include "hjbcar/render.hpp"
#include "hjbcar/solver.hpp"
#include "hjbcar/tracer.hpp"

namespace hjbcar {

/// Everything a run needs: where the scene comes from, the grid, solver and
/// tracer knobs, starts, and where outputs land. Flag-style overrides beat
/// the scene file.
struct RunConfig {
  std::string scene = "builtin:free_space";
  std::string out_dir;
  int res_x = 50, res_y = 50, res_theta = 64;  // cell counts
  double horizon = 0.0;                        // 0: scene file value
  double cfl_safety = 0.9;
  SolverParams solver;
  TracerParams tracer;
  std::vector<Configuration> starts;  // empty: scene file starts
  std::optional<Configuration> target_override;
  int oversample = 10;
  PlotSpec plot;
  bool write_dump = true;

  void validate() const;
};

struct SolveOutputs {
  Problem problem;
  ValueFunction vf;
  SolveReport report;
  io::Manifest manifest;
};

/// Loads the scene, solves on the configured grid, and (when out_dir is set)
/// writes the canonical scene copy, the value dump and the manifest.
SolveOutputs run_solve(const RunConfig& cfg);

struct TraceOutcome {
  Configuration start;
  Trajectory trajectory;
  ValidationReport validation;
  std::string csv_file;  // empty when not written
};

struct TraceOutputs {
  std::vector<TraceOutcome> outcomes;
  std::vector<std::string> frame_files;
  bool all_arrived_and_valid = true;
};

/// Traces every start, validates each trajectory at `oversample` times the
/// sample rate, and writes CSVs plus panel frames. An empty start list just
/// writes the trace manifest.
TraceOutputs run_trace(const RunConfig& cfg, const Problem& problem,
                       const ValueFunction& vf, const std::string& out_dir);

struct VerifyCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct VerifyOptions {
  int random_starts = 8;
  std::uint64_t seed = 20240901;
  int oversample = 10;
  int shoot_depth = 3;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  GradientDiagnostic gradient;
  bool all_pass = true;
};

/// Structural and semantic checks of a solved run: dump invariants, the CFL
/// record, a travel-time lower bound, stationarity for static scenes, oracle
/// dominance on sampled starts, and full trajectory validation.
VerifyReport run_verify(const io::RunDir& run, const VerifyOptions& opt);

nlohmann::ordered_json verify_report_json(const VerifyReport& rep);

}  // namespace hjbcar
