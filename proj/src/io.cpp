#include "hjbcar/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hjbcar/scene_library.hpp"

static_assert(std::endian::native == std::endian::little,
              "value dumps are little-endian; big-endian hosts are unsupported");

namespace hjbcar::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(origin + " (" + line_col(text, e.byte ? e.byte - 1 : 0) + ")",
                      e.what());
  }
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object())
    throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "/" + key, "missing required field");
  return *it;
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

double num_field(const json& j, const std::string& key, const std::string& path) {
  return num(require(j, key, path), path + "/" + key);
}

double num_or(const json& j, const std::string& key, double fallback,
              const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return num(j.at(key), path + "/" + key);
}

Vec2 vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    throw SchemaError(path, "expected [x, y]");
  return {num(j[0], path + "/0"), num(j[1], path + "/1")};
}

Configuration config(const json& j, const std::string& path) {
  return {num_field(j, "x", path), num_field(j, "y", path),
          num_field(j, "theta", path)};
}

Obstacle parse_obstacle(const json& j, double horizon, const std::string& path) {
  const json& kind_j = require(j, "kind", path);
  if (!kind_j.is_string()) throw SchemaError(path + "/kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();

  if (kind == "static_polygon") {
    const json& verts = require(j, "vertices", path);
    if (!verts.is_array()) throw SchemaError(path + "/vertices", "expected an array");
    StaticPolygon p;
    for (std::size_t i = 0; i < verts.size(); ++i)
      p.vertices.push_back(vec2(verts[i], path + "/vertices/" + std::to_string(i)));
    return p;
  }
  if (kind == "static_disk") {
    StaticDisk d;
    d.center = vec2(require(j, "center", path), path + "/center");
    d.radius = num_field(j, "radius", path);
    return d;
  }
  if (kind == "rotating_annular_sector") {
    RotatingAnnularSector s;
    s.center = vec2(require(j, "center", path), path + "/center");
    s.r_inner = num_field(j, "r_inner", path);
    s.r_outer = num_field(j, "r_outer", path);
    s.angle_start = num_field(j, "angle_start", path);
    s.angle_width = num_field(j, "angle_width", path);
    s.angular_speed = num_field(j, "angular_speed", path);
    return s;
  }
  if (kind == "oscillating_bar") {
    OscillatingBar b;
    b.center = vec2(require(j, "center", path), path + "/center");
    b.half_width = num_field(j, "half_width", path);
    b.half_height = num_field(j, "half_height", path);
    b.axis = vec2(require(j, "axis", path), path + "/axis");
    const double n = norm(b.axis);
    if (n == 0.0) throw SchemaError(path + "/axis", "axis must be nonzero");
    b.axis = (1.0 / n) * b.axis;
    b.amplitude = num_field(j, "amplitude", path);
    b.period = num_field(j, "period", path);
    b.phase = num_or(j, "phase", 0.0, path);
    return b;
  }
  if (kind == "moving_rectangle") {
    MovingRectangle r;
    r.half_width = num_field(j, "half_width", path);
    r.half_height = num_field(j, "half_height", path);
    if (j.contains("waypoints")) {
      const json& wps = j.at("waypoints");
      if (!wps.is_array() || wps.empty())
        throw SchemaError(path + "/waypoints", "expected a non-empty array");
      for (std::size_t i = 0; i < wps.size(); ++i) {
        const std::string wp_path = path + "/waypoints/" + std::to_string(i);
        r.waypoints.emplace_back(
            num_field(wps[i], "t", wp_path),
            vec2(require(wps[i], "center", wp_path), wp_path + "/center"));
      }
    } else if (j.contains("center") && j.contains("velocity")) {
      // Constant-velocity shorthand, canonicalized to two waypoints.
      const Vec2 c0 = vec2(j.at("center"), path + "/center");
      const Vec2 v = vec2(j.at("velocity"), path + "/velocity");
      r.waypoints = {{0.0, c0}, {horizon, c0 + horizon * v}};
    } else {
      throw SchemaError(path, "moving_rectangle needs waypoints or center+velocity");
    }
    return r;
  }
  throw SchemaError(path + "/kind", "unknown obstacle kind '" + kind + "'");
}

ordered_json obstacle_to_json(const Obstacle& o) {
  ordered_json j;
  std::visit(
      [&](const auto& ob) {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, StaticPolygon>) {
          j["kind"] = "static_polygon";
          auto& verts = j["vertices"] = ordered_json::array();
          for (const Vec2& v : ob.vertices) verts.push_back({v.x, v.y});
        } else if constexpr (std::is_same_v<T, StaticDisk>) {
          j["kind"] = "static_disk";
          j["center"] = {ob.center.x, ob.center.y};
          j["radius"] = ob.radius;
        } else if constexpr (std::is_same_v<T, RotatingAnnularSector>) {
          j["kind"] = "rotating_annular_sector";
          j["center"] = {ob.center.x, ob.center.y};
          j["r_inner"] = ob.r_inner;
          j["r_outer"] = ob.r_outer;
          j["angle_start"] = ob.angle_start;
          j["angle_width"] = ob.angle_width;
          j["angular_speed"] = ob.angular_speed;
        } else if constexpr (std::is_same_v<T, OscillatingBar>) {
          j["kind"] = "oscillating_bar";
          j["center"] = {ob.center.x, ob.center.y};
          j["half_width"] = ob.half_width;
          j["half_height"] = ob.half_height;
          j["axis"] = {ob.axis.x, ob.axis.y};
          j["amplitude"] = ob.amplitude;
          j["period"] = ob.period;
          j["phase"] = ob.phase;
        } else {
          static_assert(std::is_same_v<T, MovingRectangle>);
          j["kind"] = "moving_rectangle";
          j["half_width"] = ob.half_width;
          j["half_height"] = ob.half_height;
          auto& wps = j["waypoints"] = ordered_json::array();
          for (const auto& [t, c] : ob.waypoints) {
            ordered_json wp;
            wp["t"] = t;
            wp["center"] = {c.x, c.y};
            wps.push_back(wp);
          }
        }
      },
      o);
  return j;
}

ordered_json config_to_json(const Configuration& c) {
  ordered_json j;
  j["x"] = c.x;
  j["y"] = c.y;
  j["theta"] = c.theta;
  return j;
}

}  // namespace

Problem parse_problem(const std::string& text, const std::string& origin) {
  const json j = parse_text(text, origin);
  Problem p;
  const std::string root = origin;

  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw SchemaError(root + "/name", "expected a string");
    p.name = j.at("name").get<std::string>();
  }

  const json& dom = require(j, "domain", root);
  p.scene.x_min = num_field(dom, "x_min", root + "/domain");
  p.scene.x_max = num_field(dom, "x_max", root + "/domain");
  p.scene.y_min = num_field(dom, "y_min", root + "/domain");
  p.scene.y_max = num_field(dom, "y_max", root + "/domain");
  p.scene.horizon = num_field(j, "horizon", root);
  p.scene.inflation = num_or(j, "inflation", 0.0, root);

  const json& car = require(j, "car", root);
  p.car.d = num_field(car, "d", root + "/car");
  p.car.R = num_field(car, "R", root + "/car");
  p.car.W = num_field(car, "W", root + "/car");
  if (car.contains("body")) {
    const json& body = car.at("body");
    p.car.body_half_length = num_field(body, "half_length", root + "/car/body");
    p.car.body_half_width = num_field(body, "half_width", root + "/car/body");
  } else {
    p.car.body_half_length = p.car.d;
    p.car.body_half_width = p.car.R;
  }

  p.target = config(require(j, "target", root), root + "/target");

  if (j.contains("starts")) {
    const json& starts = j.at("starts");
    if (!starts.is_array()) throw SchemaError(root + "/starts", "expected an array");
    for (std::size_t i = 0; i < starts.size(); ++i)
      p.starts.push_back(config(starts[i], root + "/starts/" + std::to_string(i)));
  }

  if (j.contains("obstacles")) {
    const json& obs = j.at("obstacles");
    if (!obs.is_array()) throw SchemaError(root + "/obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i)
      p.scene.obstacles.push_back(parse_obstacle(
          obs[i], p.scene.horizon, root + "/obstacles/" + std::to_string(i)));
  }

  try {
    p.car.validate();
    p.scene.validate();
    if (!p.scene.in_domain(p.target.x, p.target.y))
      throw std::invalid_argument("target lies outside the domain");
  } catch (const std::invalid_argument& e) {
    throw SchemaError(root, e.what());
  }
  return p;
}

Problem load_problem(const std::string& path) {
  constexpr const char* kBuiltinPrefix = "builtin:";
  if (path.rfind(kBuiltinPrefix, 0) == 0) {
    const std::string name = path.substr(std::strlen(kBuiltinPrefix));
    try {
      return builtin_problem(name);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(path, e.what());
    }
  }
  return parse_problem(read_file(path), path);
}

ordered_json problem_to_json(const Problem& p) {
  ordered_json j;
  j["name"] = p.name;
  ordered_json dom;
  dom["x_min"] = p.scene.x_min;
  dom["x_max"] = p.scene.x_max;
  dom["y_min"] = p.scene.y_min;
  dom["y_max"] = p.scene.y_max;
  j["domain"] = dom;
  j["horizon"] = p.scene.horizon;
  j["inflation"] = p.scene.inflation;
  ordered_json car;
  car["d"] = p.car.d;
  car["R"] = p.car.R;
  car["W"] = p.car.W;
  ordered_json body;
  body["half_length"] = p.car.body_half_length;
  body["half_width"] = p.car.body_half_width;
  car["body"] = body;
  j["car"] = car;
  j["target"] = config_to_json(p.target);
  auto& starts = j["starts"] = ordered_json::array();
  for (const Configuration& s : p.starts) starts.push_back(config_to_json(s));
  auto& obs = j["obstacles"] = ordered_json::array();
  for (const Obstacle& o : p.scene.obstacles) obs.push_back(obstacle_to_json(o));
  return j;
}

void save_problem(const Problem& p, const std::string& path) {
  write_file(path, problem_to_json(p).dump(2) + "\n");
}

// --- manifest ----------------------------------------------------------------

void write_manifest(const Manifest& m, const std::string& path) {
  ordered_json j;
  j["format"] = "hjbcar-run/1";
  j["scene_file"] = m.scene_file;
  j["value_dump"] = m.value_dump;
  ordered_json grid;
  grid["x_min"] = m.x_min;
  grid["x_max"] = m.x_max;
  grid["y_min"] = m.y_min;
  grid["y_max"] = m.y_max;
  grid["I"] = m.I;
  grid["J"] = m.J;
  grid["K"] = m.K;
  grid["N"] = m.N;
  grid["horizon"] = m.horizon;
  j["grid"] = grid;
  j["dt"] = m.dt;
  j["cfl_bound"] = m.cfl_bound;
  j["cfl_safety"] = m.cfl_safety;
  j["sentinel"] = m.sentinel;
  j["slice_stride"] = m.slice_stride;
  j["stored_slices"] = m.stored_slices;
  j["target_node"] = {m.target_node.i, m.target_node.j, m.target_node.k};
  j["reachable_fraction"] = m.reachable_fraction;
  j["target_masked_steps"] = m.target_masked_steps;
  j["wall_seconds"] = m.wall_seconds;
  write_file(path, j.dump(2) + "\n");
}

Manifest load_manifest(const std::string& path) {
  const std::string text = read_file(path);
  const json j = parse_text(text, path);
  if (!j.contains("format") || j.at("format") != "hjbcar-run/1")
    throw SchemaError(path + "/format", "not a run manifest");
  Manifest m;
  m.scene_file = require(j, "scene_file", path).get<std::string>();
  m.value_dump = require(j, "value_dump", path).get<std::string>();
  const json& grid = require(j, "grid", path);
  m.x_min = num_field(grid, "x_min", path + "/grid");
  m.x_max = num_field(grid, "x_max", path + "/grid");
  m.y_min = num_field(grid, "y_min", path + "/grid");
  m.y_max = num_field(grid, "y_max", path + "/grid");
  m.I = static_cast<int>(num_field(grid, "I", path + "/grid"));
  m.J = static_cast<int>(num_field(grid, "J", path + "/grid"));
  m.K = static_cast<int>(num_field(grid, "K", path + "/grid"));
  m.N = static_cast<int>(num_field(grid, "N", path + "/grid"));
  m.horizon = num_field(grid, "horizon", path + "/grid");
  m.dt = num_field(j, "dt", path);
  m.cfl_bound = num_field(j, "cfl_bound", path);
  m.cfl_safety = num_field(j, "cfl_safety", path);
  m.sentinel = num_field(j, "sentinel", path);
  m.slice_stride = static_cast<int>(num_field(j, "slice_stride", path));
  for (const auto& n : require(j, "stored_slices", path))
    m.stored_slices.push_back(n.get<int>());
  const json& tn = require(j, "target_node", path);
  if (!tn.is_array() || tn.size() != 3)
    throw SchemaError(path + "/target_node", "expected [i, j, k]");
  m.target_node = {tn[0].get<int>(), tn[1].get<int>(), tn[2].get<int>(), -1};
  m.reachable_fraction = num_field(j, "reachable_fraction", path);
  m.target_masked_steps = static_cast<int>(num_field(j, "target_masked_steps", path));
  m.wall_seconds = num_field(j, "wall_seconds", path);
  return m;
}

// --- value dump ----------------------------------------------------------------

void write_value_dump(const ValueFunction& vf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const Grid4& g = vf.grid();
  for (int s = 0; s < vf.num_stored(); ++s) {
    const std::uint32_t header[4] = {
        static_cast<std::uint32_t>(g.I()), static_cast<std::uint32_t>(g.J()),
        static_cast<std::uint32_t>(g.K()), static_cast<std::uint32_t>(vf.stored_n(s))};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    const auto& slice = vf.slice(s);
    out.write(reinterpret_cast<const char*>(slice.data()),
              static_cast<std::streamsize>(slice.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

ValueFunction load_value_dump(const Manifest& m, const CarParams& car,
                              const std::string& path) {
  Grid4 grid = Grid4::with_steps(m.x_min, m.x_max, m.y_min, m.y_max, m.I, m.J, m.K,
                                 m.horizon, m.N, car);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path, "cannot open value dump");

  std::vector<int> ns;
  std::vector<std::vector<float>> slices;
  for (;;) {
    std::uint32_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != sizeof(header))
      throw SchemaError(path, "truncated slice header");
    if (header[0] != static_cast<std::uint32_t>(m.I) ||
        header[1] != static_cast<std::uint32_t>(m.J) ||
        header[2] != static_cast<std::uint32_t>(m.K))
      throw SchemaError(path, "slice header disagrees with the manifest grid");
    std::vector<float> slice(grid.slice_size());
    in.read(reinterpret_cast<char*>(slice.data()),
            static_cast<std::streamsize>(slice.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != slice.size() * sizeof(float))
      throw SchemaError(path, "truncated slice payload");
    ns.push_back(static_cast<int>(header[3]));
    slices.push_back(std::move(slice));
  }
  if (ns != m.stored_slices)
    throw SchemaError(path, "stored slice list disagrees with the manifest");
  try {
    return ValueFunction(std::move(grid), m.sentinel, m.slice_stride, m.target_node,
                         std::move(ns), std::move(slices));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
}

RunDir load_run_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  const Manifest m = load_manifest((fs::path(dir) / "manifest.json").string());
  Problem problem = load_problem((fs::path(dir) / m.scene_file).string());
  ValueFunction vf =
      load_value_dump(m, problem.car, (fs::path(dir) / m.value_dump).string());
  return RunDir{std::move(problem), m, std::move(vf), m.cfl_safety};
}

// --- flat exports ----------------------------------------------------------

std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t,x,y,theta,v,w\n";
  char buf[160];
  for (const TrajectorySample& s : tr.samples) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%d,%d\n", s.t, s.x, s.y,
                  s.theta, s.v, s.w);
    out += buf;
  }
  return out;
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
  write_file(path, trajectory_csv(tr));
}

void write_value_csv(const ValueFunction& vf, double theta, double t,
                     const std::string& path) {
  const Grid4& g = vf.grid();
  std::string out = "x,y,value\n";
  char buf[160];
  for (int i = 0; i <= g.I(); ++i) {
    for (int j = 0; j <= g.J(); ++j) {
      const Configuration c = g.node_config(i, j, 0);
      const double v = vf.interpolate(c.x, c.y, theta, t);
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", c.x, c.y, v);
      out += buf;
    }
  }
  write_file(path, out);
}

}  // namespace hjbcar::io
