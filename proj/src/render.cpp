#include "hjbcar/render.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace hjbcar {

namespace {

constexpr Color kBlack{25, 25, 25};
constexpr Color kBlue{70, 90, 220};
constexpr Color kGray{90, 90, 90};
constexpr Color kPath{235, 140, 30};
constexpr Color kCar{200, 80, 10};
constexpr Color kStart{0, 150, 40};
constexpr Color kTarget{210, 30, 30};
constexpr Color kBorder{160, 160, 160};

struct Mapper {
  const Scene& scene;
  int w, h;
  double px(double x) const {
    return (x - scene.x_min) / (scene.x_max - scene.x_min) * (w - 1);
  }
  double py(double y) const {
    return (scene.y_max - y) / (scene.y_max - scene.y_min) * (h - 1);
  }
  double world_x(int p) const {
    return scene.x_min + (p + 0.5) / w * (scene.x_max - scene.x_min);
  }
  double world_y(int p) const {
    return scene.y_max - (p + 0.5) / h * (scene.y_max - scene.y_min);
  }
};

void draw_line(Image& img, double x0, double y0, double x1, double y1, Color c) {
  const int steps =
      1 + static_cast<int>(std::max(std::abs(x1 - x0), std::abs(y1 - y0)));
  for (int s = 0; s <= steps; ++s) {
    const double f = static_cast<double>(s) / steps;
    img.set(static_cast<int>(std::lround(x0 + f * (x1 - x0))),
            static_cast<int>(std::lround(y0 + f * (y1 - y0))), c);
  }
}

void draw_star(Image& img, double px, double py, int r, Color c) {
  for (int s = -r; s <= r; ++s) {
    img.set(static_cast<int>(px) + s, static_cast<int>(py), c);
    img.set(static_cast<int>(px), static_cast<int>(py) + s, c);
    img.set(static_cast<int>(px) + s, static_cast<int>(py) + s, c);
    img.set(static_cast<int>(px) + s, static_cast<int>(py) - s, c);
  }
}

/// Fast sectors are drawn black, slow ones blue, mirroring the reference
/// panels; bars black, moving rectangles blue, static shapes gray.
Color obstacle_color(const Obstacle& o, double max_sector_speed) {
  return std::visit(
      [&](const auto& ob) -> Color {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, RotatingAnnularSector>) {
          return std::abs(ob.angular_speed) >= 0.99 * max_sector_speed ? kBlack : kBlue;
        } else if constexpr (std::is_same_v<T, OscillatingBar>) {
          return kBlack;
        } else if constexpr (std::is_same_v<T, MovingRectangle>) {
          return kBlue;
        } else {
          return kGray;
        }
      },
      o);
}

Configuration state_at(const Trajectory& tr, double t) {
  if (tr.samples.empty()) return tr.start;
  if (t <= tr.samples.front().t)
    return {tr.samples.front().x, tr.samples.front().y, tr.samples.front().theta};
  for (std::size_t s = 0; s + 1 < tr.samples.size(); ++s) {
    const auto& a = tr.samples[s];
    const auto& b = tr.samples[s + 1];
    if (t <= b.t) {
      const double f = (t - a.t) / (b.t - a.t);
      return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y),
              a.theta + f * angle_diff(b.theta, a.theta)};
    }
  }
  const auto& last = tr.samples.back();
  return {last.x, last.y, last.theta};
}

}  // namespace

Image::Image(int w, int h, Color fill) : width(w), height(h) {
  rgb.assign(static_cast<std::size_t>(w) * h * 3, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) set(x, y, fill);
}

void Image::set(int px, int py, Color c) {
  if (px < 0 || px >= width || py < 0 || py >= height) return;
  const std::size_t at = (static_cast<std::size_t>(py) * width + px) * 3;
  rgb[at] = c[0];
  rgb[at + 1] = c[1];
  rgb[at + 2] = c[2];
}

void save_ppm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
}

Image render_frame(const Problem& problem, double t,
                   const std::vector<Trajectory>& trajectories, const PlotSpec& spec) {
  const Scene& scene = problem.scene;
  Image img(spec.width, spec.height);
  const Mapper map{scene, spec.width, spec.height};

  double max_sector_speed = 0.0;
  for (const Obstacle& o : scene.obstacles)
    if (const auto* s = std::get_if<RotatingAnnularSector>(&o))
      max_sector_speed = std::max(max_sector_speed, std::abs(s->angular_speed));

  // Obstacle fill, pixel by pixel; first obstacle containing the point wins.
  const double t_clamped = std::clamp(t, 0.0, scene.horizon);
  std::vector<ObstacleSnapshot> snaps;
  std::vector<Color> colors;
  for (const Obstacle& o : scene.obstacles) {
    snaps.emplace_back(o, t_clamped, scene.inflation);
    colors.push_back(obstacle_color(o, max_sector_speed));
  }
  for (int py = 0; py < spec.height; ++py) {
    const double wy = map.world_y(py);
    for (int px = 0; px < spec.width; ++px) {
      const Vec2 p{map.world_x(px), wy};
      for (std::size_t s = 0; s < snaps.size(); ++s) {
        if (snaps[s].contains(p)) {
          img.set(px, py, colors[s]);
          break;
        }
      }
    }
  }

  for (int px = 0; px < spec.width; ++px) {
    img.set(px, 0, kBorder);
    img.set(px, spec.height - 1, kBorder);
  }
  for (int py = 0; py < spec.height; ++py) {
    img.set(0, py, kBorder);
    img.set(spec.width - 1, py, kBorder);
  }

  if (spec.overlay_trajectories) {
    for (const Trajectory& tr : trajectories) {
      for (std::size_t s = 0; s + 1 < tr.samples.size(); ++s) {
        draw_line(img, map.px(tr.samples[s].x), map.py(tr.samples[s].y),
                  map.px(tr.samples[s + 1].x), map.py(tr.samples[s + 1].y), kPath);
      }
    }
  }

  if (spec.overlay_footprints) {
    for (const Trajectory& tr : trajectories) {
      const Configuration c = state_at(tr, t);
      const Footprint fp = footprint(c, problem.car);
      for (int e = 0; e < 4; ++e) {
        const Vec2 a = fp.corners[e];
        const Vec2 b = fp.corners[(e + 1) % 4];
        draw_line(img, map.px(a.x), map.py(a.y), map.px(b.x), map.py(b.y), kCar);
      }
    }
  }

  for (const Trajectory& tr : trajectories)
    draw_star(img, map.px(tr.start.x), map.py(tr.start.y), spec.width / 90, kStart);
  draw_star(img, map.px(problem.target.x), map.py(problem.target.y), spec.width / 90,
            kTarget);
  return img;
}

std::vector<std::string> render_frames(const Problem& problem,
                                       const std::vector<Trajectory>& trajectories,
                                       const PlotSpec& spec, const std::string& dir,
                                       const std::string& prefix) {
  std::vector<double> times = spec.times;
  if (times.empty()) {
    double span = 0.0;
    for (const Trajectory& tr : trajectories)
      span = std::max(span, tr.samples.empty() ? 0.0 : tr.samples.back().t);
    if (span == 0.0) span = problem.scene.horizon;
    const int n = std::max(1, spec.frames);
    for (int f = 0; f < n; ++f)
      times.push_back(span * f / std::max(1, n - 1));
  }
  std::vector<std::string> files;
  for (std::size_t f = 0; f < times.size(); ++f) {
    const Image img = render_frame(problem, times[f], trajectories, spec);
    const std::string name = prefix + "_" + std::to_string(f) + ".ppm";
    save_ppm(img, (std::filesystem::path(dir) / name).string());
    files.push_back(name);
  }
  return files;
}

}  // namespace hjbcar
