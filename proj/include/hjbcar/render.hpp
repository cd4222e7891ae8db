#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hjbcar/scene.hpp"
#include "hjbcar/tracer.hpp"

namespace hjbcar {

using Color = std::array<std::uint8_t, 3>;

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Image(int w, int h, Color fill = {255, 255, 255});
  void set(int px, int py, Color c);
};

/// Binary portable pixmap (P6), one file per frame.
void save_ppm(const Image& img, const std::string& path);

struct PlotSpec {
  std::vector<double> times;  // empty: spread over the longest trajectory
  int width = 600;
  int height = 600;
  int frames = 4;             // used when times is empty
  bool overlay_trajectories = true;
  bool overlay_footprints = true;
};

/// One panel: obstacles at time t, start and target stars, trajectory
/// polylines, and the car footprints at time t.
Image render_frame(const Problem& problem, double t,
                   const std::vector<Trajectory>& trajectories, const PlotSpec& spec);

/// Writes `spec.frames` panels (or one per explicit time) named
/// <prefix>_<index>.ppm into `dir`; returns the file names.
std::vector<std::string> render_frames(const Problem& problem,
                                       const std::vector<Trajectory>& trajectories,
                                       const PlotSpec& spec, const std::string& dir,
                                       const std::string& prefix);

}  // namespace hjbcar
