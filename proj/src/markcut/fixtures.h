#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "markcut/marklang.h"
#include "markcut/registration.h"
#include "markcut/scanio.h"
#include "markcut/surface.h"

namespace markcut {

struct StrokeSpec {
  ColorClass color = ColorClass::kContour;
  double width_mm = 4.0;
  Polyline points;
  bool closed = false;
};

struct CameraSpec {
  int width = 1280, height = 960;
  double fx = 1600, fy = 1600;
  double height_mm = 600;  // above the bed, over the workspace center
  double yaw_deg = 0;      // about the optical axis
  double tilt_deg = 0;     // about the camera x axis
};

struct NoiseSpec {
  double depth_sigma_mm = 0;
  std::uint64_t seed = 1;
  // Synthetic working-range error: the stock top reads closer to the camera
  // by bias_per_mm2 * (height - optimum_height)^2.
  double bias_per_mm2 = 0;
  double optimum_height_mm = 35;
};

struct SceneSpec {
  double workspace_x_mm = 300, workspace_y_mm = 220;
  double stock_x0 = 40, stock_y0 = 40, stock_x1 = 260, stock_y1 = 180;
  double stock_height_mm = 30;
  std::vector<Vec2> fiducials;  // empty: default ten-marker layout
  double fiducial_size_mm = 20;
  std::vector<StrokeSpec> strokes;
  NoiseSpec noise;
  int frame_count = 3;
  CameraSpec camera;

  std::vector<Vec2> fiducial_centers() const;
  // Throws SpecError.
  void validate() const;
};

// Corners plus edge points of a rectangle inset by half a marker plus 5 mm.
std::vector<Vec2> default_fiducial_layout(double workspace_x_mm, double workspace_y_mm, double size_mm);

struct GroundTruth {
  RigidTransform camera_to_workspace;
  double surface_z = 0;
  std::vector<Vec2> fiducials;
  std::vector<StrokeSpec> strokes;
};

struct RenderedScene {
  ScanBundle bundle;
  GroundTruth truth;
};

RenderedScene render_scene(const SceneSpec& spec);

// Ideal top-down texture of the stock top at `resolution_mm` per pixel.
SurfaceRaster render_surface_raster(const SceneSpec& spec, double resolution_mm);

// Pen and material colors used by the renderer.
Rgb pen_color(ColorClass c);
inline constexpr Rgb kWoodColor{205, 170, 120};

SceneSpec parse_scene_spec(const std::string& json_text);
std::string scene_spec_json(const SceneSpec& spec);

// Drawing helpers (mm).
StrokeSpec circle_stroke(ColorClass c, Vec2 center, double radius, double width = 4.0, int segments = 96);
StrokeSpec rect_stroke(ColorClass c, Vec2 lo, Vec2 hi, double width = 4.0);
StrokeSpec line_stroke(ColorClass c, Vec2 a, Vec2 b, double width = 4.0);
// Two crossing bars; they rasterize into one connected mark.
std::vector<StrokeSpec> cross_strokes(ColorClass c, Vec2 center, double arm, double width = 4.0);

struct ExpectedItem {
  ItemKind kind;
  WallProfile wall;
  friend bool operator==(const ExpectedItem&, const ExpectedItem&) = default;
};

struct GoldenCase {
  std::string name;
  SceneSpec spec;
  std::vector<ExpectedItem> items;          // compared as sorted multisets
  std::vector<std::string> diagnostics;     // codes, sorted
  int behavior_strokes = -1;                // -1: not checked
};

// The six-case color/placement matrix plus the conflict case.
std::vector<GoldenCase> language_goldens();
// 5 x 9 grid with crosses at 23 of its intersections.
GoldenCase cross_grid_case();
GoldenCase min_feature_case(double width_mm);
// Edge joint, T-joint, slots and a kerf line set.
std::vector<GoldenCase> demo_cases();
// Flat stock with one pocket for a stock-height sweep. Uses a working-range
// bias of 0.02 mm per mm^2 around an optimum height of 35 mm.
SceneSpec height_sweep_scene(double stock_height_mm, double depth_sigma_mm, std::uint64_t seed);

}  // namespace markcut
