#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "markcut/depthmap.h"
#include "markcut/geometry.h"
#include "markcut/marklang.h"

namespace markcut {

enum class ToolShape { kBallNose, kFlatEnd };

struct ToolConfig {
  ToolShape shape = ToolShape::kBallNose;
  double radius_mm = 0.794;             // 1/16 in diameter
  double stepover_fraction = 0.4;       // of diameter
  double max_depth_per_pass_mm = 2.0;
  double feed_mm_per_min = 800;
  double plunge_mm_per_min = 300;
  double safe_z_mm = 5.0;               // above the surface
  double spindle_rpm = 12000;

  double stepover_mm() const { return stepover_fraction * 2.0 * radius_mm; }
  // Throws ValidationError on out-of-range values.
  void validate() const;
};

enum class MoveKind { kRapid, kCut, kPlunge };
const char* move_kind_name(MoveKind k);

struct Move {
  MoveKind kind = MoveKind::kCut;
  Vec3 target;
  friend bool operator==(const Move&, const Move&) = default;
};

// Tool-tip motion in workspace coordinates (z absolute, the stock top at surface_z).
struct Trajectory {
  std::vector<Move> moves;
  double surface_z = 0;
  double safe_z() const { return surface_z + tool.safe_z_mm; }
  ToolConfig tool;
};

struct PlanResult {
  Trajectory trajectory;
  std::vector<double> layer_depths;
  std::vector<Diagnostic> diagnostics;  // NarrowFeatureWarning entries
};

// Height of the tip so a tool centered at (x, y) touches but never cuts below
// the target surface; never lower than floor_z. With xy_margin > 0 the result
// also holds for any center within xy_margin of (x, y).
double drop_cutter_z(const RealRaster& surface_heights, const RasterGeometry& geometry, const ToolConfig& tool,
                     double x, double y, double floor_z, double xy_margin = 0);

// Closed iso-contours of `field` at `level`; values outside the raster are 0.
// Coordinates are in mm via `geometry`.
std::vector<Polyline> iso_contours(const RealRaster& field, const RasterGeometry& geometry, double level);

// Layered coarse-to-fine contour-parallel plan over the target depth map.
PlanResult plan_toolpath(const TargetDepthMap& target, const ToolConfig& tool, double surface_z);

// Throws EmitError when a trajectory invariant fails.
void check_trajectory(const Trajectory& trajectory, double max_depth_mm);

struct GCodeDocument {
  std::string text;
  std::uint64_t checksum = 0;  // FNV-1a 64 of the text
  std::string checksum_hex() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

// Z words are written relative to the stock top (Z0 = surface).
GCodeDocument emit_gcode(const Trajectory& trajectory);

// Inverse of emit_gcode. G1 moves at or above safe height are reported as rapids.
Trajectory parse_gcode(const std::string& text, double surface_z = 0.0, double safe_z_mm = 5.0);

}  // namespace markcut
