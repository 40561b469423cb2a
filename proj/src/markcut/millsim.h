#pragma once

#include <array>
#include <string>
#include <vector>

#include "markcut/depthmap.h"
#include "markcut/raster.h"
#include "markcut/surface.h"
#include "markcut/toolpath.h"

namespace markcut {

// Absolute top-of-material height per cell.
struct Heightfield {
  RealRaster z;
  RasterGeometry geometry;
};

Heightfield make_stock(const RasterGeometry& geometry, double top_z);

// Tool-center samples along every cut and plunge move, spaced at most
// `step` apart, endpoints included. Rapids contribute nothing.
std::vector<Vec3> cut_samples(const Trajectory& trajectory, double step);

// Spacing used by simulate: half a pixel, capped at 10 um. Near a ball rim
// the stamped height moves by about half the spacing, so a coarser step
// would not converge to 0.01 mm.
double sample_step(const RasterGeometry& geometry);

// Lowers the field under one tool placement.
void stamp_tool(Heightfield& field, const ToolConfig& tool, const Vec3& tip);

// Full material removal; samples at half the raster resolution.
Heightfield simulate(const Heightfield& stock, const Trajectory& trajectory);

// frames[k] is the state after the first ceil((k+1) N / count) samples of the
// same stream simulate() uses; the last frame equals simulate().
std::vector<Heightfield> animation_frames(const Heightfield& stock, const Trajectory& trajectory, int count);

Heightfield downsample(const Heightfield& field, int factor);

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Vec2> uv;
  std::vector<Rgb> colors;  // empty when uncolored
  std::vector<std::array<int, 3>> triangles;
};

// Top grid at cell centers, side skirt down to z = 0 and a bottom cap.
Mesh heightfield_to_mesh(const Heightfield& field, const SurfaceRaster* color = nullptr);
std::string mesh_to_obj(const Mesh& mesh);

struct HeightfieldComparison {
  double overcut_max_mm = 0;    // deepest cut below the target
  double undercut_max_mm = 0;   // worst leftover material on interior pixels
  double rms_mm = 0;            // over interior pixels
  double scallop_bound_mm = 0;
  std::size_t interior_pixels = 0;
  Mask interior;
};

double scallop_height(double radius_mm, double stepover_mm);

// Interior pixels lie farther than radius + stepover from any depth
// discontinuity (slope > 1, cut edge, owner change).
Mask interior_mask(const TargetDepthMap& target, double margin_mm);

HeightfieldComparison compare_heightfields(const Heightfield& simulated, double top_z, const TargetDepthMap& target,
                                           const ToolConfig& tool);

}  // namespace markcut
