#pragma once

#include <optional>

#include "markcut/raster.h"
#include "markcut/scanio.h"

namespace markcut {

struct SurfaceConfig {
  // Workspace XY crop; unset bounds do not crop.
  std::optional<double> x_min, x_max, y_min, y_max;
  double z_min = 5.0;
  double z_max = 160.0;
  double step = 0.5;
};

struct SurfaceRaster {
  ColorImage color;
  Mask valid;
  RasterGeometry geometry;
  double surface_z = 0;
};

struct RasterizeOptions {
  double band_mm = 2.0;
  int upscale = 10;
  int fill_radius_cells = 2;   // hole filling reach at base resolution
};

// Points of `cloud` (workspace coordinates) inside the XY crop and z-range.
PointCloud crop_workspace(const PointCloud& cloud, const SurfaceConfig& config);

// Top-down scan in `step` increments from z_max: the first candidate with more
// than half of the cropped points at or above it.
double extract_surface(const PointCloud& cloud, const SurfaceConfig& config = {});

SurfaceRaster rasterize_surface(const PointCloud& cloud, double surface_z, double base_resolution,
                                const SurfaceConfig& config = {}, const RasterizeOptions& options = {});

}  // namespace markcut
