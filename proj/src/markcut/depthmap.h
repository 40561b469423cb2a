#pragma once

#include "markcut/marklang.h"
#include "markcut/raster.h"

namespace markcut {

enum class KernelKind { kSteepLinear, kUserRamp };

struct DepthKernel {
  KernelKind kind = KernelKind::kSteepLinear;
  double slope = 10.0;          // mm of depth per mm of distance
  double depth_limit_mm = 3.0;
};

// min(slope * distance, limit)
double kernel_depth(double distance_mm, const DepthKernel& kernel);

DepthKernel kernel_for(const CutItem& item);

struct TargetDepthMap {
  RealRaster depths;       // mm below the surface, >= 0
  Raster<int> owner;       // item id, or -1
  RasterGeometry geometry;
  double max_depth() const;
};

// Per-item exact EDT of the region, kernel mapping, per-pixel max merge.
TargetDepthMap build_target_depthmap(const CutProgram& program, const RasterGeometry& geometry);

// Depth map of a single region under one kernel.
RealRaster region_depth(const Mask& region, double resolution, const DepthKernel& kernel);

}  // namespace markcut
