#include "markcut/depthmap.h"

#include <algorithm>

#include "markcut/morphology.h"

namespace markcut {

double kernel_depth(double d, const DepthKernel& k) {
  if (d < 0) throw ArgumentError("distance must be non-negative");
  return std::min(k.slope * d, k.depth_limit_mm);
}

DepthKernel kernel_for(const CutItem& item) {
  return {item.wall_profile == WallProfile::kVertical ? KernelKind::kSteepLinear : KernelKind::kUserRamp,
          item.slope, item.depth_limit_mm};
}

double TargetDepthMap::max_depth() const {
  double m = 0;
  for (double d : depths.data()) m = std::max(m, d);
  return m;
}

RealRaster region_depth(const Mask& region, double res, const DepthKernel& k) {
  const RealRaster dist = morph::distance_inside(region);
  RealRaster out(region.width(), region.height(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (region[i]) out[i] = kernel_depth(dist[i] * res, k);
  return out;
}

TargetDepthMap build_target_depthmap(const CutProgram& prog, const RasterGeometry& geo) {
  TargetDepthMap t{RealRaster(geo.width, geo.height, 0.0), Raster<int>(geo.width, geo.height, -1), geo};
  const double tol = geo.resolution;
  for (const CutItem& it : prog.items) {
    if (!it.region_mask.same_shape(geo.width, geo.height))
      throw GeometryError("item " + std::to_string(it.item_id) + " mask does not match the raster");
    for (int id : it.boundary) {
      const Stroke* s = prog.stroke(id);
      if (!s) continue;
      for (Vec2 p : s->polyline)
        if (p.x < geo.offset_x - tol || p.y < geo.offset_y - tol ||
            p.x > geo.offset_x + geo.extent_x() + tol || p.y > geo.offset_y + geo.extent_y() + tol)
          throw GeometryError("item " + std::to_string(it.item_id) + " extends beyond the raster");
    }
    if (!(it.depth_limit_mm > 0)) throw GeometryError("item " + std::to_string(it.item_id) + " has no depth");
    const RealRaster d = region_depth(it.region_mask, geo.resolution, kernel_for(it));
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] > t.depths[i]) {
        t.depths[i] = d[i];
        t.owner[i] = it.item_id;
      }
  }
  return t;
}

}  // namespace markcut
