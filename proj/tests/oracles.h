#pragma once

// Slow, independent reference computations shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <cmath>
#include <vector>

#include "markcut/depthmap.h"
#include "markcut/geometry.h"
#include "markcut/raster.h"
#include "markcut/surface.h"

namespace oracle {

// Top-down fraction scan: first candidate with more than half the cropped
// points at or above it. Returns NaN when nothing qualifies.
inline double surface_z(const std::vector<markcut::Vec3>& pts, const markcut::SurfaceConfig& c) {
  std::vector<double> zs;
  for (const auto& p : pts) {
    if (c.x_min && p.x < *c.x_min) continue;
    if (c.x_max && p.x > *c.x_max) continue;
    if (c.y_min && p.y < *c.y_min) continue;
    if (c.y_max && p.y > *c.y_max) continue;
    if (p.z < c.z_min || p.z > c.z_max) continue;
    zs.push_back(p.z);
  }
  if (zs.empty()) return std::nan("");
  for (int k = 0;; ++k) {
    const double cand = c.z_max - k * c.step;
    if (cand < c.z_min - 1e-12) break;
    std::size_t above = 0;
    for (double z : zs)
      if (z >= cand) ++above;
    if (2 * above > zs.size()) return cand;
  }
  return std::nan("");
}

// Per pixel: distance (mm) from its center to the nearest pixel center outside
// the region, pixels beyond the raster counting as outside, pushed through the
// kernel. Pixels with no outside pixel in the saturation window are at the
// limit; the rest search square rings outward until the ring is farther than
// the best hit.
inline markcut::RealRaster boundary_depth(const markcut::Mask& region, double res,
                                          const markcut::DepthKernel& k) {
  const int w = region.width(), h = region.height();
  const int reach = static_cast<int>(std::ceil(k.depth_limit_mm / k.slope / res)) + 2;
  auto outside = [&](int x, int y) { return x < 0 || y < 0 || x >= w || y >= h || !region(x, y); };
  // prefix counts of outside pixels over the raster padded by reach
  const int pw = w + 2 * reach, ph = h + 2 * reach;
  std::vector<long> pre(static_cast<std::size_t>(pw + 1) * (ph + 1), 0);
  auto at = [&](int x, int y) -> long& { return pre[static_cast<std::size_t>(y) * (pw + 1) + x]; };
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x)
      at(x + 1, y + 1) = at(x, y + 1) + at(x + 1, y) - at(x, y) + (outside(x - reach, y - reach) ? 1 : 0);
  auto window = [&](int x, int y) {
    const int x0 = x, y0 = y, x1 = x + 2 * reach + 1, y1 = y + 2 * reach + 1;  // padded coordinates
    return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
  };
  markcut::RealRaster out(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!region(x, y)) continue;
      if (window(x, y) == 0) {
        out(x, y) = k.depth_limit_mm;
        continue;
      }
      double best = 1e300;
      for (int r = 1; r <= 2 * reach && r < best; ++r)
        for (int dy = -r; dy <= r; ++dy) {
          const int step = std::abs(dy) == r ? 1 : 2 * r;
          for (int dx = -r; dx <= r; dx += step)
            if (outside(x + dx, y + dy)) best = std::min(best, std::sqrt(double(dx * dx + dy * dy)));
        }
      out(x, y) = std::min(k.slope * best * res, k.depth_limit_mm);
    }
  }
  return out;
}

// Textbook two-subiteration Zhang-Suen, recomputing every neighborhood from a
// frozen copy of the previous state.
inline markcut::Mask thin_reference(markcut::Mask m) {
  const int w = m.width(), h = m.height();
  for (bool changed = true; changed;) {
    changed = false;
    for (int sub = 0; sub < 2; ++sub) {
      const markcut::Mask prev = m;
      auto px = [&](int x, int y) { return (x >= 0 && y >= 0 && x < w && y < h && prev(x, y)) ? 1 : 0; };
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!prev(x, y)) continue;
          const int p2 = px(x, y - 1), p3 = px(x + 1, y - 1), p4 = px(x + 1, y), p5 = px(x + 1, y + 1);
          const int p6 = px(x, y + 1), p7 = px(x - 1, y + 1), p8 = px(x - 1, y), p9 = px(x - 1, y - 1);
          const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
          const int seq[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
          int a = 0;
          for (int i = 0; i < 8; ++i) a += (seq[i] == 0 && seq[i + 1] == 1);
          if (b < 2 || b > 6 || a != 1) continue;
          const bool c1 = sub == 0 ? p2 * p4 * p6 == 0 : p2 * p4 * p8 == 0;
          const bool c2 = sub == 0 ? p4 * p6 * p8 == 0 : p2 * p6 * p8 == 0;
          if (c1 && c2) {
            m(x, y) = 0;
            changed = true;
          }
        }
      }
    }
  }
  return m;
}

// Cross-section of a straight ball-nose groove at lateral offset d.
inline double groove_z(double tip_z, double radius, double d, double top_z) {
  if (std::fabs(d) > radius) return top_z;
  return std::min(top_z, tip_z + radius - std::sqrt(radius * radius - d * d));
}

}  // namespace oracle
