#include "markcut/surface.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "markcut/morphology.h"

namespace markcut {

namespace {
// Tolerance on "at or above" so that points lying exactly on a candidate plane
// survive floating-point noise from the registration transform.
constexpr double kLevelEps = 1e-6;

bool in_xy(const SurfaceConfig& c, Vec3 p) {
  return (!c.x_min || p.x >= *c.x_min) && (!c.x_max || p.x <= *c.x_max) &&
         (!c.y_min || p.y >= *c.y_min) && (!c.y_max || p.y <= *c.y_max);
}
}  // namespace

PointCloud crop_workspace(const PointCloud& cloud, const SurfaceConfig& c) {
  PointCloud out;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3 p = cloud.points[i];
    if (!in_xy(c, p) || p.z < c.z_min || p.z > c.z_max) continue;
    out.points.push_back(p);
    out.colors.push_back(cloud.colors[i]);
  }
  return out;
}

double extract_surface(const PointCloud& cloud, const SurfaceConfig& c) {
  if (!(c.step > 0) || c.z_max < c.z_min) throw ArgumentError("invalid surface scan range");
  std::vector<double> zs;
  for (const Vec3& p : cloud.points)
    if (in_xy(c, p) && p.z >= c.z_min && p.z <= c.z_max) zs.push_back(p.z);
  if (zs.empty()) throw EmptyWorkspaceError("no points inside the workspace crop");
  std::sort(zs.begin(), zs.end());
  const double total = static_cast<double>(zs.size());
  const int steps = static_cast<int>(std::floor((c.z_max - c.z_min) / c.step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double candidate = c.z_max - k * c.step;
    const auto first = std::lower_bound(zs.begin(), zs.end(), candidate - kLevelEps);
    const double above = static_cast<double>(zs.end() - first);
    if (above / total > 0.5) return candidate;
  }
  throw SurfaceNotFoundError("no candidate height has a majority of points above it");
}

SurfaceRaster rasterize_surface(const PointCloud& cloud, double surface_z, double base,
                                const SurfaceConfig& c, const RasterizeOptions& opt) {
  if (!(base > 0)) throw ArgumentError("base resolution must be positive");
  if (opt.upscale < 1) throw ArgumentError("upscale must be >= 1");
  std::vector<std::size_t> band;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3 p = cloud.points[i];
    if (!in_xy(c, p) || std::abs(p.z - surface_z) > opt.band_mm) continue;
    band.push_back(i);
    xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
  }
  if (band.empty()) throw SurfaceNotFoundError("no points in the surface band");

  const double ox = std::floor(xmin / base) * base, oy = std::floor(ymin / base) * base;
  const int nx = std::max(1, static_cast<int>(std::floor((xmax - ox) / base)) + 1);
  const int ny = std::max(1, static_cast<int>(std::floor((ymax - oy) / base)) + 1);

  ColorImage coarse(nx, ny);
  Mask cvalid(nx, ny, 0);
  RealRaster best(nx, ny, std::numeric_limits<double>::infinity());
  for (std::size_t i : band) {
    const Vec3 p = cloud.points[i];
    const int cx = std::clamp(static_cast<int>(std::floor((p.x - ox) / base)), 0, nx - 1);
    const int cy = std::clamp(static_cast<int>(std::floor((p.y - oy) / base)), 0, ny - 1);
    const double dx = p.x - (ox + (cx + 0.5) * base), dy = p.y - (oy + (cy + 0.5) * base);
    const double d2 = dx * dx + dy * dy;
    if (d2 < best(cx, cy)) {
      best(cx, cy) = d2;
      coarse(cx, cy) = cloud.colors[i];
      cvalid(cx, cy) = 1;
    }
  }

  // Fill holes from the nearest valid cell.
  std::vector<std::int64_t> nearest;
  const auto sq = morph::squared_distance_to_sites(cvalid, &nearest);
  const double reach2 = double(opt.fill_radius_cells) * opt.fill_radius_cells;
  Mask filled = cvalid;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (cvalid[i] || nearest[i] < 0 || sq[i] > reach2) continue;
    coarse[i] = coarse[static_cast<std::size_t>(nearest[i])];
    filled[i] = 1;
  }

  const int up = opt.upscale;
  SurfaceRaster out;
  out.surface_z = surface_z;
  out.geometry = {nx * up, ny * up, base / up, ox, oy};
  out.color = ColorImage(nx * up, ny * up);
  out.valid = Mask(nx * up, ny * up, 0);
  for (int y = 0; y < ny * up; ++y) {
    const double v = (y + 0.5) / up - 0.5;
    const int y0 = static_cast<int>(std::floor(v));
    const double fy = v - y0;
    for (int x = 0; x < nx * up; ++x) {
      const double u = (x + 0.5) / up - 0.5;
      const int x0 = static_cast<int>(std::floor(u));
      const double fx = u - x0;
      double acc[3] = {0, 0, 0}, wsum = 0;
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
          const int sx = std::clamp(x0 + i, 0, nx - 1), sy = std::clamp(y0 + j, 0, ny - 1);
          if (!filled(sx, sy)) continue;
          const double w = (i ? fx : 1 - fx) * (j ? fy : 1 - fy);
          const Rgb col = coarse(sx, sy);
          acc[0] += w * col.r; acc[1] += w * col.g; acc[2] += w * col.b;
          wsum += w;
        }
      const int nxc = std::min(x / up, nx - 1), nyc = std::min(y / up, ny - 1);
      out.valid(x, y) = filled(nxc, nyc);
      if (wsum > 0) {
        out.color(x, y) = Rgb{static_cast<std::uint8_t>(std::lround(acc[0] / wsum)),
                              static_cast<std::uint8_t>(std::lround(acc[1] / wsum)),
                              static_cast<std::uint8_t>(std::lround(acc[2] / wsum))};
      }
    }
  }
  return out;
}

}  // namespace markcut
