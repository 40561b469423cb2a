#include "markcut/millsim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "markcut/error.h"
#include "markcut/morphology.h"

namespace markcut {

Heightfield make_stock(const RasterGeometry& geometry, double top_z) {
  if (geometry.width <= 0 || geometry.height <= 0) throw ArgumentError("stock raster is empty");
  return {RealRaster(geometry.width, geometry.height, top_z), geometry};
}

std::vector<Vec3> cut_samples(const Trajectory& tr, double step) {
  if (!(step > 0)) throw ArgumentError("sample step must be positive");
  std::vector<Vec3> out;
  bool have = false;
  Vec3 pos{};
  for (const Move& m : tr.moves) {
    if (m.kind != MoveKind::kRapid) {
      if (!have) {
        out.push_back(m.target);
      } else {
        Vec3 d = m.target - pos;
        double len = norm(d);
        int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 0; k <= n; ++k) out.push_back(pos + d * (static_cast<double>(k) / n));
      }
    }
    pos = m.target;
    have = true;
  }
  return out;
}

void stamp_tool(Heightfield& f, const ToolConfig& tool, const Vec3& tip) {
  const RasterGeometry& g = f.geometry;
  const double x_hi = g.offset_x + g.extent_x(), y_hi = g.offset_y + g.extent_y();
  if (tip.x < g.offset_x - 1e-9 || tip.y < g.offset_y - 1e-9 || tip.x > x_hi + 1e-9 || tip.y > y_hi + 1e-9)
    throw SimulationError("tool center leaves the stock at (" + std::to_string(tip.x) + ", " + std::to_string(tip.y) + ")");
  const double r = tool.radius_mm, r2 = r * r;
  int i0 = std::max(0, static_cast<int>(std::floor(g.to_px(tip.x - r))));
  int i1 = std::min(g.width - 1, static_cast<int>(std::ceil(g.to_px(tip.x + r))));
  int j0 = std::max(0, static_cast<int>(std::floor(g.to_py(tip.y - r))));
  int j1 = std::min(g.height - 1, static_cast<int>(std::ceil(g.to_py(tip.y + r))));
  const bool ball = tool.shape == ToolShape::kBallNose;
  for (int j = j0; j <= j1; ++j) {
    double dy = g.center_y(j) - tip.y;
    for (int i = i0; i <= i1; ++i) {
      double dx = g.center_x(i) - tip.x;
      double d2 = dx * dx + dy * dy;
      if (d2 > r2) continue;
      double z = ball ? tip.z + r - std::sqrt(r2 - d2) : tip.z;
      double& h = f.z(i, j);
      if (z < h) h = z;
    }
  }
}

double sample_step(const RasterGeometry& g) { return std::min(0.5 * g.resolution, 0.01); }

Heightfield simulate(const Heightfield& stock, const Trajectory& tr) {
  Heightfield f = stock;
  for (const Vec3& p : cut_samples(tr, sample_step(stock.geometry))) stamp_tool(f, tr.tool, p);
  return f;
}

std::vector<Heightfield> animation_frames(const Heightfield& stock, const Trajectory& tr, int count) {
  if (count < 1) throw ArgumentError("frame count must be at least 1");
  auto samples = cut_samples(tr, sample_step(stock.geometry));
  const std::size_t n = samples.size();
  std::vector<Heightfield> frames;
  frames.reserve(static_cast<std::size_t>(count));
  Heightfield f = stock;
  std::size_t done = 0;
  for (int k = 0; k < count; ++k) {
    std::size_t upto = (static_cast<std::size_t>(k + 1) * n + static_cast<std::size_t>(count) - 1) / static_cast<std::size_t>(count);
    for (; done < upto; ++done) stamp_tool(f, tr.tool, samples[done]);
    frames.push_back(f);
  }
  return frames;
}

Heightfield downsample(const Heightfield& f, int factor) {
  if (factor < 1) throw ArgumentError("downsample factor must be at least 1");
  if (factor == 1) return f;
  RasterGeometry g = f.geometry;
  g.width = (f.geometry.width + factor - 1) / factor;
  g.height = (f.geometry.height + factor - 1) / factor;
  g.resolution *= factor;
  Heightfield out{RealRaster(g.width, g.height, 0.0), g};
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i) {
      double sum = 0;
      int cnt = 0;
      for (int b = j * factor; b < std::min((j + 1) * factor, f.geometry.height); ++b)
        for (int a = i * factor; a < std::min((i + 1) * factor, f.geometry.width); ++a) {
          sum += f.z(a, b);
          ++cnt;
        }
      out.z(i, j) = sum / cnt;
    }
  return out;
}

Mesh heightfield_to_mesh(const Heightfield& f, const SurfaceRaster* color) {
  const int w = f.geometry.width, h = f.geometry.height;
  if (w < 2 || h < 2) throw ArgumentError("mesh needs at least a 2x2 heightfield");
  const RasterGeometry& g = f.geometry;
  Mesh m;
  auto top = [&](int i, int j) { return j * w + i; };
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      m.vertices.push_back({g.center_x(i), g.center_y(j), f.z(i, j)});
      m.uv.push_back({(i + 0.5) / w, (j + 0.5) / h});
    }
  // perimeter, counter-clockwise seen from above
  std::vector<int> ring;
  for (int i = 0; i < w; ++i) ring.push_back(top(i, 0));
  for (int j = 1; j < h; ++j) ring.push_back(top(w - 1, j));
  for (int i = w - 2; i >= 0; --i) ring.push_back(top(i, h - 1));
  for (int j = h - 2; j >= 1; --j) ring.push_back(top(0, j));
  const int base = static_cast<int>(m.vertices.size());
  for (int v : ring) {
    Vec3 p = m.vertices[static_cast<std::size_t>(v)];
    m.vertices.push_back({p.x, p.y, 0.0});
    m.uv.push_back(m.uv[static_cast<std::size_t>(v)]);
  }
  auto add = [&](int a, int b, int c) {
    const Vec3 &pa = m.vertices[a], &pb = m.vertices[b], &pc = m.vertices[c];
    if (norm(cross(pb - pa, pc - pa)) <= 1e-12) return;
    m.triangles.push_back({a, b, c});
  };
  for (int j = 0; j + 1 < h; ++j)
    for (int i = 0; i + 1 < w; ++i) {
      add(top(i, j), top(i + 1, j), top(i + 1, j + 1));
      add(top(i, j), top(i + 1, j + 1), top(i, j + 1));
    }
  const int nr = static_cast<int>(ring.size());
  for (int k = 0; k < nr; ++k) {
    int a = ring[k], b = ring[(k + 1) % nr];
    int a2 = base + k, b2 = base + (k + 1) % nr;
    add(a, a2, b2);
    add(a, b2, b);
  }
  // bottom cap: fan from the first corner, skipping collinear spans
  for (int k = 1; k + 1 < nr; ++k) add(base, base + k + 1, base + k);
  if (color) {
    const RasterGeometry& cg = color->geometry;
    for (const Vec3& p : m.vertices) {
      int ci = std::clamp(static_cast<int>(std::lround(cg.to_px(p.x))), 0, cg.width - 1);
      int cj = std::clamp(static_cast<int>(std::lround(cg.to_py(p.y))), 0, cg.height - 1);
      m.colors.push_back(color->color(ci, cj));
    }
  }
  return m;
}

std::string mesh_to_obj(const Mesh& m) {
  std::string out;
  char buf[160];
  for (std::size_t k = 0; k < m.vertices.size(); ++k) {
    const Vec3& p = m.vertices[k];
    if (!m.colors.empty()) {
      const Rgb& c = m.colors[k];
      std::snprintf(buf, sizeof buf, "v %.6f %.6f %.6f %.6f %.6f %.6f\n", p.x, p.y, p.z, c.r / 255.0, c.g / 255.0, c.b / 255.0);
    } else {
      std::snprintf(buf, sizeof buf, "v %.6f %.6f %.6f\n", p.x, p.y, p.z);
    }
    out += buf;
  }
  for (const Vec2& t : m.uv) {
    std::snprintf(buf, sizeof buf, "vt %.6f %.6f\n", t.x, t.y);
    out += buf;
  }
  for (const auto& t : m.triangles) {
    std::snprintf(buf, sizeof buf, "f %d/%d %d/%d %d/%d\n", t[0] + 1, t[0] + 1, t[1] + 1, t[1] + 1, t[2] + 1, t[2] + 1);
    out += buf;
  }
  return out;
}

double scallop_height(double radius_mm, double stepover_mm) {
  double half = 0.5 * stepover_mm;
  if (!(radius_mm > 0) || half > radius_mm) throw ArgumentError("stepover exceeds the tool diameter");
  return radius_mm - std::sqrt(radius_mm * radius_mm - half * half);
}

Mask interior_mask(const TargetDepthMap& t, double margin_mm) {
  const int w = t.depths.width(), h = t.depths.height();
  const double res = t.geometry.resolution;
  Mask disc(w, h, 0);
  bool any = false;
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      double d = t.depths(i, j);
      bool cut = d > 1e-9;
      bool mark = false;
      for (int dy = -1; dy <= 1 && !mark; ++dy)
        for (int dx = -1; dx <= 1 && !mark; ++dx) {
          if (!dx && !dy) continue;
          int a = i + dx, b = j + dy;
          if (!t.depths.in_bounds(a, b)) {
            mark = cut;
            continue;
          }
          double e = t.depths(a, b);
          double step = res * ((dx && dy) ? std::sqrt(2.0) : 1.0);
          if ((e > 1e-9) != cut || std::fabs(e - d) > step || (cut && t.owner(a, b) != t.owner(i, j))) mark = true;
        }
      disc(i, j) = mark;
      any = any || mark;
    }
  Mask interior(w, h, 0);
  if (!any) {
    for (std::size_t k = 0; k < interior.size(); ++k) interior[k] = t.depths[k] > 1e-9;
    return interior;
  }
  auto sq = morph::squared_distance_to_sites(disc);
  for (std::size_t k = 0; k < interior.size(); ++k)
    interior[k] = t.depths[k] > 1e-9 && std::sqrt(sq[k]) * res > margin_mm;
  return interior;
}

HeightfieldComparison compare_heightfields(const Heightfield& sim, double top_z, const TargetDepthMap& t,
                                           const ToolConfig& tool) {
  if (!sim.z.same_shape(t.depths)) throw ArgumentError("heightfield and depth map differ in shape");
  HeightfieldComparison c;
  c.scallop_bound_mm = scallop_height(tool.radius_mm, tool.stepover_mm());
  c.interior = interior_mask(t, tool.radius_mm + tool.stepover_mm());
  double sum2 = 0;
  for (std::size_t k = 0; k < t.depths.size(); ++k) {
    double err = (top_z - sim.z[k]) - t.depths[k];  // > 0: cut too deep
    c.overcut_max_mm = std::max(c.overcut_max_mm, err);
    if (!c.interior[k]) continue;
    ++c.interior_pixels;
    c.undercut_max_mm = std::max(c.undercut_max_mm, -err);
    sum2 += err * err;
  }
  if (c.interior_pixels) c.rms_mm = std::sqrt(sum2 / static_cast<double>(c.interior_pixels));
  return c;
}

}  // namespace markcut
