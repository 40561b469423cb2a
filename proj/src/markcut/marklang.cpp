#include "markcut/marklang.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "markcut/morphology.h"

namespace markcut {

const char* class_name(ColorClass c) {
  switch (c) {
    case ColorClass::kContour: return "contour";
    case ColorClass::kFlatCut: return "flat_cut";
    case ColorClass::kCurvedCut: return "curved_cut";
  }
  return "contour";
}

ColorClass class_from_name(const std::string& n) {
  if (n == "contour") return ColorClass::kContour;
  if (n == "flat_cut") return ColorClass::kFlatCut;
  if (n == "curved_cut") return ColorClass::kCurvedCut;
  throw ValidationError("unknown color class '" + n + "'");
}

Hsv to_hsv(Rgb c) {
  const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b}), d = mx - mn;
  Hsv o;
  o.v = mx;
  o.s = mx > 0 ? d / mx : 0;
  if (d > 0) {
    if (mx == r) o.h = 60.0 * std::fmod((g - b) / d, 6.0);
    else if (mx == g) o.h = 60.0 * ((b - r) / d + 2.0);
    else o.h = 60.0 * ((r - g) / d + 4.0);
    if (o.h < 0) o.h += 360.0;
    if (o.h >= 360.0) o.h -= 360.0;
  }
  return o;
}

ColorPalette ColorPalette::defaults() {
  ColorPalette p;
  p.classes[0] = {{255, 320}, 0.3, 1.0, 0.25, 1.0};  // purple
  p.classes[1] = {{340, 20}, 0.45, 1.0, 0.3, 1.0};   // red
  p.classes[2] = {{85, 170}, 0.3, 1.0, 0.2, 1.0};    // green
  return p;
}

void ColorPalette::validate() const {
  // Sample the hue circle at 0.5 degree steps; any overlap is a conflict.
  for (int k = 0; k < 720; ++k) {
    const double h = k * 0.5;
    int hits = 0;
    for (const auto& c : classes) hits += c.hue.contains(h);
    if (hits > 1) throw ValidationError("palette hue ranges overlap at " + std::to_string(h));
  }
}

ColorMasks extract_color_masks(const SurfaceRaster& surface, const ColorPalette& palette) {
  const int w = surface.color.width(), h = surface.color.height();
  std::vector<Hsv> hsv(surface.color.size());
  for (std::size_t i = 0; i < hsv.size(); ++i) hsv[i] = to_hsv(surface.color[i]);

  ColorMasks out;
  for (ColorClass cls : kAllClasses) {
    const int ci = static_cast<int>(cls);
    const ClassRange& range = palette[cls];
    Mask raw(w, h, 0);
    for (std::size_t i = 0; i < raw.size(); ++i)
      raw[i] = surface.valid[i] && range.contains(hsv[i]);
    Mask clean = morph::close(morph::open(raw, 1), 1);

    const auto comps = morph::label_components(clean, true);
    std::vector<std::vector<std::size_t>> members(comps.count + 1);
    for (std::size_t i = 0; i < clean.size(); ++i)
      if (comps.labels[i]) members[comps.labels[i]].push_back(i);

    Mask kept(w, h, 0);
    for (int l = 1; l <= comps.count; ++l) {
      if (members[l].size() < 4) continue;
      // Median hue measured as offset from the range start so wrap-around ranges work.
      std::vector<double> hs, ss, vs;
      for (std::size_t i : members[l]) {
        hs.push_back(std::fmod(hsv[i].h - range.hue.lo + 360.0, 360.0));
        ss.push_back(hsv[i].s);
        vs.push_back(hsv[i].v);
      }
      auto median = [](std::vector<double>& v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
      };
      const Hsv rep{std::fmod(median(hs) + range.hue.lo, 360.0), median(ss), median(vs)};
      if (!range.contains(rep)) continue;
      out.representative[ci].push_back(rep);
      ++out.region_counts[ci];
      for (std::size_t i : members[l]) kept[i] = 1;
    }
    out.masks[ci] = std::move(kept);
  }
  return out;
}

Mask stroke_skeleton(const Mask& mask) { return morph::thin(mask); }

namespace {

struct SkelGraph {
  std::vector<std::size_t> pixels;              // flat indices
  std::map<std::size_t, int> index;             // flat -> node
  std::vector<std::vector<int>> adj;
};

SkelGraph build_graph(const std::vector<std::size_t>& pixels, int width, int height) {
  SkelGraph g;
  g.pixels = pixels;
  for (std::size_t i = 0; i < pixels.size(); ++i) g.index[pixels[i]] = static_cast<int>(i);
  g.adj.resize(pixels.size());
  auto node = [&](int x, int y) -> int {
    if (x < 0 || y < 0 || x >= width || y >= height) return -1;
    auto it = g.index.find(static_cast<std::size_t>(y) * width + x);
    return it == g.index.end() ? -1 : it->second;
  };
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const int x = static_cast<int>(pixels[i] % width), y = static_cast<int>(pixels[i] / width);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy) continue;
        const int n = node(x + dx, y + dy);
        if (n < 0) continue;
        // diagonal links only when no 4-connected detour exists
        if (dx && dy && (node(x + dx, y) >= 0 || node(x, y + dy) >= 0)) continue;
        g.adj[i].push_back(n);
      }
  }
  return g;
}

std::vector<bool> two_core(const SkelGraph& g) {
  std::vector<int> deg(g.adj.size());
  std::vector<bool> alive(g.adj.size(), true);
  std::queue<int> q;
  for (std::size_t i = 0; i < g.adj.size(); ++i) {
    deg[i] = static_cast<int>(g.adj[i].size());
    if (deg[i] <= 1) q.push(static_cast<int>(i));
  }
  while (!q.empty()) {
    const int n = q.front();
    q.pop();
    if (!alive[n]) continue;
    alive[n] = false;
    for (int m : g.adj[n])
      if (alive[m] && --deg[m] <= 1) q.push(m);
  }
  return alive;
}

std::vector<int> bfs_parents(const SkelGraph& g, int start, int& farthest) {
  std::vector<int> parent(g.adj.size(), -2), depth(g.adj.size(), 0);
  std::queue<int> q;
  q.push(start);
  parent[start] = -1;
  farthest = start;
  while (!q.empty()) {
    const int n = q.front();
    q.pop();
    if (depth[n] > depth[farthest]) farthest = n;
    for (int m : g.adj[n])
      if (parent[m] == -2) {
        parent[m] = n;
        depth[m] = depth[n] + 1;
        q.push(m);
      }
  }
  return parent;
}

Vec2 px_center(const RasterGeometry& geo, std::size_t flat) {
  return {geo.center_x(static_cast<double>(flat % geo.width)),
          geo.center_y(static_cast<double>(flat / geo.width))};
}

}  // namespace

std::vector<Stroke> skeletonize_and_classify(const Mask& mask, const RasterGeometry& geo, ColorClass color,
                                             int first_id, const SkeletonOptions& opt) {
  if (!mask.same_shape(geo.width, geo.height)) throw ArgumentError("mask does not match raster geometry");
  const auto comps = morph::label_components(mask, true);
  const Mask skel = morph::thin(mask);
  const auto dt = morph::distance_inside(mask);

  std::vector<std::vector<std::size_t>> skel_px(comps.count + 1);
  for (std::size_t i = 0; i < skel.size(); ++i)
    if (skel[i]) skel_px[comps.labels[i]].push_back(i);
  // Regions that thin away entirely keep their max-distance pixel.
  for (int l = 1; l <= comps.count; ++l) {
    if (!skel_px[l].empty()) continue;
    std::size_t best = 0;
    double bd = -1;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (comps.labels[i] == l && dt[i] > bd) { bd = dt[i]; best = i; }
    skel_px[l].push_back(best);
  }

  std::vector<Stroke> strokes;
  int next_id = first_id;
  for (int l = 1; l <= comps.count; ++l) {
    const SkelGraph g = build_graph(skel_px[l], geo.width, geo.height);
    const std::size_t n = g.pixels.size();
    Stroke s;
    s.id = next_id++;
    s.color = color;
    s.mask_ref = l;

    // width from the distance transform along the skeleton, ignoring tapered ends
    std::vector<double> d;
    for (std::size_t p : g.pixels) d.push_back(dt[p]);
    std::vector<double> sorted = d;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double med = sorted[sorted.size() / 2];
    double sum = 0;
    int cnt = 0;
    for (double v : d)
      if (v >= 0.5 * med) { sum += v; ++cnt; }
    s.width_mm = 2.0 * (sum / std::max(cnt, 1)) * geo.resolution;

    const std::vector<bool> core = two_core(g);
    const auto core_count = static_cast<std::size_t>(std::count(core.begin(), core.end(), true));
    if (n >= 3 && core_count >= opt.loop_cycle_fraction * n) {
      s.kind = StrokeKind::kLoop;
      int start = -1;
      for (std::size_t i = 0; i < n; ++i)
        if (core[i]) { start = static_cast<int>(i); break; }
      std::vector<bool> seen(n, false);
      int cur = start;
      while (cur >= 0) {
        seen[cur] = true;
        s.polyline.push_back(px_center(geo, g.pixels[cur]));
        int nxt = -1;
        for (int m : g.adj[cur])
          if (core[m] && !seen[m]) { nxt = m; break; }
        cur = nxt;
      }
      s.polyline.push_back(s.polyline.front());
      s.branches = {s.polyline};
    } else {
      int a = 0, b = 0;
      bfs_parents(g, 0, a);
      const std::vector<int> parent = bfs_parents(g, a, b);
      for (int c = b; c >= 0; c = parent[c]) s.polyline.push_back(px_center(geo, g.pixels[c]));
      if (s.polyline.size() == 1) s.polyline.push_back(s.polyline.front());

      // Branches: chains between nodes whose degree is not 2.
      std::vector<std::vector<bool>> used(n);
      for (std::size_t i = 0; i < n; ++i) used[i].assign(g.adj[i].size(), false);
      auto mark = [&](int u, int v) {
        for (std::size_t k = 0; k < g.adj[u].size(); ++k)
          if (g.adj[u][k] == v) used[u][k] = true;
        for (std::size_t k = 0; k < g.adj[v].size(); ++k)
          if (g.adj[v][k] == u) used[v][k] = true;
      };
      for (std::size_t i = 0; i < n; ++i) {
        if (g.adj[i].size() == 2) continue;
        for (std::size_t k = 0; k < g.adj[i].size(); ++k) {
          if (used[i][k]) continue;
          Polyline br{px_center(geo, g.pixels[i])};
          int prev = static_cast<int>(i), cur = g.adj[i][k];
          mark(prev, cur);
          while (true) {
            br.push_back(px_center(geo, g.pixels[cur]));
            if (g.adj[cur].size() != 2) break;
            const int nxt = g.adj[cur][0] == prev ? g.adj[cur][1] : g.adj[cur][0];
            bool free_edge = false;
            for (std::size_t kk = 0; kk < g.adj[cur].size(); ++kk)
              if (g.adj[cur][kk] == nxt && !used[cur][kk]) free_edge = true;
            if (!free_edge) break;
            mark(cur, nxt);
            prev = cur;
            cur = nxt;
          }
          s.branches.push_back(std::move(br));
        }
      }
      if (s.branches.empty()) s.branches = {s.polyline};

      const double gap = dist(s.polyline.front(), s.polyline.back());
      const double len = polyline_length(s.polyline);
      if (s.branches.size() == 1 && gap < opt.snap_gap_widths * s.width_mm &&
          len >= opt.snap_min_length_widths * s.width_mm) {
        s.kind = StrokeKind::kLoop;
        s.polyline.push_back(s.polyline.front());
        s.branches = {s.polyline};
      }
    }
    strokes.push_back(std::move(s));
  }
  return strokes;
}

namespace {

Polyline resample(const Polyline& line, double spacing, bool closed) {
  Polyline out;
  if (line.size() < 2) return line;
  const double total = polyline_length(line);
  const int n = std::max(2, static_cast<int>(std::ceil(total / spacing)) + (closed ? 0 : 1));
  const double step = total / (closed ? n : n - 1);
  std::size_t seg = 0;
  double seg_start = 0;
  for (int i = 0; i < n; ++i) {
    const double s = std::min(i * step, total);
    while (seg + 2 < line.size() && seg_start + dist(line[seg], line[seg + 1]) < s) {
      seg_start += dist(line[seg], line[seg + 1]);
      ++seg;
    }
    const double len = dist(line[seg], line[seg + 1]);
    const double t = len > 0 ? std::clamp((s - seg_start) / len, 0.0, 1.0) : 0.0;
    out.push_back(line[seg] + (line[seg + 1] - line[seg]) * t);
  }
  if (!closed) out.back() = line.back();
  return out;
}

Polyline smooth_polyline(const Polyline& line, double window, bool closed) {
  if (window <= 0 || line.size() < 3) return line;
  const double total = polyline_length(line);
  if (total <= 0) return line;
  // several samples per input segment so dense jitter is averaged, not skipped
  const double spacing = std::clamp(total / (4.0 * static_cast<double>(line.size() - 1)), 0.005, window / 16.0);
  Polyline pts = resample(line, spacing, closed);
  if (closed && pts.size() > 1 && dist(pts.front(), pts.back()) < 1e-12) pts.pop_back();
  const int n = static_cast<int>(pts.size());
  const double step = closed ? total / n : total / (n - 1);
  int half = std::max(1, static_cast<int>(std::floor(window / 2.0 / step)));
  if (closed) half = std::min(half, (n - 1) / 2);
  Polyline out(n);
  for (int i = 0; i < n; ++i) {
    if (!closed && (i == 0 || i == n - 1)) {
      out[i] = pts[i];
      continue;
    }
    Vec2 acc{0, 0};
    int cnt = 0;
    for (int k = -half; k <= half; ++k) {
      int j = i + k;
      if (closed) {
        j = ((j % n) + n) % n;
      } else if (j < 0 || j >= n) {
        continue;
      }
      acc = acc + pts[j];
      ++cnt;
    }
    out[i] = acc * (1.0 / cnt);
  }
  if (closed) out.push_back(out.front());
  return out;
}

}  // namespace

Stroke auto_smooth(const Stroke& stroke, double window_mm) {
  if (window_mm < 0) throw ArgumentError("smoothing window must be non-negative");
  if (window_mm == 0) return stroke;
  Stroke out = stroke;
  const bool closed = stroke.kind == StrokeKind::kLoop;
  out.polyline = smooth_polyline(stroke.polyline, window_mm, closed);
  out.branches.clear();
  for (const Polyline& b : stroke.branches) {
    const bool bclosed = closed || (b.size() > 2 && b.front() == b.back());
    out.branches.push_back(smooth_polyline(b, window_mm, bclosed));
  }
  return out;
}

void fill_polygon(Mask& mask, const RasterGeometry& geo, const Polyline& poly, std::uint8_t value) {
  if (poly.size() < 3) return;
  std::vector<double> xs;
  for (int j = 0; j < geo.height; ++j) {
    const double y = geo.center_y(j);
    xs.clear();
    const std::size_t n = poly.size();
    for (std::size_t i = 0, k = n - 1; i < n; k = i++) {
      const Vec2 a = poly[i], b = poly[k];
      if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = std::max(0, static_cast<int>(std::ceil(geo.to_px(xs[k]))));
      const int i1 = std::min(geo.width - 1, static_cast<int>(std::floor(geo.to_px(xs[k + 1]))));
      for (int i = i0; i <= i1; ++i) {
        const double x = geo.center_x(i);
        if (x > xs[k] && x < xs[k + 1]) mask(i, j) = value;
      }
    }
  }
}

void stamp_band(Mask& mask, const RasterGeometry& geo, const Polyline& line, double hw, std::uint8_t value) {
  if (line.empty()) return;
  for (std::size_t s = 0; s < line.size(); ++s) {
    const Vec2 a = line[s], b = line[s + 1 < line.size() ? s + 1 : s];
    const int i0 = std::max(0, static_cast<int>(std::floor(geo.to_px(std::min(a.x, b.x) - hw))));
    const int i1 = std::min(geo.width - 1, static_cast<int>(std::ceil(geo.to_px(std::max(a.x, b.x) + hw))));
    const int j0 = std::max(0, static_cast<int>(std::floor(geo.to_py(std::min(a.y, b.y) - hw))));
    const int j1 = std::min(geo.height - 1, static_cast<int>(std::ceil(geo.to_py(std::max(a.y, b.y) + hw))));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (point_segment_distance({geo.center_x(i), geo.center_y(j)}, a, b) <= hw) mask(i, j) = value;
  }
}

Mask item_region_mask(const CutItem& item, const std::vector<Stroke>& strokes, const RasterGeometry& geo) {
  auto find = [&](int id) -> const Stroke& {
    for (const Stroke& s : strokes)
      if (s.id == id) return s;
    throw ArgumentError("item references unknown stroke " + std::to_string(id));
  };
  Mask m(geo.width, geo.height, 0);
  switch (item.kind) {
    case ItemKind::kPocket:
      for (int id : item.boundary) fill_polygon(m, geo, find(id).polyline);
      break;
    case ItemKind::kRelief:
      for (int id : item.boundary) fill_polygon(m, geo, find(id).polyline);
      for (int id : item.preserve) {
        const Stroke& s = find(id);
        for (const Polyline& b : s.branches) stamp_band(m, geo, b, s.width_mm / 2, 0);
      }
      break;
    case ItemKind::kEngrave:
      for (int id : item.boundary) {
        const Stroke& s = find(id);
        for (const Polyline& b : s.branches) stamp_band(m, geo, b, s.width_mm / 2, 1);
      }
      break;
  }
  return m;
}

}  // namespace markcut
