#include "markcut/toolpath.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>
#include <unordered_map>

#include "markcut/error.h"
#include "markcut/millsim.h"
#include "markcut/morphology.h"

namespace markcut {

void ToolConfig::validate() const {
  if (!(radius_mm > 0)) throw ValidationError("tool radius must be positive");
  if (!(stepover_fraction > 0) || stepover_fraction > 1) throw ValidationError("stepover fraction must be in (0, 1]");
  if (!(max_depth_per_pass_mm > 0)) throw ValidationError("max depth per pass must be positive");
  if (!(feed_mm_per_min > 0) || !(plunge_mm_per_min > 0)) throw ValidationError("feed rates must be positive");
  if (!(safe_z_mm > 0)) throw ValidationError("safe height must be positive");
  if (!(spindle_rpm > 0)) throw ValidationError("spindle speed must be positive");
}

const char* move_kind_name(MoveKind k) {
  switch (k) {
    case MoveKind::kRapid: return "rapid";
    case MoveKind::kCut: return "cut";
    case MoveKind::kPlunge: return "plunge";
  }
  return "?";
}

double drop_cutter_z(const RealRaster& heights, const RasterGeometry& g, const ToolConfig& tool, double x, double y,
                     double floor_z, double xy_margin) {
  const double r = tool.radius_mm + xy_margin;
  const double r2 = r * r;
  const double tr2 = tool.radius_mm * tool.radius_mm;
  double tip = floor_z;
  int i0 = static_cast<int>(std::floor((x - r - g.offset_x) / g.resolution - 0.5));
  int i1 = static_cast<int>(std::ceil((x + r - g.offset_x) / g.resolution - 0.5));
  int j0 = static_cast<int>(std::floor((y - r - g.offset_y) / g.resolution - 0.5));
  int j1 = static_cast<int>(std::ceil((y + r - g.offset_y) / g.resolution - 0.5));
  i0 = std::max(i0, 0);
  j0 = std::max(j0, 0);
  i1 = std::min(i1, g.width - 1);
  j1 = std::min(j1, g.height - 1);
  const bool ball = tool.shape == ToolShape::kBallNose;
  for (int j = j0; j <= j1; ++j) {
    double dy = g.center_y(j) - y;
    for (int i = i0; i <= i1; ++i) {
      double dx = g.center_x(i) - x;
      double d2 = dx * dx + dy * dy;
      if (d2 > r2) continue;
      double s = heights(i, j);
      double t = s;
      if (ball) {
        double e = std::max(0.0, std::sqrt(d2) - xy_margin);
        t = s - tool.radius_mm + std::sqrt(std::max(0.0, tr2 - e * e));
      }
      if (t > tip) tip = t;
    }
  }
  return tip;
}

namespace {

struct EdgeKey {
  // node (i, j) with i, j >= -1; horizontal edges run (i,j)-(i+1,j)
  static std::int64_t h(int i, int j, int w) { return ((static_cast<std::int64_t>(j) + 1) * (w + 2) + (i + 1)) * 2; }
  static std::int64_t v(int i, int j, int w) { return h(i, j, w) + 1; }
};

}  // namespace

std::vector<Polyline> iso_contours(const RealRaster& f, const RasterGeometry& g, double level) {
  const int w = f.width(), hgt = f.height();
  auto val = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= w || j >= hgt) return 0.0;
    return f(i, j);
  };
  // edge id -> point, and adjacency (each crossed edge touches two segments)
  std::unordered_map<std::int64_t, Vec2> pts;
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> adj;
  auto point_on = [&](int ia, int ja, int ib, int jb) {
    double va = val(ia, ja), vb = val(ib, jb);
    double t = (level - va) / (vb - va);
    t = std::clamp(t, 0.0, 1.0);
    double pi = ia + t * (ib - ia), pj = ja + t * (jb - ja);
    return Vec2{g.offset_x + (pi + 0.5) * g.resolution, g.offset_y + (pj + 0.5) * g.resolution};
  };
  auto link = [&](std::int64_t a, std::int64_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int j = -1; j < hgt; ++j) {
    for (int i = -1; i < w; ++i) {
      bool b0 = val(i, j) >= level, b1 = val(i + 1, j) >= level;
      bool b2 = val(i + 1, j + 1) >= level, b3 = val(i, j + 1) >= level;
      int mask = b0 | (b1 << 1) | (b2 << 2) | (b3 << 3);
      if (mask == 0 || mask == 15) continue;
      std::int64_t e[4] = {EdgeKey::h(i, j, w), EdgeKey::v(i + 1, j, w), EdgeKey::h(i, j + 1, w), EdgeKey::v(i, j, w)};
      if (b0 != b1 && !pts.count(e[0])) pts[e[0]] = point_on(i, j, i + 1, j);
      if (b1 != b2 && !pts.count(e[1])) pts[e[1]] = point_on(i + 1, j, i + 1, j + 1);
      if (b3 != b2 && !pts.count(e[2])) pts[e[2]] = point_on(i, j + 1, i + 1, j + 1);
      if (b0 != b3 && !pts.count(e[3])) pts[e[3]] = point_on(i, j, i, j + 1);
      if (mask == 5 || mask == 10) {
        double center = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
        bool cin = center >= level;
        bool c0_inside = mask == 5;
        if (cin == c0_inside) {
          link(e[0], e[1]);
          link(e[2], e[3]);
        } else {
          link(e[0], e[3]);
          link(e[1], e[2]);
        }
        continue;
      }
      std::int64_t ends[2];
      int n = 0;
      if (b0 != b1) ends[n++] = e[0];
      if (b1 != b2) ends[n++] = e[1];
      if (b3 != b2) ends[n++] = e[2];
      if (b0 != b3) ends[n++] = e[3];
      if (n == 2) link(ends[0], ends[1]);
    }
  }
  // walk loops in a deterministic order
  std::vector<std::int64_t> keys;
  keys.reserve(adj.size());
  for (const auto& kv : adj) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  std::unordered_map<std::int64_t, bool> used;
  std::vector<Polyline> loops;
  for (std::int64_t start : keys) {
    if (used[start]) continue;
    Polyline loop;
    std::int64_t prev = -1, cur = start;
    while (true) {
      used[cur] = true;
      loop.push_back(pts[cur]);
      const auto& nb = adj[cur];
      std::int64_t next = -1;
      for (std::int64_t c : nb) {
        if (c != prev && !used[c]) {
          next = c;
          break;
        }
      }
      if (next < 0) break;
      prev = cur;
      cur = next;
    }
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

namespace {

constexpr double kMinStep = 0.002;  // below the 3-decimal output grid
constexpr double kXyMargin = 0.005;  // covers output rounding and the kMinStep snap
constexpr double kWallClearance = 0.02;
constexpr double kPassSpacing = 0.9;  // fraction of the stepover

Polyline resample_closed(const Polyline& loop, double step) {
  Polyline out;
  const size_t n = loop.size();
  for (size_t k = 0; k < n; ++k) {
    const Vec2& a = loop[k];
    const Vec2& b = loop[(k + 1) % n];
    double len = dist(a, b);
    int pieces = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int p = 0; p < pieces; ++p) {
      double t = static_cast<double>(p) / pieces;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

double point_line_dist3(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a, ap = p - a;
  double l2 = dot(ab, ab);
  if (l2 <= 0) return norm(ap);
  double t = std::clamp(dot(ap, ab) / l2, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

std::vector<Vec3> simplify(const std::vector<Vec3>& pts, double tol) {
  if (pts.size() <= 2) return pts;
  std::vector<Vec3> out{pts.front()};
  size_t anchor = 0;
  while (anchor + 1 < pts.size()) {
    size_t end = anchor + 1;
    while (end + 1 < pts.size()) {
      size_t cand = end + 1;
      bool ok = true;
      for (size_t m = anchor + 1; m < cand && ok; ++m) ok = point_line_dist3(pts[m], pts[anchor], pts[cand]) <= tol;
      if (!ok) break;
      end = cand;
    }
    out.push_back(pts[end]);
    anchor = end;
  }
  return out;
}

struct Contour {
  Polyline pts;
  double level = 0;
  double area = 0;
  int parent = -1;
  std::vector<int> children;
};

class Planner {
 public:
  Planner(const TargetDepthMap& t, const ToolConfig& tool, double surface_z)
      : t_(t), g_(t.geometry), tool_(tool), surface_z_(surface_z) {
    heights_ = RealRaster(g_.width, g_.height, 0.0);
    for (size_t k = 0; k < heights_.size(); ++k) heights_[k] = surface_z - t.depths[k];
    grad_ = RealRaster(g_.width, g_.height, 0.0);
    auto d = [&](int i, int j) {
      i = std::clamp(i, 0, g_.width - 1);
      j = std::clamp(j, 0, g_.height - 1);
      return t.depths(i, j);
    };
    for (int j = 0; j < g_.height; ++j)
      for (int i = 0; i < g_.width; ++i) {
        double gx = (d(i + 1, j) - d(i - 1, j)) / (2 * g_.resolution);
        double gy = (d(i, j + 1) - d(i, j - 1)) / (2 * g_.resolution);
        grad_(i, j) = std::sqrt(gx * gx + gy * gy);
      }
    result_.trajectory.surface_z = surface_z;
    result_.trajectory.tool = tool;
    cut_ = make_stock(g_, surface_z);
  }

  PlanResult run() {
    const double max_depth = t_.max_depth();
    if (max_depth <= 1e-9) return std::move(result_);
    double prev = 0;
    for (int k = 1;; ++k) {
      double layer = std::min(k * tool_.max_depth_per_pass_mm, max_depth);
      result_.layer_depths.push_back(layer);
      plan_layer(prev, layer);
      if (layer >= max_depth - 1e-12) break;
      prev = layer;
    }
    retract();
    return std::move(result_);
  }

 private:
  double safe() const { return surface_z_ + tool_.safe_z_mm; }

  void push(MoveKind kind, const Vec3& p) {
    auto& moves = result_.trajectory.moves;
    Vec3 q = p;
    if (started_) {
      double dxy = std::hypot(p.x - pos_.x, p.y - pos_.y);
      if (dxy < kMinStep && std::fabs(p.z - pos_.z) < kMinStep) return;
      if (kind == MoveKind::kCut && dxy < kMinStep) {
        // a pure z step inside a cut; keep it vertical so G-code reads it back the same way
        q.x = pos_.x;
        q.y = pos_.y;
        if (q.z < pos_.z) kind = MoveKind::kPlunge;
      }
    }
    moves.push_back({kind, q});
    pos_ = q;
    started_ = true;
  }

  void retract() {
    if (started_ && !at_safe_) push(MoveKind::kRapid, {pos_.x, pos_.y, safe()});
    at_safe_ = true;
  }

  void enter(const Vec3& p) {
    retract();
    push(MoveKind::kRapid, {p.x, p.y, safe()});
    push(MoveKind::kPlunge, {pos_.x, pos_.y, p.z});
    at_safe_ = false;
  }

  double dc(double x, double y) const { return drop_cutter_z(heights_, g_, tool_, x, y, floor_z_, kXyMargin); }

  // Tool-tip path along 2D points with rim-aware refinement.
  std::vector<Vec3> lift(const Polyline& pts2) const {
    std::vector<Vec3> out;
    if (pts2.empty()) return out;
    Vec3 a{pts2[0].x, pts2[0].y, dc(pts2[0].x, pts2[0].y)};
    out.push_back(a);
    for (size_t k = 1; k < pts2.size(); ++k) {
      Vec3 b{pts2[k].x, pts2[k].y, dc(pts2[k].x, pts2[k].y)};
      refine(a, b, 0, out);
      out.push_back(b);
      a = b;
    }
    return out;
  }

  void refine(const Vec3& a, const Vec3& b, int depth, std::vector<Vec3>& out) const {
    double len = std::hypot(b.x - a.x, b.y - a.y);
    bool split = false;
    double hi = std::max(a.z, b.z);
    const int n = std::max(4, static_cast<int>(std::ceil(len / 0.01)));
    for (int k = 1; k < n; ++k) {
      double t = static_cast<double>(k) / n;
      double x = a.x + t * (b.x - a.x), y = a.y + t * (b.y - a.y);
      double z = dc(x, y);
      hi = std::max(hi, z);
      if (z > a.z + t * (b.z - a.z) + 0.002) split = true;
    }
    if (!split) return;
    if (depth >= 6 || len <= 0.005) {
      // dc jumps here (a cell entering the ball); step over it vertically
      if (hi > a.z) out.push_back({a.x, a.y, hi});
      if (hi > b.z) out.push_back({b.x, b.y, hi});
      return;
    }
    Vec3 m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y), 0};
    m.z = dc(m.x, m.y);
    refine(a, m, depth + 1, out);
    out.push_back(m);
    refine(m, b, depth + 1, out);
  }

  void cut_along(const std::vector<Vec3>& pts) {
    for (const Vec3& p : simplify(pts, 1e-4)) push(MoveKind::kCut, p);
  }

  // Straight feed link whose tool centers stay where dt >= radius - one pixel.
  bool link_ok(const Vec2& from, const Vec2& to, const RealRaster& dt) const {
    double len = dist(from, to);
    int steps = std::max(1, static_cast<int>(std::ceil(len / (0.5 * g_.resolution))));
    for (int s = 0; s <= steps; ++s) {
      double tt = static_cast<double>(s) / steps;
      int i = static_cast<int>(std::lround(g_.to_px(from.x + tt * (to.x - from.x))));
      int j = static_cast<int>(std::lround(g_.to_py(from.y + tt * (to.y - from.y))));
      if (!dt.in_bounds(i, j) || dt(i, j) < tool_.radius_mm - g_.resolution) return false;
    }
    return true;
  }

  // Nearest pixel of a labelled region within two pixels of p, or -1.
  std::int64_t region_pixel(const Raster<int>& labels, Vec2 p, int want = 0) const {
    const int i = std::clamp(static_cast<int>(std::lround(g_.to_px(p.x))), 0, g_.width - 1);
    const int j = std::clamp(static_cast<int>(std::lround(g_.to_py(p.y))), 0, g_.height - 1);
    for (int rad = 0; rad <= 2; ++rad)
      for (int dy = -rad; dy <= rad; ++dy)
        for (int dx = -rad; dx <= rad; ++dx) {
          const int a = i + dx, b = j + dy;
          if (!labels.in_bounds(a, b)) continue;
          const int l = labels(a, b);
          if (l > 0 && (want == 0 || l == want)) return static_cast<std::int64_t>(b) * g_.width + a;
        }
    return -1;
  }

  int region_of(const Raster<int>& labels, Vec2 p) const {
    const std::int64_t k = region_pixel(labels, p);
    return k < 0 ? 0 : labels[static_cast<size_t>(k)];
  }

  // Feed path between two points of one region: straight when it stays inside,
  // else a grid shortest path pulled taut.
  Polyline region_path(Vec2 from, Vec2 to, const Raster<int>& labels, const RealRaster& dt) const {
    if (link_ok(from, to, dt)) return {from, to};
    const int l = region_of(labels, from);
    const std::int64_t a = region_pixel(labels, from, l), b = region_pixel(labels, to, l);
    if (l == 0 || a < 0 || b < 0) return {from, to};
    const int w = g_.width;
    std::vector<std::int64_t> parent(labels.size(), -2);
    std::vector<std::int64_t> queue{a};
    parent[static_cast<size_t>(a)] = -1;
    for (size_t q = 0; q < queue.size() && parent[static_cast<size_t>(b)] == -2; ++q) {
      const std::int64_t k = queue[q];
      const int i = static_cast<int>(k % w), j = static_cast<int>(k / w);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int ni = i + dx, nj = j + dy;
          if ((!dx && !dy) || !labels.in_bounds(ni, nj) || labels(ni, nj) != l) continue;
          const std::int64_t nk = static_cast<std::int64_t>(nj) * w + ni;
          if (parent[static_cast<size_t>(nk)] != -2) continue;
          parent[static_cast<size_t>(nk)] = k;
          queue.push_back(nk);
        }
    }
    if (parent[static_cast<size_t>(b)] == -2) return {from, to};
    Polyline grid;
    for (std::int64_t k = b; k >= 0; k = parent[static_cast<size_t>(k)])
      grid.push_back({g_.center_x(static_cast<double>(k % w)), g_.center_y(static_cast<double>(k / w))});
    std::reverse(grid.begin(), grid.end());
    grid.front() = from;
    grid.push_back(to);
    Polyline out{grid[0]};
    for (size_t i = 0; i + 1 < grid.size();) {
      size_t j = i + 1;
      while (j + 1 < grid.size() && link_ok(grid[i], grid[j + 1], dt)) ++j;
      out.push_back(grid[j]);
      i = j;
    }
    return out;
  }

  void plan_layer(double prev_depth, double layer_depth);
  void warn_narrow(const Mask& domain, const RealRaster& dt);
  std::vector<Contour> build_contours(const RealRaster& dt, const Mask& inset, double max_dt);
  void add_residual(std::vector<Contour>& contours, const RealRaster& dt, const Mask& inset);
  void add_sim_residual(std::vector<Contour>& contours, const RealRaster& dt, const Mask& inset);
  void add_walks(const Mask& need, const RealRaster& dt, std::vector<Contour>& contours) const;
  void stamp_loop(Heightfield& f, const Polyline& loop) const;
  void catch_up_stock();
  void mark_path(const Polyline& loop, double reach, Mask& covered) const;

  const TargetDepthMap& t_;
  RasterGeometry g_;
  ToolConfig tool_;
  double surface_z_;
  RealRaster heights_, grad_;
  PlanResult result_;
  Vec3 pos_{};
  bool started_ = false;
  bool at_safe_ = true;
  double floor_z_ = 0;
  std::vector<int> warned_items_;
  Heightfield cut_;  // stock after the moves emitted so far
  size_t stamped_moves_ = 0;
};

void Planner::mark_path(const Polyline& loop, double reach, Mask& covered) const {
  const size_t n = loop.size();
  for (size_t k = 0; k < n; ++k) {
    const Vec2& a = loop[k];
    const Vec2& b = loop[(k + 1) % n];
    int i0 = std::max(0, static_cast<int>(std::floor(g_.to_px(std::min(a.x, b.x) - reach))));
    int i1 = std::min(g_.width - 1, static_cast<int>(std::ceil(g_.to_px(std::max(a.x, b.x) + reach))));
    int j0 = std::max(0, static_cast<int>(std::floor(g_.to_py(std::min(a.y, b.y) - reach))));
    int j1 = std::min(g_.height - 1, static_cast<int>(std::ceil(g_.to_py(std::max(a.y, b.y) + reach))));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (!covered(i, j) && point_segment_distance({g_.center_x(i), g_.center_y(j)}, a, b) <= reach)
          covered(i, j) = 1;
  }
}

void Planner::warn_narrow(const Mask& domain, const RealRaster& dt) {
  auto comps = morph::label_components(domain, true);
  std::vector<double> best(comps.count + 1, -1.0);
  std::vector<std::int64_t> arg(comps.count + 1, -1);
  for (size_t k = 0; k < dt.size(); ++k) {
    int l = comps.labels[k];
    if (l > 0 && dt[k] > best[l]) {
      best[l] = dt[k];
      arg[l] = static_cast<std::int64_t>(k);
    }
  }
  for (int l = 1; l <= comps.count; ++l) {
    if (best[l] >= tool_.radius_mm - 1e-9) continue;
    int item = t_.owner[static_cast<size_t>(arg[l])];
    if (std::find(warned_items_.begin(), warned_items_.end(), item) != warned_items_.end()) continue;
    warned_items_.push_back(item);
    Diagnostic d;
    d.code = "NarrowFeatureWarning";
    d.severity = Severity::kWarning;
    d.item_id = item;
    d.message = "feature narrower than the tool diameter is left uncut";
    result_.diagnostics.push_back(d);
  }
}

std::vector<Contour> Planner::build_contours(const RealRaster& dt, const Mask& inset, double max_dt) {
  // passes sit a little closer than the nominal stepover so raster and
  // sampling error stay under the scallop bound
  const double r = tool_.radius_mm, s = kPassSpacing * tool_.stepover_mm();
  std::vector<Contour> out;
  // a hair inside the inset so the outer pass clears the wall cells
  double level = std::min(r + kWallClearance, max_dt);
  while (level <= max_dt + 1e-9) {
    for (auto& loop : iso_contours(dt, g_, level)) {
      Contour c;
      c.pts = std::move(loop);
      c.level = level;
      c.area = std::fabs(polygon_area(c.pts));
      out.push_back(std::move(c));
    }
    // tighten the spacing where the floor slopes
    double gmax = 0;
    for (size_t k = 0; k < dt.size(); ++k) {
      if (!inset[k] || dt[k] < level || dt[k] >= level + s) continue;
      if (grad_[k] <= 2.0) gmax = std::max(gmax, grad_[k]);
    }
    level += s / (1.0 + gmax * gmax);
  }
  add_residual(out, dt, inset);
  add_sim_residual(out, dt, inset);
  return out;
}

// Closed walk through a skeleton component: depth-first, returning along the
// way it came. Starts at `root`.
static Polyline skeleton_walk(const Mask& skel, const Raster<int>& labels, int label, size_t root,
                              const RasterGeometry& g, Mask& seen) {
  Polyline walk;
  const int w = skel.width();
  std::vector<std::pair<size_t, int>> stack{{root, 0}};
  seen[root] = 1;
  walk.push_back({g.center_x(root % w), g.center_y(root / w)});
  static const int dx[8] = {1, 0, -1, 0, 1, -1, -1, 1}, dy[8] = {0, 1, 0, -1, 1, 1, -1, -1};
  while (!stack.empty()) {
    auto& [k, dir] = stack.back();
    int i = static_cast<int>(k % w), j = static_cast<int>(k / w);
    bool pushed = false;
    while (dir < 8) {
      int ni = i + dx[dir], nj = j + dy[dir];
      ++dir;
      if (!skel.in_bounds(ni, nj)) continue;
      size_t nk = static_cast<size_t>(nj) * w + ni;
      if (!skel[nk] || seen[nk] || labels[nk] != label) continue;
      seen[nk] = 1;
      walk.push_back({g.center_x(ni), g.center_y(nj)});
      stack.push_back({nk, 0});
      pushed = true;
      break;
    }
    if (pushed) continue;
    stack.pop_back();
    if (!stack.empty()) {
      size_t pk = stack.back().first;
      walk.push_back({g.center_x(pk % w), g.center_y(pk / w)});
    }
  }
  if (walk.size() > 1) walk.pop_back();  // back at the root
  return walk;
}

void Planner::add_walks(const Mask& need, const RealRaster& dt, std::vector<Contour>& contours) const {
  auto comps = morph::label_components(need, true);
  Mask skel = morph::thin(need);
  std::vector<std::int64_t> root(comps.count + 1, -1), peak(comps.count + 1, -1);
  for (size_t k = 0; k < need.size(); ++k) {
    int l = comps.labels[k];
    if (l <= 0) continue;
    if (peak[l] < 0 || dt[k] > dt[static_cast<size_t>(peak[l])]) peak[l] = static_cast<std::int64_t>(k);
    if (skel[k] && (root[l] < 0 || dt[k] > dt[static_cast<size_t>(root[l])])) root[l] = static_cast<std::int64_t>(k);
  }
  Mask seen(g_.width, g_.height, 0);
  for (int l = 1; l <= comps.count; ++l) {
    Contour c;
    size_t k = static_cast<size_t>(root[l] >= 0 ? root[l] : peak[l]);
    if (root[l] >= 0) c.pts = skeleton_walk(skel, comps.labels, l, k, g_, seen);
    if (c.pts.size() < 2) {
      // a lone pixel: a short dab around it
      Vec2 p{g_.center_x(k % g_.width), g_.center_y(k / g_.width)};
      double e = 0.25 * g_.resolution;
      c.pts = {{p.x - e, p.y}, {p.x + e, p.y}, {p.x, p.y + e}};
    }
    c.area = std::fabs(polygon_area(c.pts));
    c.level = dt[static_cast<size_t>(peak[l])];
    contours.push_back(std::move(c));
  }
}

void Planner::add_residual(std::vector<Contour>& contours, const RealRaster& dt, const Mask& inset) {
  // every reachable center must lie this close to a pass
  const double s = kPassSpacing * tool_.stepover_mm(), r = tool_.radius_mm;
  const double reach = std::min(0.5 * s, r);
  Mask covered(g_.width, g_.height, 0);
  size_t marked = 0;
  for (int iter = 0; iter < 4; ++iter) {
    for (; marked < contours.size(); ++marked) mark_path(contours[marked].pts, reach, covered);
    Mask need(g_.width, g_.height, 0);
    bool any = false;
    for (size_t k = 0; k < need.size(); ++k) {
      need[k] = inset[k] && !covered[k];
      any = any || need[k];
    }
    if (!any) return;
    add_walks(need, dt, contours);
  }
}

void Planner::stamp_loop(Heightfield& f, const Polyline& loop) const {
  Polyline path = resample_closed(loop, g_.resolution);
  path.push_back(loop.front());
  auto pts = lift(path);
  const double step = 0.5 * g_.resolution;
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    Vec3 d = pts[k + 1] - pts[k];
    int n = std::max(1, static_cast<int>(std::ceil(norm(d) / step)));
    for (int q = 0; q < n; ++q) stamp_tool(f, tool_, pts[k] + d * (static_cast<double>(q) / n));
  }
  if (!pts.empty()) stamp_tool(f, tool_, pts.back());
}

void Planner::catch_up_stock() {
  const auto& mv = result_.trajectory.moves;
  if (mv.size() <= stamped_moves_) return;
  Trajectory part;
  part.tool = tool_;
  if (stamped_moves_ > 0) part.moves.push_back({MoveKind::kRapid, mv[stamped_moves_ - 1].target});
  part.moves.insert(part.moves.end(), mv.begin() + static_cast<std::ptrdiff_t>(stamped_moves_), mv.end());
  for (const Vec3& p : cut_samples(part, sample_step(g_))) stamp_tool(cut_, tool_, p);
  stamped_moves_ = mv.size();
}

// Creases and slopes leave more than a flat-floor scallop between passes that
// are close enough in plan. Simulate the layer and add passes through the tool
// centers that would lower whatever still stands too high.
void Planner::add_sim_residual(std::vector<Contour>& contours, const RealRaster& dt, const Mask& inset) {
  const double r = tool_.radius_mm;
  const bool ball = tool_.shape == ToolShape::kBallNose;
  const double tol = std::max(0.8 * scallop_height(r, tool_.stepover_mm()), 0.02);
  const double step = 0.5 * g_.resolution;
  Heightfield f = cut_;
  size_t stamped = 0;
  for (int iter = 0; iter < 3; ++iter) {
    for (; stamped < contours.size(); ++stamped) stamp_loop(f, contours[stamped].pts);
    Mask centers(g_.width, g_.height, 0);
    bool any = false;
    for (int j = 0; j < g_.height; ++j) {
      for (int i = 0; i < g_.width; ++i) {
        const size_t k = static_cast<size_t>(j) * g_.width + i;
        if (!inset[k]) continue;
        const double want = std::max(heights_[k], floor_z_);
        if (f.z[k] - want <= tol) continue;
        const double px = g_.center_x(i), py = g_.center_y(j);
        double best = f.z[k];
        int bi = -1, bj = -1;
        for (double dy = -r; dy <= r; dy += step) {
          for (double dx = -r; dx <= r; dx += step) {
            const double d2 = dx * dx + dy * dy;
            if (d2 > r * r) continue;
            const int ci = static_cast<int>(std::lround(g_.to_px(px + dx)));
            const int cj = static_cast<int>(std::lround(g_.to_py(py + dy)));
            if (!inset.in_bounds(ci, cj)) continue;
            const double cx = g_.center_x(ci), cy = g_.center_y(cj);
            const double e2 = (cx - px) * (cx - px) + (cy - py) * (cy - py);
            if (e2 > r * r) continue;
            const double z = dc(cx, cy) + (ball ? r - std::sqrt(r * r - e2) : 0.0);
            if (z < best) {
              best = z;
              bi = ci;
              bj = cj;
            }
          }
        }
        if (bi < 0 || f.z[k] - best < 0.25 * tol) continue;  // nothing reaches lower
        centers(bi, bj) = 1;
        any = true;
      }
    }
    if (!any) return;
    add_walks(morph::dilate(centers, 1), dt, contours);
  }
}

void Planner::plan_layer(double prev_depth, double layer_depth) {
  floor_z_ = surface_z_ - layer_depth;
  retract();  // each layer enters each region once
  catch_up_stock();
  const double r = tool_.radius_mm;
  Mask uncut(g_.width, g_.height, 0);
  bool any = false;
  for (size_t k = 0; k < uncut.size(); ++k) {
    uncut[k] = t_.depths[k] > prev_depth + 1e-9;
    any = any || uncut[k];
  }
  if (!any) return;
  auto sq = morph::squared_distance_to_sites(uncut);
  Mask domain(g_.width, g_.height, 0);
  for (size_t k = 0; k < domain.size(); ++k)
    domain[k] = t_.depths[k] > 1e-9 && std::sqrt(sq[k]) * g_.resolution <= r + 1e-9;
  RealRaster dt = morph::distance_inside(domain);
  double max_dt = 0;
  Mask inset(g_.width, g_.height, 0);
  for (size_t k = 0; k < dt.size(); ++k) {
    dt[k] *= g_.resolution;
    inset[k] = dt[k] >= r - 1e-9;
    max_dt = std::max(max_dt, dt[k]);
  }
  warn_narrow(domain, dt);
  if (max_dt < r - 1e-9) return;

  auto contours = build_contours(dt, inset, max_dt);
  // nest each contour under the smallest earlier-level loop containing it
  std::vector<int> order(contours.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return contours[a].level < contours[b].level; });
  for (size_t oi = 0; oi < order.size(); ++oi) {
    Contour& c = contours[order[oi]];
    double best = std::numeric_limits<double>::infinity();
    for (size_t oj = 0; oj < oi; ++oj) {
      const Contour& o = contours[order[oj]];
      if (o.level >= c.level - 1e-12 || o.area >= best) continue;
      if (o.area > c.area - 1e-12 && point_in_polygon(o.pts, c.pts[0])) {
        best = o.area;
        c.parent = order[oj];
      }
    }
    if (c.parent >= 0) contours[c.parent].children.push_back(order[oi]);
  }
  std::vector<int> roots;
  for (int k : order)
    if (contours[k].parent < 0) roots.push_back(k);

  // tool-center regions; paths inside one region are joined by feed moves
  Mask roam(g_.width, g_.height, 0);
  for (size_t k = 0; k < roam.size(); ++k) roam[k] = dt[k] >= r - g_.resolution;
  const Raster<int> regions = morph::label_components(roam, true).labels;

  auto nearest_vertex = [&](const Polyline& pts, const Vec2& q) {
    size_t bi = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t v = 0; v < pts.size(); ++v) {
      double d = dist(pts[v], q);
      if (d < bd) {
        bd = d;
        bi = v;
      }
    }
    return bi;
  };
  auto cut_contour = [&](int idx) {
    const Polyline& raw = contours[idx].pts;
    Vec2 here{pos_.x, pos_.y};
    size_t start = started_ ? nearest_vertex(raw, here) : 0;
    Polyline rot(raw.begin() + start, raw.end());
    rot.insert(rot.end(), raw.begin(), raw.begin() + start);
    Polyline path = resample_closed(rot, g_.resolution);
    path.push_back(rot.front());
    auto pts = lift(path);
    const int reg = region_of(regions, here);
    if (!at_safe_ && reg > 0 && reg == region_of(regions, rot.front())) {
      cut_along(lift(region_path(here, rot.front(), regions, dt)));
    } else {
      enter(pts.front());
    }
    cut_along(pts);
  };
  std::vector<char> done(contours.size(), 0);
  // depth-first from outer to inner, siblings nearest-first
  std::function<void(int)> visit = [&](int idx) {
    cut_contour(idx);
    done[idx] = 1;
    auto kids = contours[idx].children;
    while (true) {
      int pick = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int c : kids) {
        if (done[c]) continue;
        double d = dist(contours[c].pts[nearest_vertex(contours[c].pts, {pos_.x, pos_.y})], {pos_.x, pos_.y});
        if (d < bd) {
          bd = d;
          pick = c;
        }
      }
      if (pick < 0) break;
      visit(pick);
    }
  };
  // finish the current region before moving on; nearest start otherwise
  while (true) {
    int pick = -1;
    double bd = std::numeric_limits<double>::infinity();
    const int cur = at_safe_ ? 0 : region_of(regions, {pos_.x, pos_.y});
    for (int c : roots) {
      if (done[c]) continue;
      double d = started_ ? dist(contours[c].pts[nearest_vertex(contours[c].pts, {pos_.x, pos_.y})], {pos_.x, pos_.y})
                          : contours[c].pts[0].x + contours[c].pts[0].y;
      if (cur == 0 || region_of(regions, contours[c].pts[0]) != cur) d += 1e9;
      if (d < bd) {
        bd = d;
        pick = c;
      }
    }
    if (pick < 0) break;
    visit(pick);
  }
}

}  // namespace

PlanResult plan_toolpath(const TargetDepthMap& target, const ToolConfig& tool, double surface_z) {
  tool.validate();
  Planner planner(target, tool, surface_z);
  return planner.run();
}

void check_trajectory(const Trajectory& tr, double max_depth_mm) {
  const double safe = tr.safe_z();
  const double lo = tr.surface_z - max_depth_mm - 1e-6;
  for (size_t k = 0; k < tr.moves.size(); ++k) {
    const Move& m = tr.moves[k];
    if (!std::isfinite(m.target.x) || !std::isfinite(m.target.y) || !std::isfinite(m.target.z))
      throw EmitError("move " + std::to_string(k) + " has a non-finite coordinate");
    if (m.kind == MoveKind::kRapid && std::fabs(m.target.z - safe) > 1e-6)
      throw EmitError("rapid move " + std::to_string(k) + " below safe height");
    if (m.kind != MoveKind::kRapid && (m.target.z < lo || m.target.z > tr.surface_z + 1e-6))
      throw EmitError("cutting move " + std::to_string(k) + " outside the depth envelope");
    if (k > 0 && tr.moves[k - 1].target == m.target)
      throw EmitError("move " + std::to_string(k) + " repeats the previous target");
    if (m.kind == MoveKind::kPlunge && k > 0) {
      const Vec3& p = tr.moves[k - 1].target;
      if (std::hypot(p.x - m.target.x, p.y - m.target.y) > 1e-9 || m.target.z >= p.z)
        throw EmitError("plunge move " + std::to_string(k) + " is not a vertical descent");
    }
  }
}

}  // namespace markcut
