#include "markcut/fixtures.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "markcut/error.h"

namespace markcut {

namespace {

constexpr Rgb kSideColor{170, 140, 100};
constexpr Rgb kBedColor{225, 225, 220};
constexpr Rgb kMarkerColor{20, 20, 20};

struct StrokeShape {
  const StrokeSpec* spec;
  double lo_x, lo_y, hi_x, hi_y;
};

std::vector<StrokeShape> shapes_of(const SceneSpec& s) {
  std::vector<StrokeShape> out;
  for (const auto& st : s.strokes) {
    StrokeShape sh{&st, 1e300, 1e300, -1e300, -1e300};
    for (const Vec2& p : st.points) {
      sh.lo_x = std::min(sh.lo_x, p.x);
      sh.lo_y = std::min(sh.lo_y, p.y);
      sh.hi_x = std::max(sh.hi_x, p.x);
      sh.hi_y = std::max(sh.hi_y, p.y);
    }
    double h = 0.5 * st.width_mm;
    sh.lo_x -= h;
    sh.lo_y -= h;
    sh.hi_x += h;
    sh.hi_y += h;
    out.push_back(sh);
  }
  return out;
}

bool on_stroke(const StrokeSpec& st, Vec2 p) {
  const double h = 0.5 * st.width_mm;
  const size_t n = st.points.size();
  for (size_t k = 0; k + 1 < n; ++k)
    if (point_segment_distance(p, st.points[k], st.points[k + 1]) <= h) return true;
  if (st.closed && n > 2 && point_segment_distance(p, st.points[n - 1], st.points[0]) <= h) return true;
  return n == 1 && dist(p, st.points[0]) <= h;
}

Rgb top_color(const std::vector<StrokeShape>& shapes, Vec2 p) {
  for (auto it = shapes.rbegin(); it != shapes.rend(); ++it) {
    if (p.x < it->lo_x || p.x > it->hi_x || p.y < it->lo_y || p.y > it->hi_y) continue;
    if (on_stroke(*it->spec, p)) return pen_color(it->spec->color);
  }
  return kWoodColor;
}

Eigen::Matrix3d world_to_camera(const CameraSpec& c) {
  Eigen::Matrix3d r0 = Eigen::Vector3d(1, -1, -1).asDiagonal();
  const double yaw = c.yaw_deg * std::numbers::pi / 180, tilt = c.tilt_deg * std::numbers::pi / 180;
  Eigen::Matrix3d rz, rx;
  rz << std::cos(yaw), -std::sin(yaw), 0, std::sin(yaw), std::cos(yaw), 0, 0, 0, 1;
  rx << 1, 0, 0, 0, std::cos(tilt), -std::sin(tilt), 0, std::sin(tilt), std::cos(tilt);
  return rx * rz * r0;
}

struct Hit {
  double t = -1;
  Vec3 p;
  enum Surface { kNone, kBed, kTop, kSide } surface = kNone;
};

class Tracer {
 public:
  explicit Tracer(const SceneSpec& s) : s_(s), shapes_(shapes_of(s)), markers_(s.fiducial_centers()) {
    rot_ = world_to_camera(s.camera);
    center_ = Eigen::Vector3d(0.5 * s.workspace_x_mm, 0.5 * s.workspace_y_mm, s.camera.height_mm);
  }

  Eigen::Matrix3d rotation() const { return rot_; }
  Eigen::Vector3d center() const { return center_; }

  // Ray through image point (u, v); t scales the direction whose camera z is 1.
  Hit trace(double u, double v) const {
    const CameraSpec& c = s_.camera;
    Eigen::Vector3d dc((u - 0.5 * c.width) / c.fx, (v - 0.5 * c.height) / c.fy, 1.0);
    Eigen::Vector3d d = rot_.transpose() * dc;
    Hit best;
    // stock box, slab method
    const double lo[3] = {s_.stock_x0, s_.stock_y0, 0.0};
    const double hi[3] = {s_.stock_x1, s_.stock_y1, s_.stock_height_mm};
    double tn = -1e300, tf = 1e300;
    int axis = -1;
    bool miss = false;
    for (int a = 0; a < 3 && !miss; ++a) {
      if (std::fabs(d[a]) < 1e-15) {
        if (center_[a] < lo[a] || center_[a] > hi[a]) miss = true;
        continue;
      }
      double t1 = (lo[a] - center_[a]) / d[a], t2 = (hi[a] - center_[a]) / d[a];
      if (t1 > t2) std::swap(t1, t2);
      if (t1 > tn) {
        tn = t1;
        axis = a;
      }
      tf = std::min(tf, t2);
    }
    if (!miss && tn <= tf && tn > 0) {
      best.t = tn;
      best.surface = axis == 2 ? Hit::kTop : Hit::kSide;
    }
    if (best.surface == Hit::kNone && d.z() < 0) {
      best.t = -center_.z() / d.z();
      best.surface = Hit::kBed;
    }
    if (best.surface != Hit::kNone) {
      Eigen::Vector3d p = center_ + best.t * d;
      best.p = {p.x(), p.y(), p.z()};
      if (best.surface == Hit::kTop) best.p.z = s_.stock_height_mm;
      if (best.surface == Hit::kBed) best.p.z = 0;
    }
    return best;
  }

  Rgb shade(const Hit& h) const {
    switch (h.surface) {
      case Hit::kTop: return top_color(shapes_, {h.p.x, h.p.y});
      case Hit::kSide: return kSideColor;
      case Hit::kBed: {
        const double half = 0.5 * s_.fiducial_size_mm;
        for (const Vec2& m : markers_)
          if (std::fabs(h.p.x - m.x) <= half && std::fabs(h.p.y - m.y) <= half) return kMarkerColor;
        return kBedColor;
      }
      case Hit::kNone: break;
    }
    return {0, 0, 0};
  }

 private:
  const SceneSpec& s_;
  std::vector<StrokeShape> shapes_;
  std::vector<Vec2> markers_;
  Eigen::Matrix3d rot_;
  Eigen::Vector3d center_;
};

Rgb average(const int acc[3], int n) {
  return {static_cast<std::uint8_t>((acc[0] + n / 2) / n), static_cast<std::uint8_t>((acc[1] + n / 2) / n),
          static_cast<std::uint8_t>((acc[2] + n / 2) / n)};
}

}  // namespace

Rgb pen_color(ColorClass c) {
  switch (c) {
    case ColorClass::kContour: return {140, 40, 200};
    case ColorClass::kFlatCut: return {220, 30, 40};
    case ColorClass::kCurvedCut: return {30, 160, 60};
  }
  return kWoodColor;
}

std::vector<Vec2> default_fiducial_layout(double wx, double wy, double size) {
  // No mirror or half-turn maps this set onto itself, so the matcher can tell
  // the orientation without reading the marker payloads.
  const double m = 0.5 * size + 5.0;
  return {{m, m},           {wx / 3, m},          {2 * wx / 3, m},     {wx - m, m},
          {wx - m, 0.35 * wy}, {wx - m, 0.7 * wy}, {wx - m, wy - m}, {0.4 * wx, wy - m},
          {m, wy - m},      {m, wy / 2}};
}

std::vector<Vec2> SceneSpec::fiducial_centers() const {
  return fiducials.empty() ? default_fiducial_layout(workspace_x_mm, workspace_y_mm, fiducial_size_mm) : fiducials;
}

void SceneSpec::validate() const {
  if (!(workspace_x_mm > 0 && workspace_y_mm > 0)) throw SpecError("workspace extents must be positive");
  if (!(stock_x0 >= 0 && stock_y0 >= 0 && stock_x1 <= workspace_x_mm && stock_y1 <= workspace_y_mm &&
        stock_x0 < stock_x1 && stock_y0 < stock_y1))
    throw SpecError("stock rectangle must lie inside the workspace");
  if (!(stock_height_mm > 0 && stock_height_mm < camera.height_mm - 50))
    throw SpecError("stock height out of range");
  if (!(fiducial_size_mm > 0)) throw SpecError("fiducial size must be positive");
  const double half = 0.5 * fiducial_size_mm;
  for (const Vec2& f : fiducial_centers()) {
    if (f.x - half < 0 || f.y - half < 0 || f.x + half > workspace_x_mm || f.y + half > workspace_y_mm)
      throw SpecError("fiducial outside the workspace");
    if (f.x + half > stock_x0 && f.x - half < stock_x1 && f.y + half > stock_y0 && f.y - half < stock_y1)
      throw SpecError("fiducial overlaps the stock");
  }
  for (size_t k = 0; k < strokes.size(); ++k) {
    const StrokeSpec& st = strokes[k];
    if (!(st.width_mm > 0)) throw SpecError("stroke " + std::to_string(k) + " has non-positive width");
    if (st.points.size() < 2) throw SpecError("stroke " + std::to_string(k) + " needs two points");
    const double h = 0.5 * st.width_mm;
    for (const Vec2& p : st.points)
      if (p.x - h < stock_x0 || p.x + h > stock_x1 || p.y - h < stock_y0 || p.y + h > stock_y1)
        throw SpecError("stroke " + std::to_string(k) + " leaves the stock");
  }
  if (frame_count < 1) throw SpecError("frame count must be at least 1");
  if (camera.width < 8 || camera.height < 8 || !(camera.fx > 0) || !(camera.fy > 0))
    throw SpecError("invalid camera");
  if (noise.depth_sigma_mm < 0) throw SpecError("noise sigma must be non-negative");
  if (noise.bias_per_mm2 < 0) throw SpecError("noise bias must be non-negative");
}

RenderedScene render_scene(const SceneSpec& s) {
  s.validate();
  Tracer tr(s);
  const int w = s.camera.width, h = s.camera.height;
  ColorImage color(w, h);
  RealRaster depth(w, h, 0.0);
  Mask on_top(w, h, 0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      int acc[3] = {0, 0, 0};
      for (int sy = -1; sy <= 1; ++sy)
        for (int sx = -1; sx <= 1; ++sx) {
          Hit hit = tr.trace(u + sx / 3.0, v + sy / 3.0);
          Rgb c = tr.shade(hit);
          acc[0] += c.r;
          acc[1] += c.g;
          acc[2] += c.b;
          if (sx == 0 && sy == 0) {
            depth(u, v) = hit.surface == Hit::kNone ? 0.0 : hit.t;
            on_top(u, v) = hit.surface == Hit::kTop;
          }
        }
      color(u, v) = average(acc, 9);
    }

  RenderedScene out;
  ScanBundle& b = out.bundle;
  b.depth_scale_mm = 0.1;
  b.intrinsics = {s.camera.fx, s.camera.fy, 0.5 * w, 0.5 * h};
  b.fiducials.nominal_centers_mm = s.fiducial_centers();
  b.fiducials.count = static_cast<int>(b.fiducials.nominal_centers_mm.size());
  b.camera_height_mm = s.camera.height_mm;
  std::mt19937_64 rng(s.noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double dh = s.stock_height_mm - s.noise.optimum_height_mm;
  const double bias = s.noise.bias_per_mm2 * dh * dh;
  for (int f = 0; f < s.frame_count; ++f) {
    b.color_frames.push_back(color);
    DepthImage d(w, h, 0);
    for (size_t k = 0; k < d.size(); ++k) {
      if (depth[k] <= 0) continue;
      double mm = depth[k];
      if (on_top[k]) mm -= bias;
      if (s.noise.depth_sigma_mm > 0) mm += s.noise.depth_sigma_mm * gauss(rng);
      double raw = std::round(mm / b.depth_scale_mm);
      d[k] = static_cast<std::uint16_t>(std::clamp(raw, 1.0, 65535.0));
    }
    b.depth_frames.push_back(std::move(d));
  }
  out.truth.camera_to_workspace.rotation = tr.rotation().transpose();
  out.truth.camera_to_workspace.translation = tr.center();
  out.truth.surface_z = s.stock_height_mm;
  out.truth.fiducials = b.fiducials.nominal_centers_mm;
  out.truth.strokes = s.strokes;
  return out;
}

SurfaceRaster render_surface_raster(const SceneSpec& s, double res) {
  s.validate();
  if (!(res > 0)) throw ArgumentError("resolution must be positive");
  const int w = std::max(1, static_cast<int>(std::ceil((s.stock_x1 - s.stock_x0) / res - 1e-9)));
  const int h = std::max(1, static_cast<int>(std::ceil((s.stock_y1 - s.stock_y0) / res - 1e-9)));
  SurfaceRaster out;
  out.geometry = {w, h, res, s.stock_x0, s.stock_y0};
  out.surface_z = s.stock_height_mm;
  out.color = ColorImage(w, h);
  out.valid = Mask(w, h, 1);
  const auto shapes = shapes_of(s);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      int acc[3] = {0, 0, 0};
      for (int sy = -1; sy <= 1; ++sy)
        for (int sx = -1; sx <= 1; ++sx) {
          Rgb c = top_color(shapes, {out.geometry.center_x(i + sx / 3.0), out.geometry.center_y(j + sy / 3.0)});
          acc[0] += c.r;
          acc[1] += c.g;
          acc[2] += c.b;
        }
      out.color(i, j) = average(acc, 9);
    }
  return out;
}

SceneSpec parse_scene_spec(const std::string& text) {
  using nlohmann::json;
  SceneSpec s;
  try {
    json j = json::parse(text);
    if (j.contains("workspace")) {
      s.workspace_x_mm = j["workspace"].value("x_mm", s.workspace_x_mm);
      s.workspace_y_mm = j["workspace"].value("y_mm", s.workspace_y_mm);
    }
    if (j.contains("stock")) {
      const json& st = j["stock"];
      s.stock_x0 = st.value("x0", s.stock_x0);
      s.stock_y0 = st.value("y0", s.stock_y0);
      s.stock_x1 = st.value("x1", s.stock_x1);
      s.stock_y1 = st.value("y1", s.stock_y1);
      s.stock_height_mm = st.value("height_mm", s.stock_height_mm);
    }
    if (j.contains("fiducials")) {
      s.fiducial_size_mm = j["fiducials"].value("size_mm", s.fiducial_size_mm);
      for (const auto& c : j["fiducials"].value("centers", json::array())) s.fiducials.push_back({c.at(0), c.at(1)});
    }
    for (const auto& js : j.value("strokes", json::array())) {
      StrokeSpec st;
      st.color = class_from_name(js.at("class").get<std::string>());
      st.width_mm = js.value("width_mm", 4.0);
      st.closed = js.value("closed", false);
      for (const auto& p : js.at("points")) st.points.push_back({p.at(0), p.at(1)});
      s.strokes.push_back(std::move(st));
    }
    if (j.contains("noise")) {
      s.noise.depth_sigma_mm = j["noise"].value("depth_sigma_mm", 0.0);
      s.noise.seed = j["noise"].value("seed", std::uint64_t{1});
      s.noise.bias_per_mm2 = j["noise"].value("bias_per_mm2", 0.0);
      s.noise.optimum_height_mm = j["noise"].value("optimum_height_mm", 35.0);
    }
    s.frame_count = j.value("frames", s.frame_count);
    if (j.contains("camera")) {
      const json& c = j["camera"];
      s.camera.width = c.value("width", s.camera.width);
      s.camera.height = c.value("height", s.camera.height);
      s.camera.fx = c.value("fx", s.camera.fx);
      s.camera.fy = c.value("fy", s.camera.fy);
      s.camera.height_mm = c.value("height_mm", s.camera.height_mm);
      s.camera.yaw_deg = c.value("yaw_deg", 0.0);
      s.camera.tilt_deg = c.value("tilt_deg", 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("scene spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string scene_spec_json(const SceneSpec& s) {
  using nlohmann::json;
  json j;
  j["workspace"] = {{"x_mm", s.workspace_x_mm}, {"y_mm", s.workspace_y_mm}};
  j["stock"] = {{"x0", s.stock_x0}, {"y0", s.stock_y0}, {"x1", s.stock_x1}, {"y1", s.stock_y1},
                {"height_mm", s.stock_height_mm}};
  json centers = json::array();
  for (const Vec2& c : s.fiducials) centers.push_back({c.x, c.y});
  j["fiducials"] = {{"size_mm", s.fiducial_size_mm}, {"centers", centers}};
  json strokes = json::array();
  for (const auto& st : s.strokes) {
    json pts = json::array();
    for (const Vec2& p : st.points) pts.push_back({p.x, p.y});
    strokes.push_back({{"class", class_name(st.color)}, {"width_mm", st.width_mm}, {"closed", st.closed}, {"points", pts}});
  }
  j["strokes"] = strokes;
  j["noise"] = {{"depth_sigma_mm", s.noise.depth_sigma_mm},
                {"seed", s.noise.seed},
                {"bias_per_mm2", s.noise.bias_per_mm2},
                {"optimum_height_mm", s.noise.optimum_height_mm}};
  j["frames"] = s.frame_count;
  j["camera"] = {{"width", s.camera.width},   {"height", s.camera.height},       {"fx", s.camera.fx},
                 {"fy", s.camera.fy},         {"height_mm", s.camera.height_mm}, {"yaw_deg", s.camera.yaw_deg},
                 {"tilt_deg", s.camera.tilt_deg}};
  return j.dump(2);
}

StrokeSpec circle_stroke(ColorClass c, Vec2 center, double r, double width, int segments) {
  StrokeSpec s;
  s.color = c;
  s.width_mm = width;
  s.closed = true;
  for (int k = 0; k < segments; ++k) {
    double a = 2 * std::numbers::pi * k / segments;
    s.points.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return s;
}

StrokeSpec rect_stroke(ColorClass c, Vec2 lo, Vec2 hi, double width) {
  return {c, width, {{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}}, true};
}

StrokeSpec line_stroke(ColorClass c, Vec2 a, Vec2 b, double width) { return {c, width, {a, b}, false}; }

std::vector<StrokeSpec> cross_strokes(ColorClass c, Vec2 m, double arm, double width) {
  const double d = arm / std::numbers::sqrt2;
  return {line_stroke(c, {m.x - d, m.y - d}, {m.x + d, m.y + d}, width),
          line_stroke(c, {m.x - d, m.y + d}, {m.x + d, m.y - d}, width)};
}

namespace {

SceneSpec small_stock() {
  SceneSpec s;
  s.stock_x0 = 110;
  s.stock_y0 = 70;
  s.stock_x1 = 190;
  s.stock_y1 = 150;
  return s;
}

void add(SceneSpec& s, const std::vector<StrokeSpec>& v) { s.strokes.insert(s.strokes.end(), v.begin(), v.end()); }

std::string color_word(ColorClass c) { return c == ColorClass::kFlatCut ? "red" : "green"; }

}  // namespace

std::vector<GoldenCase> language_goldens() {
  std::vector<GoldenCase> out;
  const Vec2 mid{150, 110};
  for (ColorClass b : {ColorClass::kFlatCut, ColorClass::kCurvedCut}) {
    const WallProfile wall = b == ColorClass::kFlatCut ? WallProfile::kVertical : WallProfile::kRamped;
    {
      GoldenCase g{color_word(b) + "_cross_inside", small_stock(), {{ItemKind::kPocket, wall}}, {}, 1};
      g.spec.strokes.push_back(circle_stroke(ColorClass::kContour, mid, 30));
      add(g.spec, cross_strokes(b, mid, 10));
      out.push_back(g);
    }
    {
      GoldenCase g{color_word(b) + "_loop_outside", small_stock(), {{ItemKind::kRelief, wall}}, {}, 1};
      g.spec.strokes.push_back(circle_stroke(ColorClass::kContour, mid, 16));
      g.spec.strokes.push_back(rect_stroke(b, {mid.x - 34, mid.y - 34}, {mid.x + 34, mid.y + 34}));
      out.push_back(g);
    }
    {
      GoldenCase g{color_word(b) + "_bare_contour", small_stock(), {{ItemKind::kEngrave, WallProfile::kVertical}},
                   {"UnreachableMarkWarning"}, 1};
      g.spec.strokes.push_back(circle_stroke(ColorClass::kContour, {132, 110}, 18));
      add(g.spec, cross_strokes(b, {172, 110}, 8));
      out.push_back(g);
    }
  }
  GoldenCase g{"conflict", small_stock(), {{ItemKind::kPocket, WallProfile::kVertical}}, {"ConflictWarning"}, 2};
  g.spec.strokes.push_back(circle_stroke(ColorClass::kContour, mid, 32));
  add(g.spec, cross_strokes(ColorClass::kFlatCut, {mid.x - 12, mid.y}, 8));
  add(g.spec, cross_strokes(ColorClass::kCurvedCut, {mid.x + 12, mid.y}, 8));
  out.push_back(g);
  return out;
}

GoldenCase cross_grid_case() {
  GoldenCase g;
  g.name = "cross_grid_23";
  g.spec.stock_x0 = 50;
  g.spec.stock_y0 = 50;
  g.spec.stock_x1 = 250;
  g.spec.stock_y1 = 170;
  int placed = 0;
  // top to bottom, left to right, until 23 crosses
  for (int row = 4; row >= 0 && placed < 23; --row)
    for (int col = 0; col < 9 && placed < 23; ++col) {
      add(g.spec, cross_strokes(ColorClass::kFlatCut, {70.0 + 20 * col, 70.0 + 20 * row}, 6));
      ++placed;
    }
  g.diagnostics.assign(23, "UnreachableMarkWarning");
  g.behavior_strokes = 23;
  return g;
}

GoldenCase min_feature_case(double width_mm) {
  GoldenCase g;
  g.name = "min_feature_" + std::to_string(width_mm);
  g.spec = small_stock();
  g.spec.strokes.push_back(line_stroke(ColorClass::kContour, {125, 110}, {175, 110}, width_mm));
  g.items = {{ItemKind::kEngrave, WallProfile::kVertical}};
  if (width_mm < 4.0) g.diagnostics = {"MinFeatureWarning"};
  g.behavior_strokes = 0;
  return g;
}

std::vector<GoldenCase> demo_cases() {
  std::vector<GoldenCase> out;
  const ExpectedItem pocket{ItemKind::kPocket, WallProfile::kVertical};
  {
    GoldenCase g{"edge_joint", small_stock(), {pocket}, {}, 1};
    g.spec.strokes.push_back(rect_stroke(ColorClass::kContour, {114, 80}, {140, 140}));
    add(g.spec, cross_strokes(ColorClass::kFlatCut, {127, 110}, 7));
    out.push_back(g);
  }
  {
    GoldenCase g{"t_joint", small_stock(), {pocket}, {}, 1};
    // T outline: bar across the top, stem downwards
    g.spec.strokes.push_back({ColorClass::kContour, 4.0,
                              {{120, 142}, {120, 125}, {140, 125}, {140, 78}, {160, 78}, {160, 125}, {180, 125}, {180, 142}},
                              true});
    add(g.spec, cross_strokes(ColorClass::kFlatCut, {150, 134}, 6));
    out.push_back(g);
  }
  {
    GoldenCase g{"slots", small_stock(), {pocket, pocket}, {}, 2};
    g.spec.strokes.push_back(rect_stroke(ColorClass::kContour, {115, 78}, {140, 142}));
    g.spec.strokes.push_back(rect_stroke(ColorClass::kContour, {160, 78}, {185, 142}));
    add(g.spec, cross_strokes(ColorClass::kFlatCut, {127.5, 110}, 7));
    add(g.spec, cross_strokes(ColorClass::kFlatCut, {172.5, 110}, 7));
    out.push_back(g);
  }
  {
    GoldenCase g{"kerf_lines", small_stock(), {}, {}, 0};
    for (int k = 0; k < 5; ++k) {
      double x = 140.0 + 5 * k;
      g.spec.strokes.push_back(line_stroke(ColorClass::kContour, {x, 80}, {x, 140}));
      g.items.push_back({ItemKind::kEngrave, WallProfile::kVertical});
    }
    out.push_back(g);
  }
  return out;
}

SceneSpec height_sweep_scene(double stock_height_mm, double depth_sigma_mm, std::uint64_t seed) {
  SceneSpec s = small_stock();
  s.stock_height_mm = stock_height_mm;
  s.noise = {depth_sigma_mm, seed, 0.02, 35};
  s.strokes.push_back(circle_stroke(ColorClass::kContour, {150, 110}, 25));
  add(s, cross_strokes(ColorClass::kFlatCut, {150, 110}, 8));
  return s;
}

}  // namespace markcut
