#include "markcut/serialize.h"

#include <algorithm>
#include <cmath>

#include "markcut/error.h"
#include "markcut/image_io.h"

namespace markcut {

namespace {

ItemKind kind_from_name(const std::string& n) {
  if (n == "engrave") return ItemKind::kEngrave;
  if (n == "pocket") return ItemKind::kPocket;
  if (n == "relief") return ItemKind::kRelief;
  throw FormatError("unknown item kind '" + n + "'");
}

WallProfile wall_from_name(const std::string& n) {
  if (n == "vertical") return WallProfile::kVertical;
  if (n == "ramped") return WallProfile::kRamped;
  throw FormatError("unknown wall profile '" + n + "'");
}

Json polyline_json(const Polyline& p) {
  Json a = Json::array();
  for (const Vec2& v : p) a.push_back({v.x, v.y});
  return a;
}

Polyline polyline_from_json(const Json& j) {
  Polyline p;
  for (const auto& v : j) p.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  return p;
}

std::filesystem::path with(const std::filesystem::path& dir, const std::string& stem, const char* ext) {
  return dir / (stem + ext);
}

Json read_json(const std::filesystem::path& p) {
  try {
    return Json::parse(io::read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(p.filename().string() + ": " + e.what());
  }
}

}  // namespace

Json geometry_json(const RasterGeometry& g) {
  return {{"width", g.width}, {"height", g.height}, {"resolution_mm", g.resolution},
          {"offset_x_mm", g.offset_x}, {"offset_y_mm", g.offset_y}};
}

RasterGeometry geometry_from_json(const Json& j) {
  RasterGeometry g;
  g.width = j.at("width");
  g.height = j.at("height");
  g.resolution = j.at("resolution_mm");
  g.offset_x = j.at("offset_x_mm");
  g.offset_y = j.at("offset_y_mm");
  return g;
}

Json diagnostics_json(const std::vector<Diagnostic>& ds) {
  Json a = Json::array();
  for (const auto& d : ds)
    a.push_back({{"code", d.code},
                 {"severity", d.severity == Severity::kError ? "error" : "warning"},
                 {"message", d.message},
                 {"item_id", d.item_id},
                 {"stroke_id", d.stroke_id}});
  return a;
}

std::vector<Diagnostic> diagnostics_from_json(const Json& j) {
  std::vector<Diagnostic> out;
  for (const auto& e : j) {
    Diagnostic d;
    d.code = e.at("code");
    d.severity = e.at("severity") == "error" ? Severity::kError : Severity::kWarning;
    d.message = e.value("message", "");
    d.item_id = e.value("item_id", -1);
    d.stroke_id = e.value("stroke_id", -1);
    out.push_back(d);
  }
  return out;
}

Json stroke_json(const Stroke& s) {
  Json branches = Json::array();
  for (const auto& b : s.branches) branches.push_back(polyline_json(b));
  return {{"id", s.id},
          {"kind", s.kind == StrokeKind::kLoop ? "loop" : "line"},
          {"color", class_name(s.color)},
          {"width_mm", s.width_mm},
          {"mask_ref", s.mask_ref},
          {"parent", s.parent},
          {"polyline", polyline_json(s.polyline)},
          {"branches", branches}};
}

Stroke stroke_from_json(const Json& j) {
  Stroke s;
  s.id = j.at("id");
  s.kind = j.at("kind") == "loop" ? StrokeKind::kLoop : StrokeKind::kLine;
  s.color = class_from_name(j.at("color"));
  s.width_mm = j.at("width_mm");
  s.mask_ref = j.value("mask_ref", 0);
  s.parent = j.value("parent", -1);
  s.polyline = polyline_from_json(j.at("polyline"));
  for (const auto& b : j.value("branches", Json::array())) s.branches.push_back(polyline_from_json(b));
  return s;
}

Json program_json(const CutProgram& p) {
  Json items = Json::array();
  for (const auto& it : p.items) {
    Json votes = Json::array();
    for (ColorClass c : it.behavior_votes) votes.push_back(class_name(c));
    std::size_t area = static_cast<std::size_t>(std::count(it.region_mask.data().begin(), it.region_mask.data().end(), 1));
    items.push_back({{"item_id", it.item_id},
                     {"kind", kind_name(it.kind)},
                     {"wall_profile", wall_name(it.wall_profile)},
                     {"boundary", it.boundary},
                     {"behaviors", it.behaviors},
                     {"behavior_votes", votes},
                     {"preserve", it.preserve},
                     {"depth_limit_mm", it.depth_limit_mm},
                     {"slope", it.slope},
                     {"smooth_window_mm", it.smooth_window_mm},
                     {"region_pixels", area}});
  }
  Json strokes = Json::array();
  for (const auto& s : p.strokes) strokes.push_back(stroke_json(s));
  const InterpretDefaults& d = p.defaults;
  return {{"geometry", geometry_json(p.geometry)},
          {"defaults",
           {{"depth_limit_mm", d.depth_limit_mm},
            {"engrave_depth_mm", d.engrave_depth_mm},
            {"steep_slope", d.steep_slope},
            {"ramp_slope", d.ramp_slope},
            {"smooth_window_mm", d.smooth_window_mm},
            {"conflict_policy", d.conflict_policy == ConflictPolicy::kPreferFlat ? "prefer_flat" : "prefer_curved"}}},
          {"items", items},
          {"strokes", strokes},
          {"diagnostics", diagnostics_json(p.diagnostics)}};
}

CutProgram program_from_json(const Json& j) {
  CutProgram p;
  try {
    p.geometry = geometry_from_json(j.at("geometry"));
    if (j.contains("defaults")) {
      const Json& d = j["defaults"];
      p.defaults.depth_limit_mm = d.value("depth_limit_mm", p.defaults.depth_limit_mm);
      p.defaults.engrave_depth_mm = d.value("engrave_depth_mm", p.defaults.engrave_depth_mm);
      p.defaults.steep_slope = d.value("steep_slope", p.defaults.steep_slope);
      p.defaults.ramp_slope = d.value("ramp_slope", p.defaults.ramp_slope);
      p.defaults.smooth_window_mm = d.value("smooth_window_mm", p.defaults.smooth_window_mm);
      p.defaults.conflict_policy =
          d.value("conflict_policy", "prefer_flat") == "prefer_curved" ? ConflictPolicy::kPreferCurved
                                                                        : ConflictPolicy::kPreferFlat;
    }
    for (const auto& s : j.at("strokes")) p.strokes.push_back(stroke_from_json(s));
    for (const auto& e : j.at("items")) {
      CutItem it;
      it.item_id = e.at("item_id");
      it.kind = kind_from_name(e.at("kind"));
      it.wall_profile = wall_from_name(e.at("wall_profile"));
      it.boundary = e.at("boundary").get<std::vector<int>>();
      it.behaviors = e.value("behaviors", std::vector<int>{});
      for (const auto& v : e.value("behavior_votes", Json::array())) it.behavior_votes.push_back(class_from_name(v));
      it.preserve = e.value("preserve", std::vector<int>{});
      it.depth_limit_mm = e.at("depth_limit_mm");
      it.slope = e.at("slope");
      it.smooth_window_mm = e.value("smooth_window_mm", 0.0);
      it.region_mask = item_region_mask(it, p.strokes, p.geometry);
      p.items.push_back(std::move(it));
    }
    p.diagnostics = diagnostics_from_json(j.value("diagnostics", Json::array()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("cut program: ") + e.what());
  }
  return p;
}

Json tool_json(const ToolConfig& t) {
  return {{"shape", t.shape == ToolShape::kBallNose ? "ball_nose" : "flat_end"},
          {"radius_mm", t.radius_mm},
          {"stepover_fraction", t.stepover_fraction},
          {"max_depth_per_pass_mm", t.max_depth_per_pass_mm},
          {"feed_mm_per_min", t.feed_mm_per_min},
          {"plunge_mm_per_min", t.plunge_mm_per_min},
          {"safe_z_mm", t.safe_z_mm},
          {"spindle_rpm", t.spindle_rpm}};
}

ToolConfig tool_from_json(const Json& j, ToolConfig t) {
  try {
    if (j.contains("shape")) {
      const std::string s = j["shape"];
      if (s == "ball_nose") t.shape = ToolShape::kBallNose;
      else if (s == "flat_end") t.shape = ToolShape::kFlatEnd;
      else throw ValidationError("unknown tool shape '" + s + "'");
    }
    t.radius_mm = j.value("radius_mm", t.radius_mm);
    t.stepover_fraction = j.value("stepover_fraction", t.stepover_fraction);
    t.max_depth_per_pass_mm = j.value("max_depth_per_pass_mm", t.max_depth_per_pass_mm);
    t.feed_mm_per_min = j.value("feed_mm_per_min", t.feed_mm_per_min);
    t.plunge_mm_per_min = j.value("plunge_mm_per_min", t.plunge_mm_per_min);
    t.safe_z_mm = j.value("safe_z_mm", t.safe_z_mm);
    t.spindle_rpm = j.value("spindle_rpm", t.spindle_rpm);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("tool config: ") + e.what());
  }
  return t;
}

void save_surface(const SurfaceRaster& s, const std::filesystem::path& dir, const std::string& stem) {
  io::write_ppm(with(dir, stem, ".ppm"), s.color);
  Mask v = s.valid;
  for (auto& b : v.data()) b = b ? 255 : 0;
  io::write_pgm8(with(dir, stem + "_valid", ".pgm"), v);
  Json j = {{"geometry", geometry_json(s.geometry)}, {"surface_z_mm", s.surface_z}};
  io::write_file(with(dir, stem, ".json"), j.dump(2) + "\n");
}

SurfaceRaster load_surface(const std::filesystem::path& dir, const std::string& stem) {
  SurfaceRaster s;
  Json j = read_json(with(dir, stem, ".json"));
  s.geometry = geometry_from_json(j.at("geometry"));
  s.surface_z = j.at("surface_z_mm");
  s.color = io::read_ppm(with(dir, stem, ".ppm"));
  s.valid = io::read_pgm8(with(dir, stem + "_valid", ".pgm"));
  for (auto& b : s.valid.data()) b = b ? 1 : 0;
  if (!s.color.same_shape(s.geometry.width, s.geometry.height) || !s.valid.same_shape(s.color))
    throw FormatError("surface raster files disagree on size");
  return s;
}

DepthImage encode_depths(const RealRaster& d) {
  DepthImage out(d.width(), d.height(), 0);
  for (std::size_t k = 0; k < d.size(); ++k)
    out[k] = static_cast<std::uint16_t>(std::clamp(std::round(d[k] / kDepthPgmScale), 0.0, 65535.0));
  return out;
}

void save_depthmap(const TargetDepthMap& m, const std::filesystem::path& dir, const std::string& stem) {
  io::write_pgm16(with(dir, stem, ".pgm"), encode_depths(m.depths));
  Json j = {{"geometry", geometry_json(m.geometry)},
            {"mm_per_unit", kDepthPgmScale},
            {"max_depth_mm", m.max_depth()}};
  io::write_file(with(dir, stem, ".json"), j.dump(2) + "\n");
}

void save_heightfield(const Heightfield& f, const std::filesystem::path& dir, const std::string& stem) {
  io::write_pgm16(with(dir, stem, ".pgm"), encode_depths(f.z));
  Json j = {{"geometry", geometry_json(f.geometry)}, {"mm_per_unit", kDepthPgmScale}};
  io::write_file(with(dir, stem, ".json"), j.dump(2) + "\n");
}

Heightfield load_heightfield(const std::filesystem::path& dir, const std::string& stem) {
  Json j = read_json(with(dir, stem, ".json"));
  Heightfield f;
  f.geometry = geometry_from_json(j.at("geometry"));
  const double scale = j.value("mm_per_unit", kDepthPgmScale);
  DepthImage raw = io::read_pgm16(with(dir, stem, ".pgm"));
  if (!raw.same_shape(f.geometry.width, f.geometry.height)) throw FormatError("heightfield size mismatch");
  f.z = RealRaster(raw.width(), raw.height(), 0.0);
  for (std::size_t k = 0; k < raw.size(); ++k) f.z[k] = raw[k] * scale;
  return f;
}

}  // namespace markcut
