#include <algorithm>
#include <cmath>
#include <set>

#include "markcut/marklang.h"

namespace markcut {

const char* kind_name(ItemKind k) {
  switch (k) {
    case ItemKind::kEngrave: return "engrave";
    case ItemKind::kPocket: return "pocket";
    case ItemKind::kRelief: return "relief";
  }
  return "engrave";
}

const char* wall_name(WallProfile w) { return w == WallProfile::kVertical ? "vertical" : "ramped"; }

const Stroke* Topology::find(int id) const {
  for (const Stroke& s : strokes)
    if (s.id == id) return &s;
  return nullptr;
}

std::vector<int> Topology::children(int id) const {
  std::vector<int> out;
  for (const Stroke& s : strokes)
    if (s.parent == id) out.push_back(s.id);
  return out;
}

const Stroke* CutProgram::stroke(int id) const {
  for (const Stroke& s : strokes)
    if (s.id == id) return &s;
  return nullptr;
}

CutItem* CutProgram::item(int id) {
  for (CutItem& i : items)
    if (i.item_id == id) return &i;
  return nullptr;
}

const CutItem* CutProgram::item(int id) const {
  for (const CutItem& i : items)
    if (i.item_id == id) return &i;
  return nullptr;
}

bool CutProgram::has_errors() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

namespace {

bool self_intersects(const Polyline& loop) {
  const std::size_t n = loop.size();
  if (n < 4) return false;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 2; j + 1 < n; ++j) {
      if (i == 0 && j + 2 == n) continue;  // closing neighbours share a vertex
      if (segments_intersect(loop[i], loop[i + 1], loop[j], loop[j + 1])) return true;
    }
  return false;
}

bool contains_all(const Polyline& loop, const Stroke& s) {
  const std::size_t step = std::max<std::size_t>(1, s.polyline.size() / 64);
  for (std::size_t i = 0; i < s.polyline.size(); i += step)
    if (!point_in_polygon(loop, s.polyline[i])) return false;
  for (const Polyline& b : s.branches)
    for (std::size_t i = 0; i < b.size(); i += std::max<std::size_t>(1, b.size() / 16))
      if (!point_in_polygon(loop, b[i])) return false;
  return true;
}

}  // namespace

Topology build_topology(std::vector<Stroke> strokes) {
  std::vector<double> area(strokes.size(), 0.0);
  for (std::size_t i = 0; i < strokes.size(); ++i) {
    if (strokes[i].kind != StrokeKind::kLoop) continue;
    if (self_intersects(strokes[i].polyline))
      throw MalformedLoopError("stroke " + std::to_string(strokes[i].id) + " is a self-intersecting loop");
    area[i] = std::abs(polygon_area(strokes[i].polyline));
  }
  for (std::size_t b = 0; b < strokes.size(); ++b) {
    int parent = -1;
    double best = 1e300;
    for (std::size_t a = 0; a < strokes.size(); ++a) {
      if (a == b || strokes[a].kind != StrokeKind::kLoop) continue;
      if (area[a] >= best) continue;
      if (strokes[b].kind == StrokeKind::kLoop && area[b] >= area[a]) continue;
      if (contains_all(strokes[a].polyline, strokes[b])) {
        best = area[a];
        parent = strokes[a].id;
      }
    }
    strokes[b].parent = parent;
  }
  return Topology{std::move(strokes)};
}

CutProgram interpret_marks(const Topology& topo, const RasterGeometry& geo, const InterpretDefaults& def) {
  CutProgram prog;
  prog.geometry = geo;
  prog.defaults = def;
  prog.strokes = topo.strokes;
  std::sort(prog.strokes.begin(), prog.strokes.end(), [](const Stroke& a, const Stroke& b) { return a.id < b.id; });

  auto wall_for = [&](const std::vector<ColorClass>& votes) {
    const bool flat = std::count(votes.begin(), votes.end(), ColorClass::kFlatCut) > 0;
    const bool curved = std::count(votes.begin(), votes.end(), ColorClass::kCurvedCut) > 0;
    if (flat && curved)
      return def.conflict_policy == ConflictPolicy::kPreferFlat ? WallProfile::kVertical : WallProfile::kRamped;
    return flat ? WallProfile::kVertical : WallProfile::kRamped;
  };

  std::set<int> consumed;
  std::vector<CutItem> items;
  for (const Stroke& s : prog.strokes) {
    const std::vector<int> kids = topo.children(s.id);
    if (s.kind != StrokeKind::kLoop) continue;
    if (is_behavior(s.color)) {
      std::vector<int> preserve;
      for (int k : kids)
        if (topo.find(k)->color == ColorClass::kContour) preserve.push_back(k);
      if (preserve.empty()) continue;
      CutItem it;
      it.kind = ItemKind::kRelief;
      it.boundary = {s.id};
      it.behaviors = {s.id};
      it.behavior_votes = {s.color};
      it.preserve = preserve;
      items.push_back(std::move(it));
      consumed.insert(preserve.begin(), preserve.end());
    } else {
      std::vector<int> behaviors;
      std::vector<ColorClass> votes;
      for (int k : kids) {
        const Stroke* c = topo.find(k);
        if (is_behavior(c->color) && c->kind == StrokeKind::kLine) {
          behaviors.push_back(k);
          if (std::find(votes.begin(), votes.end(), c->color) == votes.end()) votes.push_back(c->color);
        }
      }
      if (behaviors.empty()) continue;
      std::sort(votes.begin(), votes.end());
      CutItem it;
      it.kind = ItemKind::kPocket;
      it.boundary = {s.id};
      it.behaviors = behaviors;
      it.behavior_votes = votes;
      items.push_back(std::move(it));
      consumed.insert(s.id);
    }
  }
  for (const Stroke& s : prog.strokes) {
    if (s.color != ColorClass::kContour || consumed.count(s.id)) continue;
    CutItem it;
    it.kind = ItemKind::kEngrave;
    it.boundary = {s.id};
    it.depth_limit_mm = def.engrave_depth_mm;
    items.push_back(std::move(it));
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const CutItem& a, const CutItem& b) { return a.boundary.front() < b.boundary.front(); });

  int next = 1;
  for (CutItem& it : items) {
    it.item_id = next++;
    if (it.kind != ItemKind::kEngrave) {
      it.wall_profile = wall_for(it.behavior_votes);
      it.depth_limit_mm = def.depth_limit_mm;
    }
    it.slope = it.wall_profile == WallProfile::kVertical ? def.steep_slope : def.ramp_slope;
    it.smooth_window_mm = def.smooth_window_mm;
    it.region_mask = item_region_mask(it, prog.strokes, geo);
  }
  prog.items = std::move(items);
  return prog;
}

CutProgram validate_program(CutProgram prog, double min_stroke_mm) {
  static const std::set<std::string> kOwn = {"ConflictWarning", "MinFeatureWarning", "UnreachableMarkWarning"};
  std::vector<Diagnostic> kept;
  for (const Diagnostic& d : prog.diagnostics)
    if (!kOwn.count(d.code)) kept.push_back(d);

  std::vector<Diagnostic> fresh;
  std::set<int> governed;
  for (CutItem& it : prog.items) {
    governed.insert(it.behaviors.begin(), it.behaviors.end());
    const bool flat = std::count(it.behavior_votes.begin(), it.behavior_votes.end(), ColorClass::kFlatCut) > 0;
    const bool curved = std::count(it.behavior_votes.begin(), it.behavior_votes.end(), ColorClass::kCurvedCut) > 0;
    if (!(flat && curved)) continue;
    const bool keep_flat = prog.defaults.conflict_policy == ConflictPolicy::kPreferFlat;
    const WallProfile resolved = keep_flat ? WallProfile::kVertical : WallProfile::kRamped;
    if (it.wall_profile != resolved) {
      it.wall_profile = resolved;
      it.slope = keep_flat ? prog.defaults.steep_slope : prog.defaults.ramp_slope;
    }
    fresh.push_back({"ConflictWarning", Severity::kWarning,
                     std::string("flat_cut and curved_cut both attach to contour; kept ") +
                         (keep_flat ? "flat_cut, dropped curved_cut" : "curved_cut, dropped flat_cut"),
                     it.item_id, it.boundary.front()});
  }
  for (const Stroke& s : prog.strokes) {
    // half a pixel of slack: measured widths are pixel-quantized
    if (s.width_mm < min_stroke_mm - 0.5 * prog.geometry.resolution) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "stroke width %.2f mm is below the %.2f mm minimum", s.width_mm, min_stroke_mm);
      fresh.push_back({"MinFeatureWarning", Severity::kWarning, buf, -1, s.id});
    }
  }
  for (const Stroke& s : prog.strokes) {
    if (!is_behavior(s.color) || governed.count(s.id)) continue;
    fresh.push_back({"UnreachableMarkWarning", Severity::kWarning,
                     std::string(class_name(s.color)) + " mark has no governing contour", -1, s.id});
  }
  prog.diagnostics = std::move(fresh);
  prog.diagnostics.insert(prog.diagnostics.end(), kept.begin(), kept.end());
  return prog;
}

CutProgram compile_marks(const SurfaceRaster& surface, const ColorPalette& palette, const InterpretDefaults& def,
                         double min_stroke_mm) {
  palette.validate();
  const ColorMasks masks = extract_color_masks(surface, palette);
  std::vector<Stroke> strokes;
  int next = 1;
  for (ColorClass c : kAllClasses) {
    auto s = skeletonize_and_classify(masks[c], surface.geometry, c, next);
    next += static_cast<int>(s.size());
    strokes.insert(strokes.end(), s.begin(), s.end());
  }
  const Topology topo = build_topology(std::move(strokes));
  return validate_program(interpret_marks(topo, surface.geometry, def), min_stroke_mm);
}

}  // namespace markcut
