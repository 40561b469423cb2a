#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "markcut/geometry.h"
#include "markcut/raster.h"
#include "markcut/surface.h"

namespace markcut {

enum class ColorClass { kContour = 0, kFlatCut = 1, kCurvedCut = 2 };
inline constexpr std::array<ColorClass, 3> kAllClasses = {ColorClass::kContour, ColorClass::kFlatCut,
                                                           ColorClass::kCurvedCut};
const char* class_name(ColorClass c);
ColorClass class_from_name(const std::string& name);
inline bool is_behavior(ColorClass c) { return c != ColorClass::kContour; }

struct Hsv {
  double h = 0, s = 0, v = 0;  // h in [0, 360), s and v in [0, 1]
};
Hsv to_hsv(Rgb c);

struct HueRange {
  double lo = 0, hi = 0;  // half-open [lo, hi); wraps through 360 when lo > hi
  bool contains(double h) const { return lo <= hi ? (h >= lo && h < hi) : (h >= lo || h < hi); }
};

struct ClassRange {
  HueRange hue;
  double sat_min = 0.3, sat_max = 1.0;
  double val_min = 0.2, val_max = 1.0;
  bool contains(const Hsv& c) const {
    return hue.contains(c.h) && c.s >= sat_min && c.s <= sat_max && c.v >= val_min && c.v <= val_max;
  }
};

struct ColorPalette {
  std::array<ClassRange, 3> classes;  // indexed by ColorClass
  static ColorPalette defaults();     // purple contour, red flat cut, green curved cut
  const ClassRange& operator[](ColorClass c) const { return classes[static_cast<int>(c)]; }
  // Throws ValidationError when hue ranges overlap.
  void validate() const;
};

struct ColorMasks {
  std::array<Mask, 3> masks;
  std::array<int, 3> region_counts{};
  std::array<std::vector<Hsv>, 3> representative;  // median HSV per kept region
  const Mask& operator[](ColorClass c) const { return masks[static_cast<int>(c)]; }
};

ColorMasks extract_color_masks(const SurfaceRaster& surface, const ColorPalette& palette);

enum class StrokeKind { kLoop, kLine };

struct Stroke {
  int id = 0;
  Polyline polyline;              // mm; closed (first == last) for loops
  std::vector<Polyline> branches; // skeleton segments between junctions/ends
  StrokeKind kind = StrokeKind::kLine;
  ColorClass color = ColorClass::kContour;
  double width_mm = 0;
  int mask_ref = 0;               // source region label
  int parent = -1;                // enclosing loop stroke id, set by build_topology
};

struct SkeletonOptions {
  double loop_cycle_fraction = 0.9;
  double snap_gap_widths = 2.0;     // close lines whose end gap < this x width
  double snap_min_length_widths = 6.0;
};

// One stroke per connected region of `mask`; ids start at `first_id`.
std::vector<Stroke> skeletonize_and_classify(const Mask& mask, const RasterGeometry& geometry,
                                             ColorClass color, int first_id = 1,
                                             const SkeletonOptions& options = {});

// Thinned skeleton of a mask with the same pixel grid; exposed for tests.
Mask stroke_skeleton(const Mask& mask);

struct Topology {
  std::vector<Stroke> strokes;  // with `parent` populated
  const Stroke* find(int id) const;
  std::vector<int> children(int id) const;
};

Topology build_topology(std::vector<Stroke> strokes);

enum class ItemKind { kEngrave, kPocket, kRelief };
enum class WallProfile { kVertical, kRamped };
const char* kind_name(ItemKind k);
const char* wall_name(WallProfile w);

struct CutItem {
  int item_id = 0;
  ItemKind kind = ItemKind::kEngrave;
  WallProfile wall_profile = WallProfile::kVertical;
  std::vector<int> boundary;        // stroke ids: contour loop (pocket), behavior loop (relief), contour (engrave)
  std::vector<int> behaviors;       // governing behavior stroke ids
  std::vector<ColorClass> behavior_votes;
  std::vector<int> preserve;        // contour stroke ids kept raised (relief)
  Mask region_mask;
  double depth_limit_mm = 3.0;
  double slope = 10.0;
  double smooth_window_mm = 0.0;
};

enum class Severity { kWarning, kError };

struct Diagnostic {
  std::string code;       // e.g. "ConflictWarning"
  Severity severity = Severity::kWarning;
  std::string message;
  int item_id = -1;
  int stroke_id = -1;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

enum class ConflictPolicy { kPreferFlat, kPreferCurved };

struct InterpretDefaults {
  double depth_limit_mm = 3.0;
  double engrave_depth_mm = 1.0;
  double steep_slope = 10.0;
  double ramp_slope = 0.5;
  double smooth_window_mm = 0.0;
  ConflictPolicy conflict_policy = ConflictPolicy::kPreferFlat;
};

struct CutProgram {
  std::vector<CutItem> items;
  std::vector<Stroke> strokes;
  std::vector<Diagnostic> diagnostics;
  RasterGeometry geometry;
  InterpretDefaults defaults;

  const Stroke* stroke(int id) const;
  CutItem* item(int id);
  const CutItem* item(int id) const;
  bool has_errors() const;
};

CutProgram interpret_marks(const Topology& topology, const RasterGeometry& geometry,
                           const InterpretDefaults& defaults = {});

// Recomputes validation diagnostics; never throws. Idempotent. Widths are
// compared with half a pixel of tolerance.
CutProgram validate_program(CutProgram program, double min_stroke_mm = 4.0);

// Arc-length moving average; loops wrap, open-line endpoints stay fixed.
Stroke auto_smooth(const Stroke& stroke, double window_mm);

// Region raster for an item, using the (possibly smoothed) strokes given.
Mask item_region_mask(const CutItem& item, const std::vector<Stroke>& strokes,
                      const RasterGeometry& geometry);

// Rasterization helpers shared with fixtures and tests.
void fill_polygon(Mask& mask, const RasterGeometry& geometry, const Polyline& polygon, std::uint8_t value = 1);
void stamp_band(Mask& mask, const RasterGeometry& geometry, const Polyline& line, double half_width,
                std::uint8_t value = 1);

// Whole frontend: masks -> strokes -> topology -> program -> validation.
CutProgram compile_marks(const SurfaceRaster& surface, const ColorPalette& palette = ColorPalette::defaults(),
                         const InterpretDefaults& defaults = {}, double min_stroke_mm = 4.0);

}  // namespace markcut
