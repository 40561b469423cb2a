#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "markcut/fixtures.h"
#include "markcut/marklang.h"
#include "markcut/morphology.h"
#include "golden_util.h"
#include "oracles.h"

using namespace markcut;
using testutil::codes;
using testutil::kinds;

namespace {

SceneSpec small_scene() {
  SceneSpec s;
  s.stock_x0 = 110;
  s.stock_y0 = 70;
  s.stock_x1 = 190;
  s.stock_y1 = 150;
  return s;
}

void add(SceneSpec& s, const std::vector<StrokeSpec>& v) { s.strokes.insert(s.strokes.end(), v.begin(), v.end()); }

std::size_t count(const Mask& m) { return static_cast<std::size_t>(std::count(m.data().begin(), m.data().end(), 1)); }

Stroke loop_stroke(int id, Vec2 c, double r, int n = 64) {
  Stroke s;
  s.id = id;
  s.kind = StrokeKind::kLoop;
  s.width_mm = 4;
  for (int k = 0; k <= n; ++k) {
    const double a = 2 * std::numbers::pi * (k % n) / n;
    s.polyline.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return s;
}

}  // namespace

TEST_CASE("one purple circle gives an annulus in the contour mask only") {
  SceneSpec s = small_scene();
  s.strokes.push_back(circle_stroke(ColorClass::kContour, {150, 110}, 20));
  SurfaceRaster r = render_surface_raster(s, 0.2);
  ColorMasks m = extract_color_masks(r, ColorPalette::defaults());
  CHECK(m.region_counts[0] == 1);
  CHECK(m.region_counts[1] == 0);
  CHECK(m.region_counts[2] == 0);
  CHECK(count(m[ColorClass::kFlatCut]) == 0);
  CHECK(count(m[ColorClass::kCurvedCut]) == 0);
  const Mask& c = m[ColorClass::kContour];
  const RasterGeometry& g = r.geometry;
  int inside = 0, outside = 0;
  for (int j = 0; j < c.height(); ++j)
    for (int i = 0; i < c.width(); ++i) {
      const double d = std::abs(std::hypot(g.center_x(i) - 150, g.center_y(j) - 110) - 20);
      if (d < 1.7) inside += !c(i, j);
      if (d > 2.3) outside += c(i, j);
    }
  CHECK(inside == 0);
  CHECK(outside == 0);
}

TEST_CASE("blank wood gives empty masks") {
  SurfaceRaster r = render_surface_raster(small_scene(), 0.2);
  ColorMasks m = extract_color_masks(r, ColorPalette::defaults());
  for (ColorClass c : kAllClasses) CHECK(count(m[c]) == 0);
}

TEST_CASE("circle plus red cross gives one region in each of two masks") {
  SceneSpec s = small_scene();
  s.strokes.push_back(circle_stroke(ColorClass::kContour, {150, 110}, 30));
  add(s, cross_strokes(ColorClass::kFlatCut, {150, 110}, 10));
  ColorMasks m = extract_color_masks(render_surface_raster(s, 0.2), ColorPalette::defaults());
  CHECK(m.region_counts[int(ColorClass::kContour)] == 1);
  CHECK(m.region_counts[int(ColorClass::kFlatCut)] == 1);
  CHECK(m.region_counts[int(ColorClass::kCurvedCut)] == 0);
}

TEST_CASE("overlapping hue ranges are rejected") {
  ColorPalette p = ColorPalette::defaults();
  p.classes[1].hue = p.classes[0].hue;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_NOTHROW(ColorPalette::defaults().validate());
}

TEST_CASE("thinning matches a per-pixel reference on random masks") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    Mask m(48, 40, 0);
    std::uniform_real_distribution<double> u(0, 1);
    // blobs of random discs and bars
    for (int k = 0; k < 4; ++k) {
      const double cx = u(rng) * 48, cy = u(rng) * 40, r = 2 + 6 * u(rng);
      for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 48; ++x)
          if (std::hypot(x - cx, (y - cy) * (k % 2 ? 3.0 : 1.0)) <= r) m(x, y) = 1;
    }
    const Mask a = morph::thin(m), b = oracle::thin_reference(m);
    CHECK(a.data() == b.data());
    const Mask sk = stroke_skeleton(m);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (sk[i]) REQUIRE(m[i]);
  }
}

TEST_CASE("a filled disc is one line stroke as wide as the disc") {
  RasterGeometry g{60, 60, 0.2, 0, 0};
  Mask m(60, 60, 0);
  for (int y = 0; y < 60; ++y)
    for (int x = 0; x < 60; ++x)
      if (std::hypot(x - 29.5, y - 29.5) <= 10) m(x, y) = 1;
  auto strokes = skeletonize_and_classify(m, g, ColorClass::kContour);
  REQUIRE(strokes.size() == 1);
  CHECK(strokes[0].kind == StrokeKind::kLine);
  CHECK(strokes[0].width_mm == doctest::Approx(20 * 0.2).epsilon(0.1));
}

TEST_CASE("a ring is a closed loop") {
  RasterGeometry g{120, 120, 0.2, 0, 0};
  Mask m(120, 120, 0);
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 120; ++x) {
      const double d = std::hypot(x - 59.5, y - 59.5);
      if (d >= 40 && d <= 50) m(x, y) = 1;
    }
  auto strokes = skeletonize_and_classify(m, g, ColorClass::kContour);
  REQUIRE(strokes.size() == 1);
  CHECK(strokes[0].kind == StrokeKind::kLoop);
  REQUIRE(strokes[0].polyline.size() >= 3);
  CHECK(strokes[0].polyline.front() == strokes[0].polyline.back());
  CHECK(strokes[0].width_mm == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("an X of two 4 mm bars is one line stroke about 4 mm wide") {
  SceneSpec s = small_scene();
  add(s, cross_strokes(ColorClass::kFlatCut, {150, 110}, 12));
  SurfaceRaster r = render_surface_raster(s, 0.2);
  ColorMasks m = extract_color_masks(r, ColorPalette::defaults());
  auto strokes = skeletonize_and_classify(m[ColorClass::kFlatCut], r.geometry, ColorClass::kFlatCut);
  REQUIRE(strokes.size() == 1);
  CHECK(strokes[0].kind == StrokeKind::kLine);
  // diagonal bars read a little wide: outside pixel centers are sparser at 45 degrees
  CHECK(std::abs(strokes[0].width_mm - 4.0) <= 0.5);
  CHECK(strokes[0].branches.size() >= 4);
}

TEST_CASE("topology: cross inside a circle, disjoint roots, nested loops") {
  SceneSpec s = small_scene();
  s.strokes.push_back(circle_stroke(ColorClass::kContour, {150, 110}, 30));
  add(s, cross_strokes(ColorClass::kFlatCut, {150, 110}, 10));
  SurfaceRaster r = render_surface_raster(s, 0.2);
  ColorMasks m = extract_color_masks(r, ColorPalette::defaults());
  auto a = skeletonize_and_classify(m[ColorClass::kContour], r.geometry, ColorClass::kContour, 1);
  auto b = skeletonize_and_classify(m[ColorClass::kFlatCut], r.geometry, ColorClass::kFlatCut, 100);
  a.insert(a.end(), b.begin(), b.end());
  Topology t = build_topology(a);
  REQUIRE(t.find(100));
  CHECK(t.find(100)->parent == 1);
  CHECK(t.find(1)->parent == -1);

  Topology f = build_topology({loop_stroke(1, {0, 0}, 5), loop_stroke(2, {20, 0}, 5), loop_stroke(3, {0, 20}, 5)});
  for (const Stroke& st : f.strokes) CHECK(st.parent == -1);

  // circle inside square: square is a loop polygon
  Stroke sq;
  sq.id = 10;
  sq.kind = StrokeKind::kLoop;
  sq.color = ColorClass::kFlatCut;
  sq.width_mm = 4;
  sq.polyline = {{-20, -20}, {20, -20}, {20, 20}, {-20, 20}, {-20, -20}};
  Topology cs = build_topology({loop_stroke(1, {0, 0}, 8), sq});
  CHECK(cs.find(1)->parent == 10);
  CHECK(cs.find(10)->parent == -1);
}

TEST_CASE("nested random loops match a brute-force containment oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Stroke> loops;
    struct C { Vec2 c; double r; };
    std::vector<C> cs;
    while (cs.size() < 8) {
      C c{{u(rng) * 100, u(rng) * 100}, 2 + u(rng) * 30};
      bool ok = true;
      for (const C& o : cs) {
        const double d = dist(c.c, o.c);
        // nested or disjoint with a clear gap, never crossing
        if (!(d + std::min(c.r, o.r) < std::max(c.r, o.r) - 1 || d > c.r + o.r + 1)) ok = false;
      }
      if (ok) cs.push_back(c);
    }
    for (std::size_t k = 0; k < cs.size(); ++k) loops.push_back(loop_stroke(int(k) + 1, cs[k].c, cs[k].r));
    Topology t = build_topology(loops);
    for (const Stroke& b : loops) {
      int expect = -1;
      double best = 1e300;
      for (const Stroke& a : loops) {
        if (a.id == b.id) continue;
        bool all = true;
        for (Vec2 p : b.polyline) all = all && point_in_polygon(a.polyline, p);
        const double area = std::abs(polygon_area(a.polyline));
        if (all && area < best) {
          best = area;
          expect = a.id;
        }
      }
      CHECK(t.find(b.id)->parent == expect);
    }
  }
}

TEST_CASE("a self-intersecting loop is rejected by name") {
  Stroke s;
  s.id = 42;
  s.kind = StrokeKind::kLoop;
  s.width_mm = 4;
  s.polyline = {{0, 0}, {10, 10}, {10, 0}, {0, 10}, {0, 0}};
  try {
    build_topology({s});
    FAIL("expected MalformedLoopError");
  } catch (const MalformedLoopError& e) {
    CHECK(std::string(e.what()).find("42") != std::string::npos);
  }
}

TEST_CASE("language goldens classify exactly") {
  for (const GoldenCase& g : language_goldens()) {
    CAPTURE(g.name);
    CutProgram p = compile_marks(render_surface_raster(g.spec, 0.2));
    CHECK(kinds(p) == g.items);
    auto want = g.diagnostics;
    std::sort(want.begin(), want.end());
    CHECK(codes(p) == want);
  }
}

TEST_CASE("conflict keeps the flat cut, or the curved one when asked") {
  GoldenCase g = language_goldens().back();
  REQUIRE(g.name == "conflict");
  SurfaceRaster r = render_surface_raster(g.spec, 0.2);
  CutProgram p = compile_marks(r);
  REQUIRE(p.items.size() == 1);
  CHECK(p.items[0].wall_profile == WallProfile::kVertical);
  InterpretDefaults d;
  d.conflict_policy = ConflictPolicy::kPreferCurved;
  CutProgram q = compile_marks(r, ColorPalette::defaults(), d);
  REQUIRE(q.items.size() == 1);
  CHECK(q.items[0].wall_profile == WallProfile::kRamped);
  CHECK(codes(q) == std::vector<std::string>{"ConflictWarning"});
}

TEST_CASE("stroke width gate and clean programs") {
  CutProgram thin = compile_marks(render_surface_raster(min_feature_case(2).spec, 0.2));
  CHECK(codes(thin) == std::vector<std::string>{"MinFeatureWarning"});
  CutProgram ok = compile_marks(render_surface_raster(min_feature_case(6).spec, 0.2));
  CHECK(ok.diagnostics.empty());
  CutProgram clean = compile_marks(render_surface_raster(language_goldens()[0].spec, 0.2));
  CHECK(clean.diagnostics.empty());
  CHECK(clean.items.size() == 1);
}

TEST_CASE("validation is idempotent") {
  for (const GoldenCase& g : language_goldens()) {
    CutProgram p = compile_marks(render_surface_raster(g.spec, 0.2));
    CutProgram q = validate_program(p);
    CHECK(q.diagnostics == p.diagnostics);
    CHECK(validate_program(q).diagnostics == q.diagnostics);
    CHECK(q.items.size() == p.items.size());
  }
}

TEST_CASE("interpretation follows a translation of the raster") {
  GoldenCase g = language_goldens()[1];
  SceneSpec moved = g.spec;
  const double dx = 10, dy = 6;
  moved.stock_x0 += dx;
  moved.stock_x1 += dx;
  moved.stock_y0 += dy;
  moved.stock_y1 += dy;
  for (auto& st : moved.strokes)
    for (Vec2& p : st.points) p = p + Vec2{dx, dy};
  CutProgram a = compile_marks(render_surface_raster(g.spec, 0.2));
  CutProgram b = compile_marks(render_surface_raster(moved, 0.2));
  CHECK(b.geometry.offset_x == doctest::Approx(a.geometry.offset_x + dx));
  CHECK(b.geometry.offset_y == doctest::Approx(a.geometry.offset_y + dy));
  CHECK(kinds(a) == kinds(b));
  CHECK(codes(a) == codes(b));
  REQUIRE(a.items.size() == b.items.size());
  for (std::size_t k = 0; k < a.items.size(); ++k) CHECK(a.items[k].region_mask.data() == b.items[k].region_mask.data());
}

TEST_CASE("auto-smooth: identity, jitter, closed loops") {
  // hand tremor: a few short-wavelength sinusoids plus pixel noise, on a 0.2 mm trace
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    double lam[3], ph[3], amp[3];
    for (int i = 0; i < 3; ++i) {
      lam[i] = 1 + 1.5 * u(rng);
      ph[i] = 2 * std::numbers::pi * u(rng);
      amp[i] = 0.1 + 0.1 * u(rng);
    }
    Stroke line;
    line.kind = StrokeKind::kLine;
    double before = 0;
    for (int k = 0; k <= 500; ++k) {
      const double x = 0.2 * k;
      double y = 0;
      if (k > 0 && k < 500) {
        for (int i = 0; i < 3; ++i) y += amp[i] * std::sin(2 * std::numbers::pi * x / lam[i] + ph[i]);
        y += 0.1 * (u(rng) - 0.5);
      }
      line.polyline.push_back({x, y});
      before = std::max(before, std::abs(y));
    }
    if (seed == 0) CHECK(auto_smooth(line, 0).polyline == line.polyline);
    Stroke sm = auto_smooth(line, 10);
    double after = 0;
    for (Vec2 p : sm.polyline) after = std::max(after, std::abs(p.y));
    CHECK(after * 5 <= before);
    CHECK(sm.polyline.front() == line.polyline.front());
    CHECK(sm.polyline.back() == line.polyline.back());
  }

  Stroke ring = loop_stroke(1, {0, 0}, 20);
  Stroke rs = auto_smooth(ring, 6);
  CHECK(rs.kind == StrokeKind::kLoop);
  CHECK(rs.polyline.front() == rs.polyline.back());
  CHECK_THROWS_AS(auto_smooth(ring, -1), ArgumentError);
}
