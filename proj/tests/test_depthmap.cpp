#include <doctest.h>

#include <cmath>
#include <random>

#include "markcut/depthmap.h"
#include "oracles.h"

using namespace markcut;

namespace {

constexpr double kRes = 0.2;

// 50 mm square raster with a disc pocket at its center.
struct Disc {
  RasterGeometry geo{250, 250, kRes, 0, 0};
  Mask mask{250, 250, 0};
  double r;
  explicit Disc(double radius) : r(radius) {
    for (int j = 0; j < 250; ++j)
      for (int i = 0; i < 250; ++i) mask(i, j) = std::hypot(geo.center_x(i) - 25, geo.center_y(j) - 25) <= r;
  }
  double wall_dist(int i, int j) const { return r - std::hypot(geo.center_x(i) - 25, geo.center_y(j) - 25); }
};

CutProgram pocket(const Mask& m, const RasterGeometry& geo, WallProfile wall, double slope, double limit, int id = 1) {
  CutProgram p;
  p.geometry = geo;
  CutItem it;
  it.item_id = id;
  it.kind = ItemKind::kPocket;
  it.wall_profile = wall;
  it.region_mask = m;
  it.slope = slope;
  it.depth_limit_mm = limit;
  p.items.push_back(it);
  return p;
}

Mask random_mask(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0, 1);
  Mask m(w, h, 0);
  const int n = 1 + static_cast<int>(u(rng) * 5);
  for (int k = 0; k < n; ++k) {
    const double cx = u(rng) * w, cy = u(rng) * h, a = 3 + u(rng) * 25, b = 3 + u(rng) * 25;
    const bool rect = u(rng) < 0.5;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double dx = (x - cx) / a, dy = (y - cy) / b;
        if (rect ? (std::abs(dx) <= 1 && std::abs(dy) <= 1) : dx * dx + dy * dy <= 1) m(x, y) = 1;
      }
  }
  return m;
}

}  // namespace

TEST_CASE("kernel depth examples") {
  CHECK(kernel_depth(0, {KernelKind::kSteepLinear, 10, 5}) == 0);
  CHECK(kernel_depth(0, {KernelKind::kUserRamp, 0.5, 5}) == 0);
  CHECK(kernel_depth(2, {KernelKind::kSteepLinear, 10, 5}) == 5);
  CHECK(kernel_depth(4, {KernelKind::kUserRamp, 0.5, 5}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(kernel_depth(-1, {}), ArgumentError);
}

TEST_CASE("steep disc pocket is at the limit beyond 0.4 mm from its wall") {
  Disc d(20);
  TargetDepthMap t = build_target_depthmap(pocket(d.mask, d.geo, WallProfile::kVertical, 10, 4), d.geo);
  const RealRaster ref = oracle::boundary_depth(d.mask, kRes, {KernelKind::kSteepLinear, 10, 4});
  int checked = 0;
  for (int j = 0; j < 250; ++j)
    for (int i = 0; i < 250; ++i) {
      REQUIRE(t.depths(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-12));
      if (d.wall_dist(i, j) > 0.4) {
        CHECK(t.depths(i, j) == 4.0);
        ++checked;
      }
      if (!d.mask(i, j)) {
        CHECK(t.depths(i, j) == 0);
        CHECK(t.owner(i, j) == -1);
      } else {
        CHECK(t.owner(i, j) == 1);
      }
    }
  CHECK(checked > 30000);
  CHECK(t.max_depth() == 4.0);
}

TEST_CASE("ramped disc pocket: center at the limit, half depth 10 mm in") {
  Disc d(20);
  TargetDepthMap t = build_target_depthmap(pocket(d.mask, d.geo, WallProfile::kRamped, 0.2, 4), d.geo);
  // the disc center is a pixel corner; the deepest pixel is within one pixel of slope
  CHECK(std::abs(t.max_depth() - 4.0) <= 0.2 * kRes);
  int n = 0;
  for (int j = 0; j < 250; ++j)
    for (int i = 0; i < 250; ++i)
      if (std::abs(d.wall_dist(i, j) - 10) < 0.05) {
        // distance is measured to outside pixel centers, so up to one pixel long
        CHECK(std::abs(t.depths(i, j) - 2.0) <= 0.2 * kRes + 1e-9);
        ++n;
      }
  CHECK(n > 20);
}

TEST_CASE("empty program gives a zero map") {
  RasterGeometry g{40, 30, kRes, 5, 5};
  TargetDepthMap t = build_target_depthmap(CutProgram{}, g);
  CHECK(t.geometry == g);
  CHECK(t.max_depth() == 0);
  for (std::size_t i = 0; i < t.owner.size(); ++i) CHECK(t.owner[i] == -1);
}

TEST_CASE("region depth equals the brute-force boundary oracle on random masks") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Mask m = random_mask(rng, 90, 70);
    const DepthKernel k{u(rng) < 0.5 ? KernelKind::kSteepLinear : KernelKind::kUserRamp, 0.1 + 10 * u(rng),
                        0.5 + 4 * u(rng)};
    const RealRaster a = region_depth(m, kRes, k), b = oracle::boundary_depth(m, kRes, k);
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("depth is slope-Lipschitz and monotone in the limit") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Mask m = random_mask(rng, 80, 60);
    const DepthKernel k{KernelKind::kUserRamp, 0.7, 2.5};
    const RealRaster d = region_depth(m, kRes, k);
    for (int y = 0; y < 60; ++y)
      for (int x = 0; x + 1 < 80; ++x) {
        if (!m(x, y) || !m(x + 1, y)) continue;
        REQUIRE(std::abs(d(x + 1, y) - d(x, y)) <= k.slope * kRes + 1e-9);
      }
    const RealRaster deeper = region_depth(m, kRes, {KernelKind::kUserRamp, 0.7, 3.5});
    for (std::size_t i = 0; i < d.size(); ++i) REQUIRE(deeper[i] >= d[i]);
  }
}

TEST_CASE("ramp band width is limit over slope") {
  Disc d(20);
  for (auto [slope, limit] : {std::pair{10.0, 4.0}, {0.5, 3.0}, {0.5, 5.0}, {0.25, 2.0}}) {
    const RealRaster r = region_depth(d.mask, kRes, {KernelKind::kUserRamp, slope, limit});
    double band = 0;
    for (int j = 0; j < 250; ++j)
      for (int i = 0; i < 250; ++i)
        if (r(i, j) > 0 && r(i, j) < limit) band = std::max(band, d.wall_dist(i, j));
    CAPTURE(slope);
    CAPTURE(limit);
    CHECK(band <= limit / slope + 1e-9);
    CHECK(band >= limit / slope - 2 * kRes);
  }
}

TEST_CASE("overlapping items merge by maximum with the deeper owner") {
  Disc a(12), b(8);
  CutProgram p = pocket(a.mask, a.geo, WallProfile::kRamped, 0.2, 2, 1);
  CutProgram q = pocket(b.mask, b.geo, WallProfile::kVertical, 10, 3, 2);
  p.items.push_back(q.items[0]);
  TargetDepthMap t = build_target_depthmap(p, a.geo);
  const RealRaster ra = region_depth(a.mask, kRes, kernel_for(p.items[0]));
  const RealRaster rb = region_depth(b.mask, kRes, kernel_for(p.items[1]));
  for (std::size_t i = 0; i < t.depths.size(); ++i) {
    CHECK(t.depths[i] == std::max(ra[i], rb[i]));
    if (rb[i] > ra[i]) CHECK(t.owner[i] == 2);
  }
  CHECK(t.owner(124, 124) == 2);
}

TEST_CASE("a mask of the wrong shape is a geometry error") {
  Disc d(10);
  RasterGeometry other = d.geo;
  other.width = 100;
  CHECK_THROWS_AS(build_target_depthmap(pocket(d.mask, d.geo, WallProfile::kVertical, 10, 3), other), GeometryError);
}
