#include <doctest.h>

#include <random>

#include "markcut/image_io.h"
#include "markcut/scanio.h"
#include "test_util.h"

using namespace markcut;

namespace {

ScanBundle tiny_bundle(int w, int h, int depth_frames) {
  ScanBundle b;
  b.color_frames.push_back(ColorImage(w, h, {200, 180, 150}));
  for (int k = 0; k < depth_frames; ++k) b.depth_frames.push_back(DepthImage(w, h, static_cast<std::uint16_t>(6000 + k)));
  b.intrinsics = {500, 500, w / 2.0, h / 2.0};
  b.fiducials.count = 2;
  b.fiducials.nominal_centers_mm = {{10, 10}, {50, 10}};
  b.camera_height_mm = 600;
  return b;
}

}  // namespace

TEST_CASE("bundle round trip keeps frames and metadata") {
  testutil::TempDir dir("scan");
  ScanBundle b = tiny_bundle(640, 480, 5);
  save_scan_bundle(b, dir.path());
  ScanBundle back = load_scan_bundle(dir.path());
  CHECK(back.depth_frames.size() == 5);
  CHECK(back.color_frames.size() == 1);
  CHECK(back.depth_frames[3] == b.depth_frames[3]);
  CHECK(back.color_frames[0] == b.color_frames[0]);
  CHECK(back.intrinsics.fx == 500);
  CHECK(back.fiducials.count == 2);
  CHECK(back.fiducials.nominal_centers_mm[1].x == 50);
}

TEST_CASE("depth frame size mismatch is a bundle error") {
  testutil::TempDir dir("scan");
  ScanBundle b = tiny_bundle(64, 48, 2);
  b.depth_frames[1] = DepthImage(32, 24, 100);
  save_scan_bundle(b, dir.path());
  CHECK_THROWS_AS(load_scan_bundle(dir.path()), BundleError);
}

TEST_CASE("missing frame file is named in the error") {
  testutil::TempDir dir("scan");
  save_scan_bundle(tiny_bundle(16, 12, 4), dir.path());
  std::filesystem::remove(dir.path() / "depth_03.pgm");
  try {
    load_scan_bundle(dir.path());
    FAIL("expected BundleError");
  } catch (const BundleError& e) {
    CHECK(std::string(e.what()).find("depth_03.pgm") != std::string::npos);
  }
}

TEST_CASE("averaging a single frame keeps every nonzero pixel") {
  DepthImage f(4, 3, 250);
  f(1, 1) = 0;
  DepthMap m = average_depth_frames(std::span<const DepthImage>(&f, 1), 0.1);
  CHECK(m.valid(0, 0) == 1);
  CHECK(m.valid(1, 1) == 0);
  CHECK(m.depth_mm(2, 2) == doctest::Approx(25.0));
}

TEST_CASE("symmetric frame values average to the middle") {
  std::vector<DepthImage> frames;
  for (int v : {300, 302, 298, 300}) frames.push_back(DepthImage(1, 1, static_cast<std::uint16_t>(v)));
  DepthMap m = average_depth_frames(frames, 0.1);
  CHECK(m.depth_mm(0, 0) == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("averaging matches a per-pixel count oracle on random masks") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<DepthImage> frames(n, DepthImage(13, 9, 0));
    for (auto& f : frames)
      for (std::size_t k = 0; k < f.size(); ++k)
        if (rng() % 3) f[k] = static_cast<std::uint16_t>(1 + rng() % 60000);
    DepthMap m = average_depth_frames(frames, 0.1);
    for (std::size_t k = 0; k < m.valid.size(); ++k) {
      int count = 0;
      double sum = 0;
      for (auto& f : frames)
        if (f[k]) {
          ++count;
          sum += f[k];
        }
      const bool expect = count > 0 && count * 2 >= n;
      REQUIRE(static_cast<bool>(m.valid[k]) == expect);
      if (expect) REQUIRE(m.depth_mm[k] == doctest::Approx(0.1 * sum / count).epsilon(1e-12));
    }
  }
  // the worked example: valid in 2 of 5 frames
  std::vector<DepthImage> five(5, DepthImage(1, 1, 0));
  five[0][0] = five[3][0] = 400;
  CHECK(average_depth_frames(five, 0.1).valid[0] == 0);
}

TEST_CASE("back-projection follows the pinhole model") {
  Intrinsics k{500, 400, 32, 24};
  DepthMap d{RealRaster(64, 48, 0.0), Mask(64, 48, 0)};
  ColorImage c(64, 48, {1, 2, 3});
  d.depth_mm(32, 24) = 600;
  d.valid(32, 24) = 1;
  PointCloud pc = depth_to_pointcloud(d, c, k);
  REQUIRE(pc.points.size() == 1);
  CHECK(pc.points[0].x == 0);
  CHECK(pc.points[0].y == 0);
  CHECK(pc.points[0].z == 600);

  Intrinsics k2{20, 20, 10, 10};
  DepthMap d2{RealRaster(64, 48, 0.0), Mask(64, 48, 0)};
  d2.depth_mm(30, 10) = 100;
  d2.valid(30, 10) = 1;
  PointCloud pc2 = depth_to_pointcloud(d2, c, k2);
  CHECK(pc2.points[0].x == doctest::Approx(100));
  CHECK(pc2.points[0].y == doctest::Approx(0));
  CHECK(pc2.points[0].z == 100);
}

TEST_CASE("a plane depth image back-projects to coplanar points") {
  // plane n.p = 500 with n = (0.1, -0.2, 1) normalized: depth along each ray is analytic
  Intrinsics k{300, 300, 40, 30};
  const double nx = 0.1, ny = -0.2, nz = 1.0, c0 = 500;
  DepthMap d{RealRaster(80, 60, 0.0), Mask(80, 60, 1)};
  for (int v = 0; v < 60; ++v)
    for (int u = 0; u < 80; ++u) {
      const double rx = (u - k.cx) / k.fx, ry = (v - k.cy) / k.fy;
      d.depth_mm(u, v) = c0 / (nx * rx + ny * ry + nz);
    }
  PointCloud pc = depth_to_pointcloud(d, ColorImage(80, 60), k);
  double worst = 0;
  for (const auto& p : pc.points) worst = std::max(worst, std::fabs(nx * p.x + ny * p.y + nz * p.z - c0));
  CHECK(worst <= 1e-9);
}
