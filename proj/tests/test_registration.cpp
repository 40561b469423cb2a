#include <doctest.h>

#include <Eigen/Geometry>
#include <random>

#include "markcut/fixtures.h"
#include "markcut/registration.h"

using namespace markcut;

namespace {

// Raster with dark squares whose centers are a similarity image of the layout.
struct MarkerRaster {
  ColorImage image;
  std::vector<Vec2> centers;
};

MarkerRaster draw_markers(const std::vector<Vec2>& layout, double px_per_mm, Vec2 offset, int half, int w, int h) {
  MarkerRaster m{ColorImage(w, h, kWoodColor), {}};
  for (Vec2 q : layout) {
    const Vec2 c{offset.x + q.x * px_per_mm, offset.y + q.y * px_per_mm};
    // pixel (u, v) covers [u, u+1); a square of 2*half pixels centered on c
    const int u0 = static_cast<int>(std::lround(c.x)) - half, v0 = static_cast<int>(std::lround(c.y)) - half;
    for (int v = v0; v < v0 + 2 * half; ++v)
      for (int u = u0; u < u0 + 2 * half; ++u) m.image(u, v) = {20, 20, 20};
    // centroid of pixel indices
    m.centers.push_back({u0 + half - 0.5, v0 + half - 0.5});
  }
  return m;
}

FiducialSpec layout_spec() {
  FiducialSpec s;
  s.nominal_centers_mm = default_fiducial_layout(300, 220, 20);
  s.count = static_cast<int>(s.nominal_centers_mm.size());
  return s;
}

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace

TEST_CASE("ten synthetic markers are found within half a pixel") {
  const FiducialSpec spec = layout_spec();
  REQUIRE(spec.count == 10);
  MarkerRaster m = draw_markers(spec.nominal_centers_mm, 2.0, {40, 30}, 10, 700, 520);
  auto found = detect_fiducials(m.image, spec);
  REQUIRE(found.size() == 10);
  for (std::size_t i = 0; i < found.size(); ++i) CHECK(dist(found[i], m.centers[i]) <= 0.5);
}

TEST_CASE("three blobs against a count of ten") {
  const FiducialSpec spec = layout_spec();
  std::vector<Vec2> three(spec.nominal_centers_mm.begin(), spec.nominal_centers_mm.begin() + 3);
  MarkerRaster m = draw_markers(three, 2.0, {40, 30}, 10, 700, 520);
  try {
    detect_fiducials(m.image, spec);
    FAIL("expected DetectionError");
  } catch (const DetectionError& e) {
    CHECK(e.found() == 3);
  }
}

TEST_CASE("a half-turned raster gives the same centers under layout matching") {
  const FiducialSpec spec = layout_spec();
  MarkerRaster m = draw_markers(spec.nominal_centers_mm, 2.0, {40, 30}, 10, 700, 520);
  ColorImage turned(700, 520);
  for (int v = 0; v < 520; ++v)
    for (int u = 0; u < 700; ++u) turned(699 - u, 519 - v) = m.image(u, v);
  auto found = detect_fiducials(turned, spec);
  REQUIRE(found.size() == 10);
  // every turned truth center is found once
  std::vector<int> used(10, 0);
  for (Vec2 c : m.centers) {
    const Vec2 t{699 - c.x, 519 - c.y};
    int hit = -1;
    for (int i = 0; i < 10; ++i)
      if (dist(found[i], t) <= 0.5) hit = i;
    REQUIRE(hit >= 0);
    ++used[hit];
  }
  for (int u : used) CHECK(u == 1);
  // and the order is a similarity image of the layout
  std::vector<Vec3> pts;
  for (Vec2 f : found) pts.push_back({f.x * 0.5, f.y * 0.5, 600});
  CHECK(fit_workspace_frame(pts, spec.nominal_centers_mm).residual_rms_mm < 0.25);
}

TEST_CASE("axis-aligned markers on a plane give an identity rotation") {
  std::vector<Vec2> nominal{{0, 0}, {300, 0}, {300, 527}, {0, 527}, {150, 0}, {150, 527}};
  std::vector<Vec3> markers;
  for (Vec2 q : nominal) markers.push_back({q.x - 150, q.y - 263.5, 600});
  FrameFit fit = fit_workspace_frame(markers, nominal);
  CHECK((fit.camera_to_workspace.rotation - Eigen::Matrix3d::Identity()).norm() <= 1e-9);
  CHECK((fit.camera_to_workspace.translation - Eigen::Vector3d(150, 263.5, -600)).norm() <= 1e-9);
  CHECK(fit.frame.x_len == doctest::Approx(300).epsilon(1e-12));
  CHECK(fit.frame.y_len == doctest::Approx(527).epsilon(1e-12));
}

TEST_CASE("four transformed coplanar points recover the inverse transform") {
  std::mt19937_64 rng(11);
  std::vector<Vec2> nominal{{0, 0}, {200, 0}, {200, 120}, {0, 120}};
  const Eigen::Matrix3d R = random_rotation(rng);
  const Eigen::Vector3d t(12.5, -40, 610);
  std::vector<Vec3> markers;
  for (Vec2 q : nominal) {
    Eigen::Vector3d p = R * Eigen::Vector3d(q.x, q.y, 0) + t;
    markers.push_back({p.x(), p.y(), p.z()});
  }
  FrameFit fit = fit_workspace_frame(markers, nominal);
  CHECK((fit.camera_to_workspace.rotation - R.transpose()).norm() <= 1e-9);
  CHECK((fit.camera_to_workspace.translation + R.transpose() * t).norm() <= 1e-9);
}

TEST_CASE("collinear markers are degenerate") {
  std::vector<Vec3> markers{{0, 0, 600}, {10, 0, 600}, {20, 0, 600}, {30, 0, 600}};
  std::vector<Vec2> nominal{{0, 0}, {10, 0}, {20, 0}, {30, 0}};
  CHECK_THROWS_AS(fit_workspace_frame(markers, nominal), DegenerateGeometryError);
}

TEST_CASE("fit residual bounds the round-trip error") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0, 0.7);
  const auto nominal = default_fiducial_layout(300, 220, 20);
  const Eigen::Matrix3d R = random_rotation(rng);
  std::vector<Vec3> markers;
  for (Vec2 q : nominal) {
    Eigen::Vector3d p = R * Eigen::Vector3d(q.x, q.y, 0) + Eigen::Vector3d(1, 2, 500);
    markers.push_back({p.x() + noise(rng), p.y() + noise(rng), p.z() + noise(rng)});
  }
  FrameFit fit = fit_workspace_frame(markers, nominal);
  double sq = 0;
  for (std::size_t i = 0; i < nominal.size(); ++i) {
    Vec3 w = fit.camera_to_workspace.apply(markers[i]);
    sq += (w.x - nominal[i].x) * (w.x - nominal[i].x) + (w.y - nominal[i].y) * (w.y - nominal[i].y) + w.z * w.z;
  }
  CHECK(std::sqrt(sq / nominal.size()) <= fit.residual_rms_mm + 1e-12);
}

TEST_CASE("exact recovery over random rigid transforms") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-500, 500);
  const auto nominal = default_fiducial_layout(300, 220, 20);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Matrix3d R = random_rotation(rng);
    const Eigen::Vector3d t(u(rng), u(rng), u(rng));
    std::vector<Vec3> markers;
    for (Vec2 q : nominal) {
      Eigen::Vector3d p = R * Eigen::Vector3d(q.x, q.y, 0) + t;
      markers.push_back({p.x(), p.y(), p.z()});
    }
    FrameFit fit = fit_workspace_frame(markers, nominal);
    worst = std::max(worst, (fit.camera_to_workspace.rotation - R.transpose()).norm());
    worst = std::max(worst, (fit.camera_to_workspace.translation + R.transpose() * t).norm());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("identical point sets have zero alignment error") {
  std::vector<Vec2> pts{{0, 0}, {10, 5}, {20, 40}};
  AlignmentReport r = evaluate_alignment(pts, pts, 20, 20);
  CHECK(r.max_error == 0);
  CHECK(r.rms_error == 0);
  for (Vec2 e : r.error_vectors) CHECK((e.x == 0 && e.y == 0));
}

TEST_CASE("extent compression from the reported measurements") {
  CHECK(compression_ratio(300, 296) * 100 == doctest::Approx(1.3333).epsilon(1e-4));
  CHECK(compression_ratio(527, 524) * 100 == doctest::Approx(0.5693).epsilon(1e-3));
  std::vector<Vec2> truth{{0, 0}, {300, 0}, {300, 527}, {0, 527}};
  std::vector<Vec2> measured{{2, 1.5}, {298, 1.5}, {298, 525.5}, {2, 525.5}};
  AlignmentReport r = evaluate_alignment(truth, measured, 10, 10);
  CHECK(r.compression_x == doctest::Approx(4.0 / 300));
  CHECK(r.compression_y == doctest::Approx(3.0 / 527));
}

TEST_CASE("mismatched point lists are an argument error") {
  CHECK_THROWS_AS(evaluate_alignment({{0, 0}}, {{0, 0}, {1, 1}}, 4, 4), ArgumentError);
}

TEST_CASE("radial error growing from the center is smallest at the center point") {
  std::vector<Vec2> truth, measured;
  for (int k = 0; k < 23; ++k) truth.push_back({20.0 * (k % 5), 20.0 * (k / 5)});
  Vec2 c{0, 0};
  for (Vec2 p : truth) c = c + p * (1.0 / truth.size());
  for (Vec2 p : truth) measured.push_back(p + (p - c) * 0.01);
  AlignmentReport r = evaluate_alignment(truth, measured, 50, 50);
  double lowest = *std::min_element(r.magnitudes.begin(), r.magnitudes.end());
  CHECK(r.center_error == lowest);
}
