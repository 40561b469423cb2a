#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "markcut/geometry.h"
#include "markcut/raster.h"

namespace markcut {

struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
};

struct FiducialSpec {
  int count = 0;
  std::vector<Vec2> nominal_centers_mm;
};

struct ScanBundle {
  std::vector<ColorImage> color_frames;
  std::vector<DepthImage> depth_frames;
  double depth_scale_mm = 0.1;  // mm per raw depth unit; raw 0 = no reading
  Intrinsics intrinsics;
  FiducialSpec fiducials;
  double camera_height_mm = 0;
};

// Per-pixel metric depth plus validity.
struct DepthMap {
  RealRaster depth_mm;
  Mask valid;
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Rgb> colors;
};

// Reads `scan.json` and the frames it references.
ScanBundle load_scan_bundle(const std::filesystem::path& dir);
// Writes a bundle using the on-disk layout load_scan_bundle expects.
void save_scan_bundle(const ScanBundle& bundle, const std::filesystem::path& dir);

// Mean over valid readings; pixels valid in fewer than half the frames are
// marked invalid.
DepthMap average_depth_frames(std::span<const DepthImage> frames, double depth_scale_mm);

// Pinhole back-projection of every valid pixel.
PointCloud depth_to_pointcloud(const DepthMap& depth, const ColorImage& color,
                               const Intrinsics& intrinsics);

}  // namespace markcut
