#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "markcut/geometry.h"
#include "markcut/raster.h"
#include "markcut/scanio.h"

namespace markcut {

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Vec3 apply(Vec3 p) const {
    const Eigen::Vector3d q = rotation * Eigen::Vector3d(p.x, p.y, p.z) + translation;
    return {q.x(), q.y(), q.z()};
  }
  RigidTransform inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
};

struct WorkspaceFrame {
  Vec3 origin;             // workspace origin in camera coordinates
  Vec3 axes[3];            // X, Y, Z unit vectors in camera coordinates
  double x_len = 0, y_len = 0;
};

struct FrameFit {
  WorkspaceFrame frame;
  RigidTransform camera_to_workspace;
  double residual_rms_mm = 0;   // 3D residual of the marker correspondences
  Vec3 plane_normal;            // total-least-squares normal, toward the camera
  double plane_rms_mm = 0;
};

struct DetectionOptions {
  double dark_luminance = 60;   // 0..255
  int min_area_px = 12;
  int border_band_px = 0;       // 0 = whole raster
};

// Fiducial centers in image pixels, ordered to match spec.nominal_centers_mm.
std::vector<Vec2> detect_fiducials(const ColorImage& color, const FiducialSpec& spec,
                                   const DetectionOptions& options = {});

// 3D camera-space marker points from image centers and averaged depth.
std::vector<Vec3> marker_points(const std::vector<Vec2>& centers_px, const DepthMap& depth,
                                const Intrinsics& intrinsics);

FrameFit fit_workspace_frame(const std::vector<Vec3>& marker_points,
                             const std::vector<Vec2>& nominal_centers);

struct AlignmentReport {
  std::vector<Vec2> truth;
  std::vector<Vec2> error_vectors;     // measured - truth, mm
  std::vector<double> magnitudes;
  RealRaster heatmap;                  // interpolated magnitudes over the truth bounding box
  double heatmap_origin_x = 0, heatmap_origin_y = 0, heatmap_resolution = 1;
  double max_error = 0;
  double center_error = 0;
  std::size_t center_index = 0;
  double rms_error = 0;
  double compression_x = 0, compression_y = 0;  // fractions, positive = measured shrinks
};

// Relative shrinkage of a measured extent against its reference extent.
double compression_ratio(double reference_extent, double measured_extent);

AlignmentReport evaluate_alignment(const std::vector<Vec2>& truth_points,
                                   const std::vector<Vec2>& measured_points,
                                   int raster_width, int raster_height);

// JSON summary + 16-bit heatmap (0.001 mm/unit) + CSV of (x, y, dx, dy) with
// vectors multiplied by vector_scale for display.
void export_alignment(const AlignmentReport& report, const std::filesystem::path& dir,
                      double vector_scale = 40.0);
std::string alignment_json(const AlignmentReport& report);

}  // namespace markcut
