#include "markcut/scanio.h"

#include <json.hpp>

#include "markcut/image_io.h"

namespace markcut {

namespace fs = std::filesystem;
using nlohmann::json;

ScanBundle load_scan_bundle(const fs::path& dir) {
  const fs::path manifest = dir / "scan.json";
  if (!fs::exists(manifest)) throw BundleError("missing manifest " + manifest.string());
  json j;
  try {
    j = json::parse(io::read_file(manifest));
  } catch (const json::exception& e) {
    throw BundleError(std::string("malformed manifest: ") + e.what());
  }

  ScanBundle b;
  try {
    b.depth_scale_mm = j.value("depth_scale_mm", 0.1);
    const json& in = j.at("intrinsics");
    b.intrinsics = {in.at("fx").get<double>(), in.at("fy").get<double>(),
                    in.at("cx").get<double>(), in.at("cy").get<double>()};
    if (j.contains("fiducials")) {
      b.fiducials.count = j["fiducials"].value("count", 0);
      for (const auto& c : j["fiducials"].value("nominal_centers_mm", json::array()))
        b.fiducials.nominal_centers_mm.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    }
    b.camera_height_mm = j.value("camera_height_mm", 0.0);

    auto resolve = [&](const json& name) {
      const fs::path p = dir / name.get<std::string>();
      if (!fs::exists(p)) throw BundleError("missing frame file " + p.filename().string());
      return p;
    };
    for (const auto& name : j.at("color_frames")) b.color_frames.push_back(io::read_ppm(resolve(name)));
    for (const auto& name : j.at("depth_frames")) b.depth_frames.push_back(io::read_pgm16(resolve(name)));
  } catch (const json::exception& e) {
    throw BundleError(std::string("manifest field error: ") + e.what());
  }

  if (b.depth_frames.empty()) throw BundleError("bundle has no depth frames");
  if (b.color_frames.empty()) throw BundleError("bundle has no color frames");
  if (!(b.intrinsics.fx > 0 && b.intrinsics.fy > 0)) throw BundleError("focal lengths must be positive");
  if (!(b.depth_scale_mm > 0)) throw BundleError("depth_scale_mm must be positive");
  const int w = b.color_frames[0].width(), h = b.color_frames[0].height();
  for (const auto& f : b.color_frames)
    if (!f.same_shape(w, h)) throw BundleError("color frame dimensions differ");
  for (const auto& f : b.depth_frames)
    if (!f.same_shape(w, h))
      throw BundleError("depth frame is " + std::to_string(f.width()) + "x" +
                        std::to_string(f.height()) + ", color is " + std::to_string(w) +
                        "x" + std::to_string(h));
  return b;
}

void save_scan_bundle(const ScanBundle& b, const fs::path& dir) {
  fs::create_directories(dir);
  json j;
  j["depth_scale_mm"] = b.depth_scale_mm;
  j["intrinsics"] = {{"fx", b.intrinsics.fx}, {"fy", b.intrinsics.fy},
                     {"cx", b.intrinsics.cx}, {"cy", b.intrinsics.cy}};
  json centers = json::array();
  for (Vec2 c : b.fiducials.nominal_centers_mm) centers.push_back({c.x, c.y});
  j["fiducials"] = {{"count", b.fiducials.count}, {"nominal_centers_mm", centers}};
  j["camera_height_mm"] = b.camera_height_mm;
  j["color_frames"] = json::array();
  j["depth_frames"] = json::array();
  for (std::size_t i = 0; i < b.color_frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "color_%02zu.ppm", i);
    io::write_ppm(dir / name, b.color_frames[i]);
    j["color_frames"].push_back(name);
  }
  for (std::size_t i = 0; i < b.depth_frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "depth_%02zu.pgm", i);
    io::write_pgm16(dir / name, b.depth_frames[i]);
    j["depth_frames"].push_back(name);
  }
  io::write_file(dir / "scan.json", j.dump(2) + "\n");
}

DepthMap average_depth_frames(std::span<const DepthImage> frames, double depth_scale_mm) {
  if (frames.empty()) throw ArgumentError("no depth frames to average");
  const int w = frames[0].width(), h = frames[0].height();
  for (const auto& f : frames)
    if (!f.same_shape(w, h)) throw ArgumentError("depth frames differ in size");

  DepthMap out{RealRaster(w, h, 0.0), Mask(w, h, 0)};
  const std::size_t n = frames.size();
  for (std::size_t i = 0; i < out.depth_mm.size(); ++i) {
    std::uint64_t sum = 0;
    std::size_t valid = 0;
    for (const auto& f : frames) {
      if (f[i] != 0) {
        sum += f[i];
        ++valid;
      }
    }
    // valid in at least half of the frames
    if (valid > 0 && 2 * valid >= n) {
      out.depth_mm[i] = depth_scale_mm * static_cast<double>(sum) / static_cast<double>(valid);
      out.valid[i] = 1;
    }
  }
  return out;
}

PointCloud depth_to_pointcloud(const DepthMap& depth, const ColorImage& color,
                               const Intrinsics& k) {
  if (!depth.depth_mm.same_shape(color) || !depth.valid.same_shape(color))
    throw ArgumentError("depth and color dimensions differ");
  if (!(k.fx > 0 && k.fy > 0)) throw ArgumentError("invalid intrinsics");
  PointCloud cloud;
  for (int v = 0; v < color.height(); ++v) {
    for (int u = 0; u < color.width(); ++u) {
      if (!depth.valid(u, v)) continue;
      const double z = depth.depth_mm(u, v);
      cloud.points.push_back({(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z});
      cloud.colors.push_back(color(u, v));
    }
  }
  return cloud;
}

}  // namespace markcut
