#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "markcut/error.h"

namespace markcut {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Row-major raster. Row index grows with workspace y.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw ArgumentError("negative raster size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool same_shape(int w, int h) const { return w == width_ && h == height_; }
  template <typename U>
  bool same_shape(const Raster<U>& o) const {
    return o.width() == width_ && o.height() == height_;
  }

  T& operator()(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Mask = Raster<std::uint8_t>;
using ColorImage = Raster<Rgb>;
using DepthImage = Raster<std::uint16_t>;
using RealRaster = Raster<double>;

// Placement of a raster in workspace coordinates. Pixel (i, j) has its
// center at (offset_x + (i + 0.5) * resolution, offset_y + (j + 0.5) * resolution).
struct RasterGeometry {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;

  double center_x(double i) const { return offset_x + (i + 0.5) * resolution; }
  double center_y(double j) const { return offset_y + (j + 0.5) * resolution; }
  double to_px(double x) const { return (x - offset_x) / resolution - 0.5; }
  double to_py(double y) const { return (y - offset_y) / resolution - 0.5; }
  double extent_x() const { return width * resolution; }
  double extent_y() const { return height * resolution; }
  friend bool operator==(const RasterGeometry&, const RasterGeometry&) = default;
};

}  // namespace markcut
