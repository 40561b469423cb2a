#pragma once

#include <cstdint>
#include <vector>

#include "markcut/raster.h"

namespace markcut::morph {

struct Components {
  Raster<int> labels;  // 0 = background, 1..count
  int count = 0;
};

Components label_components(const Mask& mask, bool eight_connected = true);

// Structuring element: all offsets with dx^2 + dy^2 <= radius^2.
Mask erode(const Mask& mask, int radius);
Mask dilate(const Mask& mask, int radius);
Mask open(const Mask& mask, int radius);
Mask close(const Mask& mask, int radius);

// Exact squared Euclidean distance (pixel units) from each pixel to the
// nearest site, two-pass lower-envelope algorithm. Pixels with no site get
// +inf. `nearest`, when given, receives the flat index of the nearest site.
Raster<double> squared_distance_to_sites(const Mask& sites, std::vector<std::int64_t>* nearest = nullptr);

// Distance (pixel units) from each region pixel to the nearest pixel center
// outside the region; pixels beyond the raster border count as outside.
// Zero outside the region.
Raster<double> distance_inside(const Mask& region);

// Zhang-Suen thinning to a one-pixel skeleton.
Mask thin(const Mask& mask);

}  // namespace markcut::morph
