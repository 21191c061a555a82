#pragma once

#include "bopeval/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace bopeval {

// Raw 16-bit single-channel image.
struct Gray16Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;
};

// Throws InputError unless the file is a 16-bit grayscale PNG.
Gray16Image read_png16(const std::filesystem::path& path);
void write_png16(const std::filesystem::path& path, const Gray16Image& image);

// Depth in mm = stored value * depth_scale; 0 stays 0 (missing measurement).
DepthMap read_depth_png(const std::filesystem::path& path, double depth_scale);

// Inverse of read_depth_png, rounding to the nearest representable value.
// Throws InputError when a depth does not fit in 16 bits at this scale.
void write_depth_png(const std::filesystem::path& path, const DepthMap& depth,
                     double depth_scale);

}  // namespace bopeval
