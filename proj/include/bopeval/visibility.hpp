#pragma once

#include "bopeval/raster.hpp"

#include <cstdint>
#include <vector>

namespace bopeval {

struct VisibilityMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1, row-major

  VisibilityMask() = default;
  VisibilityMask(int w, int h) : width(w), height(h), bits(std::size_t(w) * h, 0) {}

  bool at(int u, int v) const { return bits[std::size_t(v) * width + u] != 0; }
  std::size_t count() const;
  bool operator==(const VisibilityMask&) const = default;
};

inline constexpr double kDefaultVisibilityDelta = 15.0;  // mm

// Pixel p is visible iff rendered(p) > 0 and either the sensor has no
// measurement there (measured(p) == 0) or rendered(p) <= measured(p) + delta.
// Throws InputError on dimension mismatch or delta <= 0.
VisibilityMask visibility_mask(const DistanceMap& rendered,
                               const DistanceMap& measured, double delta);

// Same rule, applied to the ground-truth render.
VisibilityMask gt_visibility_mask(const DistanceMap& rendered_gt,
                                  const DistanceMap& measured, double delta);

// visibility_mask(rendered_est, ...) plus every pixel inside both gt_mask and
// the estimate's footprint.
VisibilityMask est_visibility_mask_extended(const DistanceMap& rendered_est,
                                            const DistanceMap& measured,
                                            const VisibilityMask& gt_mask,
                                            double delta);

// |mask| / |footprint of rendered|, or 0 for an empty footprint.
double visible_fraction(const VisibilityMask& mask, const DistanceMap& rendered);

}  // namespace bopeval
