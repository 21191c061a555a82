#include "bopeval/visibility.hpp"

#include "bopeval/error.hpp"

#include <algorithm>
#include <string>

namespace bopeval {

std::size_t VisibilityMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

VisibilityMask visibility_mask(const DistanceMap& rendered,
                               const DistanceMap& measured, double delta) {
  if (!rendered.same_shape(measured)) {
    throw InputError("visibility: rendered map is " + std::to_string(rendered.width) +
                     "x" + std::to_string(rendered.height) + ", measured map is " +
                     std::to_string(measured.width) + "x" +
                     std::to_string(measured.height));
  }
  if (!(delta > 0.0)) throw InputError("visibility delta must be positive");
  VisibilityMask mask(rendered.width, rendered.height);
  for (std::size_t i = 0; i < rendered.values.size(); ++i) {
    const double r = rendered.values[i];
    const double m = measured.values[i];
    mask.bits[i] = r > 0.0 && (m == 0.0 || r <= m + delta);
  }
  return mask;
}

VisibilityMask gt_visibility_mask(const DistanceMap& rendered_gt,
                                  const DistanceMap& measured, double delta) {
  return visibility_mask(rendered_gt, measured, delta);
}

VisibilityMask est_visibility_mask_extended(const DistanceMap& rendered_est,
                                            const DistanceMap& measured,
                                            const VisibilityMask& gt_mask,
                                            double delta) {
  VisibilityMask mask = visibility_mask(rendered_est, measured, delta);
  if (gt_mask.width != mask.width || gt_mask.height != mask.height) {
    throw InputError("visibility: ground-truth mask size does not match");
  }
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (gt_mask.bits[i] && rendered_est.values[i] > 0.0) mask.bits[i] = 1;
  }
  return mask;
}

double visible_fraction(const VisibilityMask& mask, const DistanceMap& rendered) {
  if (mask.width != rendered.width || mask.height != rendered.height) {
    throw InputError("visible_fraction: mask and render sizes differ");
  }
  std::size_t footprint = 0;
  std::size_t visible = 0;
  for (std::size_t i = 0; i < rendered.values.size(); ++i) {
    if (rendered.values[i] > 0.0) {
      ++footprint;
      if (mask.bits[i]) ++visible;
    }
  }
  if (footprint == 0) return 0.0;
  return static_cast<double>(visible) / static_cast<double>(footprint);
}

}  // namespace bopeval
