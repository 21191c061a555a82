#pragma once

#include "bopeval/geometry.hpp"
#include "bopeval/raster.hpp"
#include "bopeval/symmetry.hpp"
#include "bopeval/visibility.hpp"

#include <span>
#include <vector>

namespace bopeval {

struct VsdError {
  double tau;    // mm
  double error;  // in [0, 1]
};
using VsdErrorVector = std::vector<VsdError>;

// Visible Surface Discrepancy for every tau (strictly increasing, mm). A pixel
// of the mask union scores 0 when it lies in both masks and the distance maps
// differ by less than tau there, 1 otherwise; the error is the mean score.
// Throws InputError on size mismatch, bad taus, or an empty mask union.
VsdErrorVector vsd(const DistanceMap& est_dist, const DistanceMap& gt_dist,
                   const VisibilityMask& est_mask, const VisibilityMask& gt_mask,
                   std::span<const double> taus);

// Maximum Symmetry-aware Surface Distance (mm):
// min over S of max over x of |est x - gt S x|.
double mssd(const RigidTransform& est, const RigidTransform& gt,
            const SymmetrySet& syms, std::span<const Vec3> verts);

// Maximum Symmetry-aware Projection Distance (px): as mssd, on the 2D
// projections. Throws InputError when a transformed vertex is not in front
// of the camera.
double mspd(const RigidTransform& est, const RigidTransform& gt,
            const SymmetrySet& syms, std::span<const Vec3> verts,
            const CameraIntrinsics& cam);

enum class AverageDistanceMode { Add, Adi };

// ADD: mean |est x - gt x|. ADI: mean over x of min over y of |est x - gt y|.
double add_adi(const RigidTransform& est, const RigidTransform& gt,
               std::span<const Vec3> verts, AverageDistanceMode mode);

}  // namespace bopeval
