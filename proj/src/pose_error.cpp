#include "bopeval/pose_error.hpp"

#include "bopeval/error.hpp"
#include "bopeval/point_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bopeval {

VsdErrorVector vsd(const DistanceMap& est_dist, const DistanceMap& gt_dist,
                   const VisibilityMask& est_mask, const VisibilityMask& gt_mask,
                   std::span<const double> taus) {
  const int w = est_dist.width;
  const int h = est_dist.height;
  if (!gt_dist.same_shape(w, h) || est_mask.width != w || est_mask.height != h ||
      gt_mask.width != w || gt_mask.height != h) {
    throw InputError("vsd: distance maps and masks must share one size");
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0) || (i > 0 && !(taus[i] > taus[i - 1]))) {
      throw InputError("vsd: taus must be positive and strictly increasing");
    }
  }

  std::size_t union_count = 0;
  std::vector<double> diffs;  // |est - gt| over the mask intersection
  for (std::size_t i = 0; i < est_mask.bits.size(); ++i) {
    const bool e = est_mask.bits[i] != 0;
    const bool g = gt_mask.bits[i] != 0;
    if (!e && !g) continue;
    ++union_count;
    if (e && g) diffs.push_back(std::abs(est_dist.values[i] - gt_dist.values[i]));
  }
  if (union_count == 0) {
    throw InputError("vsd: the union of visibility masks is empty");
  }
  std::sort(diffs.begin(), diffs.end());

  VsdErrorVector out;
  out.reserve(taus.size());
  for (double tau : taus) {
    const auto matched = static_cast<std::size_t>(
        std::lower_bound(diffs.begin(), diffs.end(), tau) - diffs.begin());
    out.push_back({tau, static_cast<double>(union_count - matched) /
                            static_cast<double>(union_count)});
  }
  return out;
}

namespace {

void require_inputs(const SymmetrySet& syms, std::span<const Vec3> verts,
                    const char* what) {
  if (verts.empty()) throw InputError(std::string(what) + ": empty vertex list");
  if (syms.size() == 0) throw InputError(std::string(what) + ": empty symmetry set");
}

[[noreturn]] void behind_camera(std::size_t vertex, const char* pose) {
  throw InputError("mspd: vertex " + std::to_string(vertex) + " is behind the camera under the " +
                   pose + " pose");
}

}  // namespace

double mssd(const RigidTransform& est, const RigidTransform& gt,
            const SymmetrySet& syms, std::span<const Vec3> verts) {
  require_inputs(syms, verts, "mssd");
  const PointList est_pts = transform_points(est, verts);
  double best = std::numeric_limits<double>::infinity();
  for (const RigidTransform& s : syms.transforms()) {
    const RigidTransform gs = compose(gt, s);
    double worst2 = 0.0;
    const double best2 = best * best;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      worst2 = std::max(worst2, (est_pts[i] - gs.apply(verts[i])).squaredNorm());
      if (worst2 >= best2) break;  // cannot improve on the current minimum
    }
    best = std::min(best, std::sqrt(worst2));
  }
  return best;
}

double mspd(const RigidTransform& est, const RigidTransform& gt,
            const SymmetrySet& syms, std::span<const Vec3> verts,
            const CameraIntrinsics& cam) {
  require_inputs(syms, verts, "mspd");
  cam.validate();
  auto project = [&](const Vec3& x) -> Vec2 {
    return {cam.fx * x.x() / x.z() + cam.cx, cam.fy * x.y() / x.z() + cam.cy};
  };
  PixelList est_px(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vec3 x = est.apply(verts[i]);
    if (!(x.z() > 0.0)) behind_camera(i, "estimated");
    est_px[i] = project(x);
  }
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (!(gt.apply(verts[i]).z() > 0.0)) behind_camera(i, "ground-truth");
  }

  double best = std::numeric_limits<double>::infinity();
  for (const RigidTransform& s : syms.transforms()) {
    const RigidTransform gs = compose(gt, s);
    double worst2 = 0.0;
    const double best2 = best * best;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const Vec3 x = gs.apply(verts[i]);
      if (!(x.z() > 0.0)) behind_camera(i, "symmetric ground-truth");
      worst2 = std::max(worst2, (est_px[i] - project(x)).squaredNorm());
      if (worst2 >= best2) break;
    }
    best = std::min(best, std::sqrt(worst2));
  }
  return best;
}

double add_adi(const RigidTransform& est, const RigidTransform& gt,
               std::span<const Vec3> verts, AverageDistanceMode mode) {
  if (verts.empty()) throw InputError("add/adi: empty vertex list");
  const PointList est_pts = transform_points(est, verts);
  const PointList gt_pts = transform_points(gt, verts);
  double sum = 0.0;
  if (mode == AverageDistanceMode::Add) {
    for (std::size_t i = 0; i < verts.size(); ++i) sum += (est_pts[i] - gt_pts[i]).norm();
  } else {
    const PointGrid grid(gt_pts);
    for (const Vec3& p : est_pts) sum += grid.nearest_distance(p);
  }
  return sum / static_cast<double>(verts.size());
}

}  // namespace bopeval
